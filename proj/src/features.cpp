#include "rdepth/features.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rdepth/volume.hpp"

namespace rdepth {

void FeatureVector::append(const FeatureVector& other, const std::string& prefix)
{
    for (std::size_t i = 0; i < other.size(); ++i)
        push(prefix + other.names[i], other.values[i]);
}

std::ptrdiff_t FeatureVector::find(const std::string& name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return static_cast<std::ptrdiff_t>(i);
    return -1;
}

FeatureTable::FeatureTable(std::vector<std::string> names) : names_(std::move(names))
{
    std::set<std::string> seen;
    for (const auto& n : names_)
        if (!seen.insert(n).second)
            throw DataError("duplicate feature name '" + n + "'");
}

void FeatureTable::add_row(std::string subject, const std::vector<double>& row)
{
    if (row.size() != names_.size())
        throw DataError("row for subject '" + subject + "' has " + std::to_string(row.size()) +
                        " values, expected " + std::to_string(names_.size()));
    subjects_.push_back(std::move(subject));
    values_.insert(values_.end(), row.begin(), row.end());
}

void FeatureTable::add_row(std::string subject, const FeatureVector& fv)
{
    if (fv.names != names_)
        throw DataError("feature names for subject '" + subject + "' do not match the table columns");
    add_row(std::move(subject), fv.values);
}

std::ptrdiff_t FeatureTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name)
            return static_cast<std::ptrdiff_t>(i);
    return -1;
}

std::ptrdiff_t FeatureTable::row(const std::string& subject) const
{
    for (std::size_t i = 0; i < subjects_.size(); ++i)
        if (subjects_[i] == subject)
            return static_cast<std::ptrdiff_t>(i);
    return -1;
}

FeatureVector FeatureTable::row_vector(std::size_t r) const
{
    FeatureVector fv;
    fv.names = names_;
    fv.values.assign(values_.begin() + static_cast<std::ptrdiff_t>(r * cols()),
                     values_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols()));
    return fv;
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows) const
{
    FeatureTable out(names_);
    for (auto r : rows)
        out.add_row(subjects_.at(r), row_vector(r).values);
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, const std::string& where)
{
    const std::string s = trim(raw);
    if (s.empty() || s == "NA" || s == "nan" || s == "NaN")
        return kMissing;
    double v = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (*first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw DataError(where + ": cannot parse '" + s + "' as a number");
    return v;
}

}  // namespace

FeatureTable parse_feature_csv(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || trim(line).empty())
            continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty())
        throw DataError(source + ": missing header row");
    if (trim(header[0]) != "subject_id")
        throw DataError(source + ": first column must be subject_id");

    std::vector<std::string> names;
    for (std::size_t i = 1; i < header.size(); ++i)
        names.push_back(trim(header[i]));
    FeatureTable table(names);

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || trim(line).empty())
            continue;
        const auto cells = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(lineno);
        if (cells.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(names.size());
        for (std::size_t i = 1; i < cells.size(); ++i)
            row.push_back(parse_cell(cells[i], where));
        const std::string id = trim(cells[0]);
        if (id.empty())
            throw DataError(where + ": empty subject_id");
        if (table.row(id) >= 0)
            throw DataError(where + ": duplicate subject_id '" + id + "'");
        table.add_row(id, row);
    }
    return table;
}

FeatureTable read_feature_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open feature table " + path.string());
    return parse_feature_csv(in, path.string());
}

std::string format_double(double v)
{
    if (is_missing(v))
        return {};
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

void write_feature_csv(std::ostream& out, const FeatureTable& table, const std::string& header_comment)
{
    if (!header_comment.empty())
        out << "# " << header_comment << '\n';
    out << "subject_id";
    for (const auto& n : table.names())
        out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        out << table.subjects()[r];
        for (std::size_t c = 0; c < table.cols(); ++c)
            out << ',' << format_double(table(r, c));
        out << '\n';
    }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table,
                       const std::string& header_comment)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write feature table " + path.string());
    write_feature_csv(out, table, header_comment);
}

}  // namespace rdepth
