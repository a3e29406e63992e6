#include "rdepth/survival.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rdepth/volume.hpp"

namespace rdepth {

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
            cell.pop_back();
        while (!cell.empty() && cell.front() == ' ')
            cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

}  // namespace

void validate_records(const std::vector<SurvivalRecord>& records)
{
    for (const auto& r : records)
        if (!std::isfinite(r.time) || r.time <= 0.0)
            throw DataError("subject '" + r.subject + "' has a non-positive or non-finite survival time");
}

std::vector<SurvivalRecord> parse_survival_csv(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::vector<SurvivalRecord> out;
    std::map<std::string, bool> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line == "\r")
            continue;
        const auto cells = split(line);
        const std::string where = source + ":" + std::to_string(lineno);
        if (!have_header) {
            if (cells.size() != 3 || cells[0] != "subject_id" || cells[1] != "time_days" || cells[2] != "event")
                throw DataError(where + ": expected header subject_id,time_days,event");
            have_header = true;
            continue;
        }
        if (cells.size() != 3)
            throw DataError(where + ": expected 3 cells");
        SurvivalRecord r;
        r.subject = cells[0];
        if (r.subject.empty())
            throw DataError(where + ": empty subject_id");
        const auto& t = cells[1];
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), r.time);
        if (ec != std::errc() || ptr != t.data() + t.size())
            throw DataError(where + ": cannot parse time '" + t + "'");
        if (cells[2] == "1")
            r.event = true;
        else if (cells[2] == "0")
            r.event = false;
        else
            throw DataError(where + ": event must be 0 or 1");
        if (seen.count(r.subject))
            throw DataError(where + ": duplicate subject_id '" + r.subject + "'");
        seen[r.subject] = true;
        out.push_back(std::move(r));
    }
    if (!have_header)
        throw DataError(source + ": missing header row");
    validate_records(out);
    return out;
}

std::vector<SurvivalRecord> read_survival_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open survival table " + path.string());
    return parse_survival_csv(in, path.string());
}

void write_survival_csv(const std::filesystem::path& path, const std::vector<SurvivalRecord>& records)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write survival table " + path.string());
    out << "subject_id,time_days,event\n";
    for (const auto& r : records)
        out << r.subject << ',' << format_double(r.time) << ',' << (r.event ? 1 : 0) << '\n';
}

JoinedCohort join_cohort(const FeatureTable& table, const std::vector<SurvivalRecord>& records)
{
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!by_id.emplace(records[i].subject, i).second)
            throw DataError("duplicate survival record for subject '" + records[i].subject + "'");

    JoinedCohort out{FeatureTable(table.names()), {}, {}};
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto it = by_id.find(table.subjects()[r]);
        if (it == by_id.end()) {
            out.unmatched.push_back(table.subjects()[r]);
            continue;
        }
        out.table.add_row(table.subjects()[r], table.row_vector(r).values);
        out.records.push_back(records[it->second]);
    }
    if (out.records.empty())
        throw DataError("no subject in the feature table has a survival record");
    return out;
}

std::size_t count_events(const std::vector<SurvivalRecord>& records)
{
    std::size_t n = 0;
    for (const auto& r : records)
        n += r.event ? 1 : 0;
    return n;
}

}  // namespace rdepth
