#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rdepth/stats.hpp"

namespace rdepth {

/// Named, ordered feature values for one subject. Missing entries hold
/// kMissing (NaN).
struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    std::size_t size() const { return names.size(); }
    void push(std::string name, double value)
    {
        names.push_back(std::move(name));
        values.push_back(value);
    }
    void append(const FeatureVector& other, const std::string& prefix = "");
    /// Index of `name`, or -1.
    std::ptrdiff_t find(const std::string& name) const;
};

inline bool is_missing(double v) { return v != v; }

/// Subjects × features matrix. Rows are stored subject-major.
class FeatureTable {
public:
    FeatureTable() = default;
    explicit FeatureTable(std::vector<std::string> names);

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::string>& subjects() const { return subjects_; }
    std::size_t rows() const { return subjects_.size(); }
    std::size_t cols() const { return names_.size(); }

    double operator()(std::size_t row, std::size_t col) const { return values_[row * names_.size() + col]; }
    double& operator()(std::size_t row, std::size_t col) { return values_[row * names_.size() + col]; }

    void add_row(std::string subject, const std::vector<double>& row);
    /// Checks `fv.names` against the table columns.
    void add_row(std::string subject, const FeatureVector& fv);
    std::ptrdiff_t column(const std::string& name) const;
    std::ptrdiff_t row(const std::string& subject) const;
    FeatureVector row_vector(std::size_t row) const;
    /// New table holding the given rows in the given order.
    FeatureTable select_rows(const std::vector<std::size_t>& rows) const;

private:
    std::vector<std::string> names_;
    std::vector<std::string> subjects_;
    std::vector<double> values_;
};

/// CSV with a header row whose first column is subject_id. Lines starting
/// with '#' are comments. Empty cells denote missing values.
FeatureTable read_feature_csv(const std::filesystem::path& path);
FeatureTable parse_feature_csv(std::istream& in, const std::string& source = "<stream>");
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table,
                       const std::string& header_comment = "");
void write_feature_csv(std::ostream& out, const FeatureTable& table, const std::string& header_comment = "");

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace rdepth
