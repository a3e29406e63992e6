#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rdepth/features.hpp"

namespace rdepth {

struct SurvivalRecord {
    std::string subject;
    double time = 0;     // days, finite and > 0
    bool event = false;  // true: death observed, false: censored
};

/// CSV columns subject_id,time_days,event(0|1).
std::vector<SurvivalRecord> read_survival_csv(const std::filesystem::path& path);
std::vector<SurvivalRecord> parse_survival_csv(std::istream& in, const std::string& source = "<stream>");
void write_survival_csv(const std::filesystem::path& path, const std::vector<SurvivalRecord>& records);

/// Throws DataError if any record has a non-finite or non-positive time.
void validate_records(const std::vector<SurvivalRecord>& records);

/// Rows of `table` that have a survival record, with the matching records in
/// the same order. Throws DataError when nothing joins or ids repeat.
struct JoinedCohort {
    FeatureTable table;
    std::vector<SurvivalRecord> records;
    std::vector<std::string> unmatched;  // table subjects with no record
};
JoinedCohort join_cohort(const FeatureTable& table, const std::vector<SurvivalRecord>& records);

std::size_t count_events(const std::vector<SurvivalRecord>& records);

}  // namespace rdepth
