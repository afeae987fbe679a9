#pragma once

#include "cds/random.hpp"
#include "cds/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cds::study {

/// One login attempt. On disk: one tab-separated line per record, fields in
/// the order timestamp_ms, user, scheme, trial, outcome, duration_seconds,
/// terminated by '\n'. Outcome is `success` or `failure`.
struct SessionRecord {
    std::int64_t timestamp_ms = 0;
    std::string user;
    std::string scheme;
    int trial = 1;
    bool success = true;
    double duration_s = 0.0;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

std::string format_record(const SessionRecord& record);
/// Throws CorruptRecord (message carries `line_number`) on malformed input.
SessionRecord parse_record(const std::string& line, std::size_t line_number);

void append_session(const std::filesystem::path& log, const SessionRecord& record);
/// A final line without its terminating newline counts as truncated.
std::vector<SessionRecord> load_sessions(const std::filesystem::path& log);

struct GroupReport {
    std::string scheme;
    std::optional<stats::Summary> login_time;  ///< successful attempts only
    std::size_t attempts = 0;
    std::size_t successes = 0;
    /// Mean and sample sd of per-user success rates, in percent.
    std::optional<stats::Summary> user_success_pct;
    /// One-way ANOVA of successful login time grouped by trial index.
    std::optional<stats::TestResult> trial_anova;
};

struct StudyReport {
    std::vector<GroupReport> groups;
    /// Pooled t-test on successful login times, first two groups.
    std::optional<stats::TestResult> between_groups;
};

StudyReport analyze_sessions(const std::vector<SessionRecord>& records);

/// Table with columns Group, Avg., t-test, S.d., Max, Min followed by
/// success-rate and per-trial ANOVA lines.
void write_report(std::ostream& out, const StudyReport& report);

struct SyntheticGroup {
    std::string scheme;
    int users = 10;
    int trials = 10;
    double first_trial_mean = 13.7;
    double last_trial_mean = 13.7;  ///< linear drift of the mean across trials
    double sd = 5.0;
    double success_probability = 1.0;
};

/// Normally distributed login times (floored at 0.5 s), deterministic per seed.
std::vector<SessionRecord> synthesize_sessions(const std::vector<SyntheticGroup>& groups, Seed seed);

}  // namespace cds::study
