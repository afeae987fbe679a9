#include "cds/study.hpp"

#include "cds/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace cds::study {

namespace {

bool clean_field(const std::string& s) {
    return !s.empty() && s.find_first_of("\t\r\n") == std::string::npos;
}

void validate(const SessionRecord& r) {
    if (!clean_field(r.user) || !clean_field(r.scheme)) {
        throw Error(Errc::InvalidRange, "user and scheme must be non-empty and free of tabs/newlines");
    }
    if (r.trial < 1) {
        throw Error(Errc::InvalidRange, "trial index must be >= 1");
    }
    if (!(r.duration_s > 0.0) || !std::isfinite(r.duration_s)) {
        throw Error(Errc::InvalidRange, "duration must be positive");
    }
}

template <typename T>
bool parse_number(const std::string& field, T& out) {
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

std::string format_record(const SessionRecord& record) {
    validate(record);
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << record.timestamp_ms << '\t' << record.user << '\t' << record.scheme << '\t' << record.trial << '\t'
        << (record.success ? "success" : "failure") << '\t' << std::setprecision(17) << record.duration_s;
    return out.str();
}

SessionRecord parse_record(const std::string& line, std::size_t line_number) {
    auto corrupt = [&](const std::string& why) {
        return Error(Errc::CorruptRecord, "line " + std::to_string(line_number) + ": " + why);
    };
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) {
            break;
        }
        start = tab + 1;
    }
    if (fields.size() != 6) {
        throw corrupt("expected 6 fields, got " + std::to_string(fields.size()));
    }
    SessionRecord r;
    r.user = fields[1];
    r.scheme = fields[2];
    if (!parse_number(fields[0], r.timestamp_ms)) {
        throw corrupt("bad timestamp");
    }
    if (!parse_number(fields[3], r.trial)) {
        throw corrupt("bad trial index");
    }
    if (fields[4] == "success") {
        r.success = true;
    } else if (fields[4] == "failure") {
        r.success = false;
    } else {
        throw corrupt("bad outcome '" + fields[4] + "'");
    }
    if (!parse_number(fields[5], r.duration_s)) {
        throw corrupt("bad duration");
    }
    try {
        validate(r);
    } catch (const Error& e) {
        throw corrupt(e.what());
    }
    return r;
}

void append_session(const std::filesystem::path& log, const SessionRecord& record) {
    const std::string line = format_record(record) + '\n';
    std::ofstream out(log, std::ios::app | std::ios::binary);
    out << line;
    out.flush();
    if (!out) {
        throw Error(Errc::IoError, "cannot append to " + log.string());
    }
}

std::vector<SessionRecord> load_sessions(const std::filesystem::path& log) {
    std::ifstream in(log, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "cannot read " + log.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::vector<SessionRecord> records;
    std::size_t start = 0;
    std::size_t line_number = 0;
    while (start < text.size()) {
        ++line_number;
        const auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            throw Error(Errc::CorruptRecord, "line " + std::to_string(line_number) + ": truncated record");
        }
        const std::string line = text.substr(start, nl - start);
        if (!line.empty() && line.front() != '#') {
            records.push_back(parse_record(line, line_number));
        }
        start = nl + 1;
    }
    return records;
}

StudyReport analyze_sessions(const std::vector<SessionRecord>& records) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const SessionRecord*>> by_scheme;
    for (const auto& r : records) {
        auto [it, inserted] = by_scheme.try_emplace(r.scheme);
        if (inserted) {
            order.push_back(r.scheme);
        }
        it->second.push_back(&r);
    }

    StudyReport report;
    std::vector<std::vector<double>> times;
    for (const auto& scheme : order) {
        GroupReport g;
        g.scheme = scheme;
        std::vector<double> ok_times;
        std::map<std::string, std::pair<std::size_t, std::size_t>> per_user;  // attempts, successes
        std::map<int, std::vector<double>> per_trial;
        for (const SessionRecord* r : by_scheme[scheme]) {
            ++g.attempts;
            auto& u = per_user[r->user];
            ++u.first;
            if (r->success) {
                ++g.successes;
                ++u.second;
                ok_times.push_back(r->duration_s);
                per_trial[r->trial].push_back(r->duration_s);
            }
        }
        if (ok_times.size() >= 2) {
            g.login_time = stats::summarize(ok_times);
        }
        if (per_user.size() >= 2) {
            std::vector<double> pct;
            for (const auto& [user, counts] : per_user) {
                pct.push_back(100.0 * static_cast<double>(counts.second) / static_cast<double>(counts.first));
            }
            g.user_success_pct = stats::summarize(pct);
        }
        std::vector<std::vector<double>> trial_groups;
        for (auto& [trial, v] : per_trial) {
            if (v.size() >= 2) {
                trial_groups.push_back(std::move(v));
            }
        }
        if (trial_groups.size() >= 2) {
            g.trial_anova = stats::anova_f_one_tailed(trial_groups);
        }
        times.push_back(std::move(ok_times));
        report.groups.push_back(std::move(g));
    }
    if (times.size() >= 2 && times[0].size() >= 2 && times[1].size() >= 2) {
        report.between_groups = stats::t_test_two_tailed(times[0], times[1]);
    }
    return report;
}

void write_report(std::ostream& out, const StudyReport& report) {
    const auto flags = out.flags();
    out << std::fixed;
    out << "Group\tAvg.\tt-test\tS.d.\tMax\tMin\n";
    for (std::size_t i = 0; i < report.groups.size(); ++i) {
        const auto& g = report.groups[i];
        out << g.scheme << '\t';
        if (!g.login_time) {
            out << "-\t-\t-\t-\t-\n";
            continue;
        }
        std::string ttest;
        if (i == 0 && report.between_groups) {
            std::ostringstream t;
            t << std::fixed << std::setprecision(2) << "t=" << report.between_groups->statistic
              << std::setprecision(4) << ",p=" << report.between_groups->p_value;
            ttest = t.str();
        }
        out << std::setprecision(2) << g.login_time->avg << '\t' << ttest << '\t' << g.login_time->sd << '\t'
            << g.login_time->max << '\t' << g.login_time->min << '\n';
    }
    out << '\n' << "Group\tAttempts\tSuccesses\tUserSuccess%\tUserSuccessSd\tTrialF\tTrialP\n";
    for (const auto& g : report.groups) {
        out << g.scheme << '\t' << g.attempts << '\t' << g.successes << '\t';
        if (g.user_success_pct) {
            out << std::setprecision(1) << g.user_success_pct->avg << '\t' << std::setprecision(2)
                << g.user_success_pct->sd << '\t';
        } else {
            out << "-\t-\t";
        }
        if (g.trial_anova) {
            out << std::setprecision(2) << g.trial_anova->statistic << '\t' << std::setprecision(4)
                << g.trial_anova->p_value << '\n';
        } else {
            out << "-\t-\n";
        }
    }
    out.flags(flags);
}

std::vector<SessionRecord> synthesize_sessions(const std::vector<SyntheticGroup>& groups, Seed seed) {
    Rng rng(seed);
    // Box-Muller on the portable uniform source.
    auto normal = [&](double mean, double sd) {
        const double u1 = 1.0 - uniform_unit(rng);
        const double u2 = uniform_unit(rng);
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };
    std::vector<SessionRecord> out;
    std::int64_t clock_ms = 1'700'000'000'000;
    for (const auto& g : groups) {
        for (int u = 0; u < g.users; ++u) {
            for (int t = 1; t <= g.trials; ++t) {
                const double frac = g.trials > 1 ? static_cast<double>(t - 1) / (g.trials - 1) : 0.0;
                const double mean = g.first_trial_mean + (g.last_trial_mean - g.first_trial_mean) * frac;
                SessionRecord r;
                r.timestamp_ms = clock_ms;
                r.user = g.scheme + "-u" + std::to_string(u + 1);
                r.scheme = g.scheme;
                r.trial = t;
                r.success = uniform_unit(rng) < g.success_probability;
                r.duration_s = std::max(0.5, normal(mean, g.sd));
                clock_ms += 60'000;
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

}  // namespace cds::study
