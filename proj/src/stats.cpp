#include "cds/stats.hpp"

#include "cds/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cds::stats {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return ss;
}

void require_samples(std::span<const double> v, const char* what) {
    if (v.size() < 2) {
        throw Error(Errc::TooFewSamples, std::string(what) + " needs at least 2 values, got " +
                                             std::to_string(v.size()));
    }
}

}  // namespace

Summary summarize(std::span<const double> values) {
    require_samples(values, "summary");
    Summary s;
    s.count = values.size();
    s.avg = mean_of(values);
    s.sd = std::sqrt(sum_sq_dev(values, s.avg) / static_cast<double>(values.size() - 1));
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

double student_t_two_tailed_p(double t, double df) {
    if (std::isinf(t)) {
        return 0.0;
    }
    // P(|T| >= |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2)
    return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

double f_upper_p(double f, double d1, double d2) {
    if (std::isinf(f)) {
        return 0.0;
    }
    if (f <= 0.0) {
        return 1.0;
    }
    // P(F >= f) = I_{d2 / (d2 + d1 f)}(d2 / 2, d1 / 2)
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

TestResult t_test_two_tailed(std::span<const double> a, std::span<const double> b) {
    require_samples(a, "t-test sample a");
    require_samples(b, "t-test sample b");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    const double df = na + nb - 2.0;
    const double pooled = (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / df;
    const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));

    if (se == 0.0) {
        if (ma == mb) {
            return {0.0, 1.0};
        }
        return {ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), 0.0};
    }
    const double t = (ma - mb) / se;
    return {t, student_t_two_tailed_p(t, df)};
}

TestResult anova_f_one_tailed(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) {
        throw Error(Errc::TooFewSamples, "ANOVA needs at least 2 groups");
    }
    std::size_t total = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        require_samples(g, "ANOVA group");
        total += g.size();
        grand_sum += std::accumulate(g.begin(), g.end(), 0.0);
    }
    const double grand_mean = grand_sum / static_cast<double>(total);

    double ss_between = 0.0;
    double ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
        ss_within += sum_sq_dev(g, m);
    }
    const double d1 = static_cast<double>(groups.size() - 1);
    const double d2 = static_cast<double>(total - groups.size());
    const double ms_between = ss_between / d1;
    const double ms_within = ss_within / d2;

    if (ms_within == 0.0) {
        bool equal_means = true;
        const double first = mean_of(groups.front());
        for (const auto& g : groups) {
            equal_means = equal_means && mean_of(g) == first;
        }
        if (equal_means) {
            return {0.0, 1.0};
        }
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    const double f = ms_between / ms_within;
    return {f, f_upper_p(f, d1, d2)};
}

}  // namespace cds::stats
