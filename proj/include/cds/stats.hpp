#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cds::stats {

/// Login-time summary in the shape of a per-group results table.
struct Summary {
    double avg = 0.0;
    double sd = 0.0;  ///< sample standard deviation (n - 1 denominator)
    double max = 0.0;
    double min = 0.0;
    std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Student's two-sample t-test with pooled variance, two-tailed p on
/// n_a + n_b - 2 degrees of freedom. When both samples have zero variance:
/// equal means give t = 0, p = 1; different means give t = +-inf, p = 0.
TestResult t_test_two_tailed(std::span<const double> a, std::span<const double> b);

/// One-way ANOVA across groups, upper-tail p. Zero within-group variance
/// gives F = 0, p = 1 for equal means and F = inf, p = 0 otherwise.
TestResult anova_f_one_tailed(std::span<const std::vector<double>> groups);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed_p(double t, double df);

/// P(F >= f) for the F distribution with (d1, d2) degrees of freedom.
double f_upper_p(double f, double d1, double d2);

}  // namespace cds::stats
