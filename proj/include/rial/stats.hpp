#pragma once

#include <span>
#include <string>

namespace rial {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// CDF of Student's t distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

struct PairedTTest {
    double mean_diff = 0.0;
    double t = 0.0;  // +-inf when the differences have zero variance and nonzero mean
    double df = 0.0;
    double p_two_sided = 1.0;

    // P-value of the one-sided alternative mean(a - b) > 0.
    double p_greater() const;
    // P-value of the one-sided alternative mean(a - b) < 0.
    double p_less() const;
};

// Paired t statistic on d = a - b. Requires equal lengths >= 2.
PairedTTest paired_t_stats(std::span<const double> a, std::span<const double> b);

enum class Outcome { win, tie, loss };

std::string to_string(Outcome o);

// Two-sided paired t-test of a against b. Zero-variance differences are a tie
// when the mean difference is zero and a win/loss by its sign otherwise.
Outcome paired_t_test(std::span<const double> a, std::span<const double> b, double significance = 0.05);

}  // namespace rial
