#pragma once

#include <stdexcept>
#include <vector>

namespace suft {

// Thrown when a statistic is undefined for the given inputs (degenerate
// samples, no valid environments, ...).
struct undefined_result : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Two-sided Student-t tail probability for a statistic t with df degrees of
// freedom: P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

// Welch's two-sided t-test from summary statistics (sample variances, n-1
// denominator). Requires n >= 2 per sample and a nonzero variance somewhere.
double welch_t_test_summary(double mean_a, double var_a, size_t n_a,
                            double mean_b, double var_b, size_t n_b);

// Welch's two-sided t-test on raw samples.
double welch_t_test(const std::vector<double>& a,
                    const std::vector<double>& b);

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // n-1 denominator

}  // namespace suft
