#include "suft/stats.hpp"

#include <cmath>

namespace suft {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta, modified Lentz algorithm.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kTol = 1e-15;
  constexpr int kMaxIter = 200000;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double result = d;

  for (int n = 1; n < kMaxIter; ++n) {
    const double m = n;
    double numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    d = 1.0 + numerator * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    result *= d * c;

    numerator = -(a + m) * (a + b + m) * x /
                ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    d = 1.0 + numerator * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double mult = d * c;
    result *= mult;
    if (std::fabs(mult - 1.0) < kTol) break;
  }
  return result;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("regularized_incomplete_beta domain error");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) in the fast-converging half.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be > 0");
  const double x = df / (t * t + df);
  return regularized_incomplete_beta(x, df / 2.0, 0.5);
}

double welch_t_test_summary(double mean_a, double var_a, size_t n_a,
                            double mean_b, double var_b, size_t n_b) {
  if (n_a < 2 || n_b < 2) {
    throw undefined_result("each sample needs at least two values");
  }
  if (!(var_a > 0.0) && !(var_b > 0.0)) {
    throw undefined_result("both samples are degenerate (zero variance)");
  }
  const double se_a = var_a / static_cast<double>(n_a);
  const double se_b = var_b / static_cast<double>(n_b);
  const double t = (mean_a - mean_b) / std::sqrt(se_a + se_b);
  const double df =
      (se_a + se_b) * (se_a + se_b) /
      (se_a * se_a / (n_a - 1) + se_b * se_b / (n_b - 1));
  if (t == 0.0) return 1.0;
  return student_t_two_sided_p(t, df);
}

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("variance needs n >= 2");
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double welch_t_test(const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw undefined_result("each sample needs at least two values");
  }
  return welch_t_test_summary(sample_mean(a), sample_variance(a), a.size(),
                              sample_mean(b), sample_variance(b), b.size());
}

}  // namespace suft
