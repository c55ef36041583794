#include <cmath>
#include <vector>

#include "doctest.h"
#include "suft/rng.hpp"
#include "suft/stats.hpp"

using namespace suft;

TEST_CASE("regularized incomplete beta reference values") {
  // I_x(1,1) = x; I_x(2,2) = x^2 (3 - 2x).
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.83, 1.0}) {
    CHECK(regularized_incomplete_beta(x, 1.0, 1.0) == doctest::Approx(x).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(x, 2.0, 2.0) ==
          doctest::Approx(x * x * (3.0 - 2.0 * x)).epsilon(1e-12));
  }
  // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    const double a = rng.uniform(0.2, 8.0);
    const double b = rng.uniform(0.2, 8.0);
    CHECK(regularized_incomplete_beta(x, a, b) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(1.0 - x, b, a))
              .epsilon(1e-10));
  }
  CHECK_THROWS_AS(regularized_incomplete_beta(-0.1, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("student t two-sided tail") {
  // df=1 is a Cauchy: P(|T| >= 1) = 0.5.
  CHECK(student_t_two_sided_p(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  // t = 0 is certain.
  CHECK(student_t_two_sided_p(0.0, 7.0) == doctest::Approx(1.0));
  // Large-df limit approaches the normal tail: P(|Z| >= 1.96) ~ 0.05.
  CHECK(student_t_two_sided_p(1.959964, 1e7) == doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("welch t-test") {
  // Identical non-degenerate samples: p = 1.
  const std::vector<double> s{1.0, 2.0, 3.0};
  CHECK(welch_t_test(s, s) == doctest::Approx(1.0));

  // Near-complete separation drives p toward zero.
  std::vector<double> zeros(5, 0.0), ones(5, 1.0);
  zeros[0] += 1e-9;
  ones[0] -= 1e-9;
  CHECK(welch_t_test(zeros, ones) < 1e-6);

  // Textbook summary case: n=10 each, means 10/12, sds 1/1.
  // t = -4.4721, Welch-Satterthwaite df = 18, frozen from an independent
  // statistical oracle.
  CHECK(welch_t_test_summary(10.0, 1.0, 10, 12.0, 1.0, 10) ==
        doctest::Approx(2.9456415537e-4).epsilon(1e-6));

  // Degenerate inputs.
  CHECK_THROWS_AS(welch_t_test({1.0}, {1.0, 2.0}), undefined_result);
  CHECK_THROWS_AS(welch_t_test({1.0, 1.0}, {2.0, 2.0}), undefined_result);
}

TEST_CASE("welch p-values stay in range on random samples") {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(3 + rng.uniform_int(10)), b(3 + rng.uniform_int(10));
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal() + rng.uniform(-0.5, 0.5);
    const double p = welch_t_test(a, b);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}
