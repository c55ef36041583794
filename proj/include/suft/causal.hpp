#pragma once

#include <cstdint>
#include <vector>

#include "suft/loss.hpp"
#include "suft/rng.hpp"

namespace suft {

// One point of a finite outcome distribution.
struct OutcomeAtom {
  double value = 0.0;
  double prob = 0.0;
};

// Exact finite-support joint distribution P(X, T, Y_1, ..., Y_{N+1}).
//
// Treatments are 1-based: t = 1 is the target treatment and t = 2..N+1 are
// the N control treatments (the binary case is N = 1). Observations are
// identified by index 0..n_obs-1. Potential outcomes exist for every (x, t)
// pair, so treatment assignment never restricts which outcome distributions
// are defined (strong ignorability is structural here).
class FiniteJoint {
 public:
  // q: treatment probabilities q_1..q_{N+1}, each > 0, summing to 1.
  // px_given_t: px_given_t[t-1][x] = P(X = x | T = t), each row sums to 1.
  // py_given_x_t: py_given_x_t[x][t-1] = finite distribution of Y_t given x.
  FiniteJoint(int n_obs, std::vector<double> q,
              std::vector<std::vector<double>> px_given_t,
              std::vector<std::vector<std::vector<OutcomeAtom>>> py_given_x_t);

  int n_obs() const { return n_obs_; }
  int n_controls() const { return static_cast<int>(q_.size()) - 1; }
  int n_treatments() const { return static_cast<int>(q_.size()); }

  double q(int t) const;                // t in 1..N+1
  double px(int x, int t) const;        // P(X = x | T = t)
  const std::vector<OutcomeAtom>& outcomes(int x, int t) const;

  void require_x(int x) const;
  void require_t(int t) const;

 private:
  int n_obs_;
  std::vector<double> q_;
  std::vector<std::vector<double>> px_given_t_;
  std::vector<std::vector<std::vector<OutcomeAtom>>> py_given_x_t_;
};

// Tabulated hypothesis values phi(x; theta_t), one per (x, t) cell.
struct HypothesisTable {
  // values[x][t-1]
  std::vector<std::vector<double>> values;

  double phi(int x, int t) const { return values.at(x).at(t - 1); }
};

// The four bound quantities and the resulting slack. holds is true when
// counterfactual + psi + delta - factual >= -1e-9 * max(1, factual).
struct BoundReport {
  double factual = 0.0;
  double counterfactual = 0.0;
  double psi = 0.0;
  double delta = 0.0;
  double slack = 0.0;
  bool holds = false;
};

// Expected loss of phi(x; t) against the outcome distribution of (x, t):
// sum_y P(y | x, t) * L(y, phi(x; t)).
double expected_outcome_loss(const FiniteJoint& joint,
                             const HypothesisTable& phi, int x, int t,
                             Loss loss);

// q_1 e^1_F + sum_{j=2}^{N+1} q_j e^j_F with e^t_F the P^t_X-average of the
// expected outcome loss under treatment t.
double factual_loss(const FiniteJoint& joint, const HypothesisTable& phi,
                    Loss loss);

// sum_{j=2}^{N+1} ( q_j e^{1,j}_CF + (1/N) q_1 e^j_CF ), where e^{1,j}_CF
// evaluates phi(.; 1) under P^j_X and e^j_CF evaluates phi(.; j) under P^1_X.
// For N = 1 this is the binary-case q_ctl e^1_CF + q_1 e^ctl_CF.
double counterfactual_loss(const FiniteJoint& joint,
                           const HypothesisTable& phi, Loss loss);

// sum_{j=2}^{N+1} ( q_j psi^{1,j} + (1/N) q_1 psi^j ) with
// psi^{1,j} = E_{x~P^j}[L(phi(x;j), phi(x;1))] and
// psi^j    = E_{x~P^1}[L(phi(x;1), phi(x;j))].
double treatment_effect_loss(const FiniteJoint& joint,
                             const HypothesisTable& phi, Loss loss);

// Hypothesis-free outcome-vs-outcome term:
// sum_{j=2}^{N+1} ( q_j d^{1,j} + (1/N) q_1 d^j ) with
// d^{1,j} = E_{x~P^j} E_{y_j} E_{y_1} [L(y_j, y_1)] and the mirrored d^j.
double delta_term(const FiniteJoint& joint, Loss loss);

// Computes all four quantities exactly and reports the slack. Violations are
// reported, never thrown; holds is only guaranteed for L1.
BoundReport verify_bound(const FiniteJoint& joint, const HypothesisTable& phi,
                         Loss loss);

struct LossQuadruple {
  double x = 0.0, y = 0.0, xp = 0.0, yp = 0.0;
};

struct LossInequalityViolation {
  LossQuadruple quad;
  double lhs = 0.0;  // L(x,y) - L(x',y')
  double rhs = 0.0;  // L(x,x') + L(y,y')
};

// Returns every quadruple with L(x,y) - L(x',y') > L(x,x') + L(y,y') + 1e-12.
// Empty for L1 on any input; L2 admits violations such as (0, 10, 5, 5).
std::vector<LossInequalityViolation> check_loss_inequality(
    Loss loss, const std::vector<LossQuadruple>& quadruples);

// Monte Carlo estimate of the four bound quantities, with standard errors.
struct McBoundEstimate {
  BoundReport report;
  double se_factual = 0.0;
  double se_counterfactual = 0.0;
  double se_psi = 0.0;
  double se_delta = 0.0;
  uint64_t n_samples = 0;
};

// Unbiased sample-mean estimates of factual, counterfactual, psi and delta,
// sharing one (t, x, j, y, y') draw per sample. Deterministic given the seed.
McBoundEstimate mc_estimate_losses(const FiniteJoint& joint,
                                   const HypothesisTable& phi, Loss loss,
                                   uint64_t n_samples, uint64_t seed);

// Random joint for sweeps: |X| uniform in [1, max_obs], 1..max_outcomes
// atoms per (x, t) cell, outcome values uniform in [-5, 5], probabilities
// from a symmetric Dirichlet with concentration 1.
FiniteJoint random_joint(Rng& rng, int n_controls, int max_obs = 5,
                         int max_outcomes = 4);

// Hypothesis values uniform in [-5, 5] over the joint's full (x, t) domain.
HypothesisTable random_hypothesis(Rng& rng, const FiniteJoint& joint);

}  // namespace suft
