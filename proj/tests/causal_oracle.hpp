#pragma once

// Test-only brute-force enumerators for the causal quantities. These walk the
// complete joint (every treatment, observation, and full combination of all
// potential outcomes with product probabilities) instead of the library's
// factored per-arm sums, so they form an independent route to the same
// values. Kept deliberately naive; only used on tiny joints.

#include <vector>

#include "suft/causal.hpp"
#include "suft/loss.hpp"

namespace suft::test_oracle {

struct OutcomeCombo {
  std::vector<double> values;  // one outcome per treatment, index t-1
  double prob = 1.0;
};

inline void enumerate_combos(const FiniteJoint& joint, int x, int t,
                             OutcomeCombo combo,
                             std::vector<OutcomeCombo>& out) {
  if (t > joint.n_treatments()) {
    out.push_back(combo);
    return;
  }
  for (const OutcomeAtom& a : joint.outcomes(x, t)) {
    OutcomeCombo next = combo;
    next.values.push_back(a.value);
    next.prob *= a.prob;
    enumerate_combos(joint, x, t + 1, std::move(next), out);
  }
}

inline std::vector<OutcomeCombo> all_outcome_combos(const FiniteJoint& joint,
                                                    int x) {
  std::vector<OutcomeCombo> out;
  enumerate_combos(joint, x, 1, OutcomeCombo{}, out);
  return out;
}

inline double oracle_factual(const FiniteJoint& joint,
                             const HypothesisTable& phi, Loss loss) {
  double acc = 0.0;
  for (int t = 1; t <= joint.n_treatments(); ++t) {
    for (int x = 0; x < joint.n_obs(); ++x) {
      for (const OutcomeCombo& c : all_outcome_combos(joint, x)) {
        acc += joint.q(t) * joint.px(x, t) * c.prob *
               loss_eval(loss, c.values[t - 1], phi.phi(x, t));
      }
    }
  }
  return acc;
}

inline double oracle_counterfactual(const FiniteJoint& joint,
                                    const HypothesisTable& phi, Loss loss) {
  const double inv_n = 1.0 / joint.n_controls();
  double acc = 0.0;
  for (int j = 2; j <= joint.n_treatments(); ++j) {
    for (int x = 0; x < joint.n_obs(); ++x) {
      for (const OutcomeCombo& c : all_outcome_combos(joint, x)) {
        acc += joint.q(j) * joint.px(x, j) * c.prob *
               loss_eval(loss, c.values[0], phi.phi(x, 1));
        acc += inv_n * joint.q(1) * joint.px(x, 1) * c.prob *
               loss_eval(loss, c.values[j - 1], phi.phi(x, j));
      }
    }
  }
  return acc;
}

inline double oracle_psi(const FiniteJoint& joint, const HypothesisTable& phi,
                         Loss loss) {
  const double inv_n = 1.0 / joint.n_controls();
  double acc = 0.0;
  for (int j = 2; j <= joint.n_treatments(); ++j) {
    for (int x = 0; x < joint.n_obs(); ++x) {
      acc += joint.q(j) * joint.px(x, j) *
             loss_eval(loss, phi.phi(x, j), phi.phi(x, 1));
      acc += inv_n * joint.q(1) * joint.px(x, 1) *
             loss_eval(loss, phi.phi(x, 1), phi.phi(x, j));
    }
  }
  return acc;
}

inline double oracle_delta(const FiniteJoint& joint, Loss loss) {
  const double inv_n = 1.0 / joint.n_controls();
  double acc = 0.0;
  for (int j = 2; j <= joint.n_treatments(); ++j) {
    for (int x = 0; x < joint.n_obs(); ++x) {
      for (const OutcomeCombo& c : all_outcome_combos(joint, x)) {
        acc += joint.q(j) * joint.px(x, j) * c.prob *
               loss_eval(loss, c.values[j - 1], c.values[0]);
        acc += inv_n * joint.q(1) * joint.px(x, 1) * c.prob *
               loss_eval(loss, c.values[0], c.values[j - 1]);
      }
    }
  }
  return acc;
}

}  // namespace suft::test_oracle
