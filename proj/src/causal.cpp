#include "suft/causal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace suft {

namespace {

constexpr double kProbTol = 1e-12;

void require_prob_sum(const char* what, double sum) {
  if (std::fabs(sum - 1.0) > kProbTol) {
    throw std::invalid_argument(std::string(what) +
                                " must sum to 1, got " + std::to_string(sum));
  }
}

double mean_loss_between_hypotheses(const FiniteJoint& joint, int x_dist_t,
                                    const HypothesisTable& phi, int t_first,
                                    int t_second, Loss loss) {
  double acc = 0.0;
  for (int x = 0; x < joint.n_obs(); ++x) {
    acc += joint.px(x, x_dist_t) *
           loss_eval(loss, phi.phi(x, t_first), phi.phi(x, t_second));
  }
  return acc;
}

// E_{x ~ P^{x_dist_t}} E_{y ~ Y_{y_outer}} E_{y' ~ Y_{y_inner}} [L(y, y')]
double mean_loss_between_outcomes(const FiniteJoint& joint, int x_dist_t,
                                  int y_outer, int y_inner, Loss loss) {
  double acc = 0.0;
  for (int x = 0; x < joint.n_obs(); ++x) {
    double cell = 0.0;
    for (const OutcomeAtom& a : joint.outcomes(x, y_outer)) {
      for (const OutcomeAtom& b : joint.outcomes(x, y_inner)) {
        cell += a.prob * b.prob * loss_eval(loss, a.value, b.value);
      }
    }
    acc += joint.px(x, x_dist_t) * cell;
  }
  return acc;
}

void require_same_domain(const FiniteJoint& joint, const HypothesisTable& phi) {
  if (static_cast<int>(phi.values.size()) != joint.n_obs()) {
    throw std::invalid_argument(
        "hypothesis table observation count does not match the joint");
  }
  for (const auto& row : phi.values) {
    if (static_cast<int>(row.size()) != joint.n_treatments()) {
      throw std::invalid_argument(
          "hypothesis table treatment count does not match the joint");
    }
  }
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

double sample_outcome(const std::vector<OutcomeAtom>& atoms, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const OutcomeAtom& a : atoms) {
    acc += a.prob;
    if (u < acc) return a.value;
  }
  return atoms.back().value;
}

struct RunningMean {
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  double mean(uint64_t n) const { return sum / static_cast<double>(n); }
  double stderr_of_mean(uint64_t n) const {
    if (n < 2) return 0.0;
    const double m = mean(n);
    double var = (sum_sq - static_cast<double>(n) * m * m) /
                 static_cast<double>(n - 1);
    var = std::max(var, 0.0);
    return std::sqrt(var / static_cast<double>(n));
  }
};

BoundReport finish_report(double factual, double counterfactual, double psi,
                          double delta) {
  BoundReport r;
  r.factual = factual;
  r.counterfactual = counterfactual;
  r.psi = psi;
  r.delta = delta;
  r.slack = counterfactual + psi + delta - factual;
  r.holds = r.slack >= -1e-9 * std::max(1.0, factual);
  return r;
}

}  // namespace

FiniteJoint::FiniteJoint(
    int n_obs, std::vector<double> q,
    std::vector<std::vector<double>> px_given_t,
    std::vector<std::vector<std::vector<OutcomeAtom>>> py_given_x_t)
    : n_obs_(n_obs),
      q_(std::move(q)),
      px_given_t_(std::move(px_given_t)),
      py_given_x_t_(std::move(py_given_x_t)) {
  if (n_obs_ < 1) throw std::invalid_argument("joint needs at least one observation");
  if (q_.size() < 2) throw std::invalid_argument("joint needs a target and at least one control treatment");

  double q_sum = 0.0;
  for (double qt : q_) {
    if (!(qt > 0.0)) {
      throw std::invalid_argument("every treatment probability must be > 0");
    }
    q_sum += qt;
  }
  require_prob_sum("treatment probabilities", q_sum);

  if (px_given_t_.size() != q_.size()) {
    throw std::invalid_argument("px_given_t must have one row per treatment");
  }
  for (const auto& row : px_given_t_) {
    if (static_cast<int>(row.size()) != n_obs_) {
      throw std::invalid_argument("px_given_t row has wrong observation count");
    }
    double s = 0.0;
    for (double p : row) {
      if (p < 0.0) throw std::invalid_argument("negative observation probability");
      s += p;
    }
    require_prob_sum("observation probabilities", s);
  }

  if (static_cast<int>(py_given_x_t_.size()) != n_obs_) {
    throw std::invalid_argument("py_given_x_t must have one row per observation");
  }
  for (const auto& per_x : py_given_x_t_) {
    if (per_x.size() != q_.size()) {
      throw std::invalid_argument(
          "every observation needs an outcome distribution for every treatment");
    }
    for (const auto& atoms : per_x) {
      if (atoms.empty()) {
        throw std::invalid_argument("empty outcome distribution");
      }
      double s = 0.0;
      for (const OutcomeAtom& a : atoms) {
        if (a.prob < 0.0) throw std::invalid_argument("negative outcome probability");
        if (!std::isfinite(a.value)) throw std::invalid_argument("non-finite outcome value");
        s += a.prob;
      }
      require_prob_sum("outcome probabilities", s);
    }
  }
}

void FiniteJoint::require_x(int x) const {
  if (x < 0 || x >= n_obs_) {
    throw std::domain_error("unknown observation index " + std::to_string(x));
  }
}

void FiniteJoint::require_t(int t) const {
  if (t < 1 || t > n_treatments()) {
    throw std::domain_error("unknown treatment " + std::to_string(t));
  }
}

double FiniteJoint::q(int t) const {
  require_t(t);
  return q_[t - 1];
}

double FiniteJoint::px(int x, int t) const {
  require_x(x);
  require_t(t);
  return px_given_t_[t - 1][x];
}

const std::vector<OutcomeAtom>& FiniteJoint::outcomes(int x, int t) const {
  require_x(x);
  require_t(t);
  return py_given_x_t_[x][t - 1];
}

double expected_outcome_loss(const FiniteJoint& joint,
                             const HypothesisTable& phi, int x, int t,
                             Loss loss) {
  joint.require_x(x);
  joint.require_t(t);
  require_same_domain(joint, phi);
  const double prediction = phi.phi(x, t);
  double acc = 0.0;
  for (const OutcomeAtom& a : joint.outcomes(x, t)) {
    acc += a.prob * loss_eval(loss, a.value, prediction);
  }
  return acc;
}

double factual_loss(const FiniteJoint& joint, const HypothesisTable& phi,
                    Loss loss) {
  require_same_domain(joint, phi);
  double acc = 0.0;
  for (int t = 1; t <= joint.n_treatments(); ++t) {
    double arm = 0.0;
    for (int x = 0; x < joint.n_obs(); ++x) {
      arm += joint.px(x, t) * expected_outcome_loss(joint, phi, x, t, loss);
    }
    acc += joint.q(t) * arm;
  }
  return acc;
}

double counterfactual_loss(const FiniteJoint& joint,
                           const HypothesisTable& phi, Loss loss) {
  require_same_domain(joint, phi);
  const double inv_n = 1.0 / joint.n_controls();
  double acc = 0.0;
  for (int j = 2; j <= joint.n_treatments(); ++j) {
    double target_under_control = 0.0;  // e^{1,j}_CF
    double control_under_target = 0.0;  // e^j_CF
    for (int x = 0; x < joint.n_obs(); ++x) {
      target_under_control +=
          joint.px(x, j) * expected_outcome_loss(joint, phi, x, 1, loss);
      control_under_target +=
          joint.px(x, 1) * expected_outcome_loss(joint, phi, x, j, loss);
    }
    acc += joint.q(j) * target_under_control +
           inv_n * joint.q(1) * control_under_target;
  }
  return acc;
}

double treatment_effect_loss(const FiniteJoint& joint,
                             const HypothesisTable& phi, Loss loss) {
  require_same_domain(joint, phi);
  const double inv_n = 1.0 / joint.n_controls();
  double acc = 0.0;
  for (int j = 2; j <= joint.n_treatments(); ++j) {
    acc += joint.q(j) * mean_loss_between_hypotheses(joint, j, phi, j, 1, loss);
    acc += inv_n * joint.q(1) *
           mean_loss_between_hypotheses(joint, 1, phi, 1, j, loss);
  }
  return acc;
}

double delta_term(const FiniteJoint& joint, Loss loss) {
  const double inv_n = 1.0 / joint.n_controls();
  double acc = 0.0;
  for (int j = 2; j <= joint.n_treatments(); ++j) {
    acc += joint.q(j) * mean_loss_between_outcomes(joint, j, j, 1, loss);
    acc += inv_n * joint.q(1) * mean_loss_between_outcomes(joint, 1, 1, j, loss);
  }
  return acc;
}

BoundReport verify_bound(const FiniteJoint& joint, const HypothesisTable& phi,
                         Loss loss) {
  return finish_report(factual_loss(joint, phi, loss),
                       counterfactual_loss(joint, phi, loss),
                       treatment_effect_loss(joint, phi, loss),
                       delta_term(joint, loss));
}

std::vector<LossInequalityViolation> check_loss_inequality(
    Loss loss, const std::vector<LossQuadruple>& quadruples) {
  std::vector<LossInequalityViolation> out;
  for (const LossQuadruple& q : quadruples) {
    const double lhs = loss_eval(loss, q.x, q.y) - loss_eval(loss, q.xp, q.yp);
    const double rhs = loss_eval(loss, q.x, q.xp) + loss_eval(loss, q.y, q.yp);
    if (lhs > rhs + 1e-12) out.push_back({q, lhs, rhs});
  }
  return out;
}

McBoundEstimate mc_estimate_losses(const FiniteJoint& joint,
                                   const HypothesisTable& phi, Loss loss,
                                   uint64_t n_samples, uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  require_same_domain(joint, phi);

  std::vector<double> q_probs(joint.n_treatments());
  for (int t = 1; t <= joint.n_treatments(); ++t) q_probs[t - 1] = joint.q(t);
  std::vector<std::vector<double>> px_rows(joint.n_treatments());
  for (int t = 1; t <= joint.n_treatments(); ++t) {
    px_rows[t - 1].resize(joint.n_obs());
    for (int x = 0; x < joint.n_obs(); ++x) px_rows[t - 1][x] = joint.px(x, t);
  }

  Rng rng(seed);
  RunningMean f, cf, psi, delta;
  const int n_controls = joint.n_controls();

  for (uint64_t i = 0; i < n_samples; ++i) {
    const int t = sample_index(q_probs, rng) + 1;
    if (t == 1) {
      // Target arm: the paired control is uniform over the N controls,
      // matching the (1/N) q_1 weights of the combined terms.
      const int x = sample_index(px_rows[0], rng);
      const int j = 2 + static_cast<int>(rng.uniform_int(n_controls));
      const double y1 = sample_outcome(joint.outcomes(x, 1), rng);
      const double yj = sample_outcome(joint.outcomes(x, j), rng);
      f.add(loss_eval(loss, y1, phi.phi(x, 1)));
      cf.add(loss_eval(loss, yj, phi.phi(x, j)));
      psi.add(loss_eval(loss, phi.phi(x, 1), phi.phi(x, j)));
      delta.add(loss_eval(loss, y1, yj));
    } else {
      const int x = sample_index(px_rows[t - 1], rng);
      const double yj = sample_outcome(joint.outcomes(x, t), rng);
      const double y1 = sample_outcome(joint.outcomes(x, 1), rng);
      f.add(loss_eval(loss, yj, phi.phi(x, t)));
      cf.add(loss_eval(loss, y1, phi.phi(x, 1)));
      psi.add(loss_eval(loss, phi.phi(x, t), phi.phi(x, 1)));
      delta.add(loss_eval(loss, yj, y1));
    }
  }

  McBoundEstimate est;
  est.n_samples = n_samples;
  est.report = finish_report(f.mean(n_samples), cf.mean(n_samples),
                             psi.mean(n_samples), delta.mean(n_samples));
  est.se_factual = f.stderr_of_mean(n_samples);
  est.se_counterfactual = cf.stderr_of_mean(n_samples);
  est.se_psi = psi.stderr_of_mean(n_samples);
  est.se_delta = delta.stderr_of_mean(n_samples);
  return est;
}

namespace {

std::vector<double> dirichlet_uniform(Rng& rng, int n) {
  std::vector<double> out(n);
  double sum = 0.0;
  for (double& v : out) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    v = -std::log(u);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace

FiniteJoint random_joint(Rng& rng, int n_controls, int max_obs,
                         int max_outcomes) {
  if (n_controls < 1) throw std::invalid_argument("n_controls must be >= 1");
  const int n_obs = 1 + static_cast<int>(rng.uniform_int(max_obs));
  const int n_treat = n_controls + 1;

  std::vector<double> q = dirichlet_uniform(rng, n_treat);
  // Dirichlet draws are strictly positive; no arm can be empty.

  std::vector<std::vector<double>> px(n_treat);
  for (auto& row : px) row = dirichlet_uniform(rng, n_obs);

  std::vector<std::vector<std::vector<OutcomeAtom>>> py(n_obs);
  for (auto& per_x : py) {
    per_x.resize(n_treat);
    for (auto& atoms : per_x) {
      const int k = 1 + static_cast<int>(rng.uniform_int(max_outcomes));
      std::vector<double> probs = dirichlet_uniform(rng, k);
      atoms.resize(k);
      for (int i = 0; i < k; ++i) {
        atoms[i].value = rng.uniform(-5.0, 5.0);
        atoms[i].prob = probs[i];
      }
    }
  }
  return FiniteJoint(n_obs, std::move(q), std::move(px), std::move(py));
}

HypothesisTable random_hypothesis(Rng& rng, const FiniteJoint& joint) {
  HypothesisTable table;
  table.values.resize(joint.n_obs());
  for (auto& row : table.values) {
    row.resize(joint.n_treatments());
    for (double& v : row) v = rng.uniform(-5.0, 5.0);
  }
  return table;
}

}  // namespace suft
