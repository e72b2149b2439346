#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pjinv/error.hpp"
#include "pjinv/finite_difference.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/matrixset.hpp"
#include "pjinv/random.hpp"

namespace pjinv {

/// A continuous mapping R^n -> R^n that can be evaluated pointwise.
struct MappingSpec {
  std::function<Vector(const Vector&)> evaluate;
  Eigen::Index dim = 0;
  std::function<Matrix(const Vector&)> analytic_jacobian;  // empty when unavailable
  std::string label;

  Vector operator()(const Vector& x) const {
    if (x.size() != dim)
      fail(ErrorKind::invalid_input, label + ": point has dimension " + std::to_string(x.size()) + ", expected " +
                                         std::to_string(dim));
    Vector y = evaluate(x);
    if (y.size() != dim) fail(ErrorKind::evaluation, label + ": mapping returned wrong dimension");
    if (!y.allFinite()) fail(ErrorKind::evaluation, label + ": non-finite value at " + format_point(x));
    return y;
  }

  bool has_jacobian() const { return static_cast<bool>(analytic_jacobian); }
};

enum class PseudoJacobianKind { analytic_singleton, finite_set, sampled };

inline std::string_view to_string(PseudoJacobianKind k) {
  switch (k) {
    case PseudoJacobianKind::analytic_singleton: return "analytic-singleton";
    case PseudoJacobianKind::finite_set: return "finite-set";
    case PseudoJacobianKind::sampled: return "sampled";
  }
  return "unknown";
}

/// Set-valued rule x -> Jf(x). `usc_declared` is metadata: upper
/// semicontinuity is asserted by whoever builds the map, never checked.
/// `locus_probe(x, beta)` may return points of x + beta*B on the set where
/// the rule is multivalued, so ball samples do not miss it.
struct PseudoJacobianMap {
  std::function<MatrixPolytope(const Vector&)> rule;
  PseudoJacobianKind kind = PseudoJacobianKind::finite_set;
  bool usc_declared = false;
  Eigen::Index dim = 0;
  std::string label;
  std::function<std::vector<Vector>(const Vector&, double)> locus_probe;
};

inline MatrixPolytope eval_at(const PseudoJacobianMap& jac, const Vector& x) {
  if (x.size() != jac.dim)
    fail(ErrorKind::invalid_input, "eval_at: point dimension " + std::to_string(x.size()) + " != " +
                                       std::to_string(jac.dim));
  if (!x.allFinite()) fail(ErrorKind::invalid_input, "eval_at: non-finite point");
  MatrixPolytope p = jac.rule(x);
  if (p.dim() != jac.dim) fail(ErrorKind::evaluation, "eval_at: rule returned a polytope of wrong dimension");
  return p;
}

struct BallBudget {
  int points = 128;
  bool axis_points = true;
  std::uint64_t seed = 0;
};

/// Points of x + beta*B used to approximate co(Jf(x + beta*B)).
struct BallSample {
  Vector center;
  double radius = 0.0;
  std::vector<Vector> points;
};

/// Deterministic sample: x, locus probes, the 2n axis points, then seeded
/// uniform points. Passing `inner` (a sample at the same center with a
/// smaller radius) prepends its points, which nests the samples.
inline BallSample ball_sample(const PseudoJacobianMap& jac, const Vector& x, double beta, const BallBudget& budget,
                              const BallSample* inner = nullptr) {
  if (!(beta > 0.0)) fail(ErrorKind::domain, "eval_ball: radius must be positive");
  if (x.size() != jac.dim) fail(ErrorKind::invalid_input, "eval_ball: point dimension mismatch");
  BallSample s;
  s.center = x;
  s.radius = beta;
  if (inner) {
    if (inner->radius > beta || inner->center != x)
      fail(ErrorKind::invalid_input, "eval_ball: inner sample must share the center and have a smaller radius");
    s.points = inner->points;
  } else {
    s.points.push_back(x);
  }
  if (jac.locus_probe)
    for (auto& p : jac.locus_probe(x, beta))
      if ((p - x).norm() <= beta) s.points.push_back(std::move(p));
  const Eigen::Index n = x.size();
  if (budget.axis_points) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (double sgn : {1.0, -1.0}) {
        Vector p = x;
        p(i) += sgn * beta * (1.0 - 1e-12);
        s.points.push_back(p);
      }
  }
  const std::size_t inherited = inner ? inner->points.size() : 0;
  const std::size_t own = s.points.size() - inherited;
  const std::size_t target = static_cast<std::size_t>(std::max(budget.points, 1));
  const std::size_t extra = target > own ? target - own : 0;
  Rng rng(derive_seed(budget.seed, "ball", hash_vector(x) ^ std::hash<double>{}(beta)));
  for (std::size_t k = 0; k < extra; ++k) s.points.push_back(x + beta * (1.0 - 1e-12) * rng.ball_point(n));
  return s;
}

inline MatrixPolytope eval_on(const PseudoJacobianMap& jac, const BallSample& sample) {
  MatrixPolytope out;
  for (const auto& p : sample.points) out.merge(eval_at(jac, p));
  return out;
}

/// Union-hull under-approximation of co(Jf(x + beta*B)); its co-norm
/// therefore over-estimates the ball index.
inline MatrixPolytope eval_ball(const PseudoJacobianMap& jac, const Vector& x, double beta,
                                const BallBudget& budget = {}) {
  return eval_on(jac, ball_sample(jac, x, beta, budget));
}

inline PseudoJacobianMap analytic_pseudo_jacobian(const MappingSpec& f) {
  if (!f.has_jacobian()) fail(ErrorKind::invalid_input, f.label + ": no analytic Jacobian available");
  PseudoJacobianMap jac;
  jac.kind = PseudoJacobianKind::analytic_singleton;
  jac.usc_declared = true;
  jac.dim = f.dim;
  jac.label = f.label + ":analytic";
  auto d = f.analytic_jacobian;
  jac.rule = [d](const Vector& x) { return MatrixPolytope::singleton(d(x)); };
  return jac;
}

inline PseudoJacobianMap finite_set_pseudo_jacobian(Eigen::Index dim, std::function<MatrixPolytope(const Vector&)> rule,
                                                    std::string label, bool usc_declared,
                                                    std::function<std::vector<Vector>(const Vector&, double)> probe = {}) {
  PseudoJacobianMap jac;
  jac.kind = PseudoJacobianKind::finite_set;
  jac.usc_declared = usc_declared;
  jac.dim = dim;
  jac.label = std::move(label);
  jac.rule = std::move(rule);
  jac.locus_probe = std::move(probe);
  return jac;
}

inline PseudoJacobianMap constant_pseudo_jacobian(MatrixPolytope set, std::string label) {
  const Eigen::Index dim = set.dim();
  return finite_set_pseudo_jacobian(
      dim, [set = std::move(set)](const Vector&) { return set; }, std::move(label), true);
}

struct SampledConfig {
  int perturbations = 32;
  double radius = 1e-4;
  double step = 1e-6;
  DifferenceScheme scheme = DifferenceScheme::forward;
  std::uint64_t seed = 0;
};

/// Gradient-sampling style candidate: finite-difference Jacobians at x and
/// at seeded perturbations of x. Only a candidate; run it through
/// falsify_pseudo_jacobian before trusting it.
inline PseudoJacobianMap sampled_pseudo_jacobian(const MappingSpec& f, const SampledConfig& cfg = {}) {
  PseudoJacobianMap jac;
  jac.kind = PseudoJacobianKind::sampled;
  jac.usc_declared = false;
  jac.dim = f.dim;
  jac.label = f.label + ":sampled";
  jac.rule = [f, cfg](const Vector& x) {
    Rng rng(derive_seed(cfg.seed, "sampled-pj", hash_vector(x)));
    std::vector<Matrix> verts;
    verts.push_back(fd_jacobian(f, x, cfg.step, cfg.scheme));
    for (int k = 0; k < cfg.perturbations; ++k) {
      const Vector p = x + cfg.radius * rng.ball_point(x.size());
      verts.push_back(fd_jacobian(f, p, cfg.step, cfg.scheme));
    }
    return MatrixPolytope(std::move(verts));
  };
  return jac;
}

struct FalsifyConfig {
  int pairs = 256;
  double t_max = 1e-2;
  double t_min = 1e-8;
  int steps = 7;
  int tail = 3;  // smallest steps that form the limsup estimate
  double tol = 1e-4;
  std::uint64_t seed = 0;
};

struct FalsifyWitness {
  Vector u;
  Vector v;
  double gap = 0.0;
  double dini_estimate = 0.0;
  double support = 0.0;
};

struct FalsifyVerdict {
  bool falsified = false;
  std::optional<FalsifyWitness> witness;
  double max_gap = -std::numeric_limits<double>::infinity();
  int pairs_tested = 0;
  std::vector<double> steps;
};

/// Samples (u, v) pairs and compares a one-sided estimate of the upper Dini
/// derivative (v.f)^+(x; u) against sup_{M in Jf(x)} <v, M u>. Half of the
/// pairs take v independent of u; the other half align v with the observed
/// difference quotient. A `false` verdict proves nothing.
inline FalsifyVerdict falsify_pseudo_jacobian(const PseudoJacobianMap& jac, const MappingSpec& f, const Vector& x,
                                              const FalsifyConfig& cfg = {}) {
  if (jac.dim != f.dim || x.size() != f.dim)
    fail(ErrorKind::invalid_input, "falsify_pseudo_jacobian: dimensions disagree");
  const MatrixPolytope set = eval_at(jac, x);
  FalsifyVerdict out;
  const int nsteps = std::max(cfg.steps, 2);
  for (int k = 0; k < nsteps; ++k)
    out.steps.push_back(cfg.t_max * std::pow(cfg.t_min / cfg.t_max, static_cast<double>(k) / (nsteps - 1)));
  const int tail = std::clamp(cfg.tail, 1, nsteps);

  const Vector fx = f(x);
  Rng rng(derive_seed(cfg.seed, "falsify", hash_vector(x)));
  const Eigen::Index n = x.size();
  for (int p = 0; p < cfg.pairs; ++p) {
    const Vector u = rng.unit_vector(n);
    std::vector<Vector> quotients;
    for (int k = nsteps - tail; k < nsteps; ++k) quotients.push_back((f(x + out.steps[static_cast<std::size_t>(k)] * u) - fx) / out.steps[static_cast<std::size_t>(k)]);
    Vector v;
    if (p % 2 == 0) {
      v = rng.unit_vector(n);
    } else {
      const Vector& q = quotients.back();
      v = q.norm() > 0.0 ? Vector(q.normalized()) : rng.unit_vector(n);
    }
    double est = -std::numeric_limits<double>::infinity();
    for (const auto& q : quotients) est = std::max(est, v.dot(q));
    const double sup = set.support(v, u, cfg.tol * 1e-3);
    const double gap = est - sup;
    ++out.pairs_tested;
    if (gap > out.max_gap) {
      out.max_gap = gap;
      out.witness = FalsifyWitness{u, v, gap, est, sup};
    }
  }
  out.falsified = out.max_gap > cfg.tol;
  if (!out.falsified) out.witness.reset();
  return out;
}

}  // namespace pjinv
