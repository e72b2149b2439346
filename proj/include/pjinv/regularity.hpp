#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pjinv/error.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/matrixset.hpp"
#include "pjinv/parallel.hpp"
#include "pjinv/pseudojac.hpp"
#include "pjinv/random.hpp"

namespace pjinv {

struct RegularityBudget {
  ConormBudget conorm;
  BallBudget ball;
  int radii = 33;
  int sphere_points = 256;
  int threads = 1;
  std::uint64_t seed = 0;
};

inline nlohmann::json to_json(const RegularityBudget& b) {
  nlohmann::json j = {{"conorm", to_json(b.conorm)},
                      {"ball_points", b.ball.points},
                      {"ball_axis_points", b.ball.axis_points},
                      {"radii", b.radii},
                      {"sphere_points", b.sphere_points},
                      {"seed", b.seed}};
  return j;
}

/// Enclosure of alpha_Jf(x): co-norm infimum over co(Jf(x)).
inline Enclosure regularity_index(const PseudoJacobianMap& jac, const Vector& x, const ConormBudget& budget = {}) {
  return polytope_conorm(eval_at(jac, x), budget);
}

inline bool jf_regular(const Enclosure& e, double zero_tol = 1e-9) { return e.lower > zero_tol; }

/// Enclosure of the sampled alpha_Jf(x, beta). The sample under-approximates
/// the ball, so only the upper end bounds the true value from above.
inline Enclosure ball_index(const PseudoJacobianMap& jac, const Vector& x, double beta,
                            const RegularityBudget& budget = {}) {
  BallBudget bb = budget.ball;
  bb.seed = derive_seed(budget.seed, "ball-index", bb.seed);
  return polytope_conorm(eval_ball(jac, x, beta, bb), budget.conorm);
}

inline Enclosure ball_index_on(const PseudoJacobianMap& jac, const BallSample& sample,
                               const ConormBudget& budget = {}) {
  return polytope_conorm(eval_on(jac, sample), budget);
}

struct BetaLimitReport {
  Vector point;
  std::vector<double> betas;
  std::vector<Enclosure> ball;
  Enclosure index;
  double gap_at_smallest = 0.0;
  double monotonicity_defect = 0.0;  // largest rise of the upper end as beta grows
  bool passes = false;
};

/// Ball indices along a decreasing beta sequence with nested samples (each
/// larger-radius sample contains the smaller one), compared with alpha_Jf(x).
inline BetaLimitReport beta_limit_audit(const PseudoJacobianMap& jac, const Vector& x,
                                        std::vector<double> betas = {1.0, 1e-1, 1e-2, 1e-3, 1e-4},
                                        const RegularityBudget& budget = {}, double tol = 1e-3) {
  if (betas.empty()) fail(ErrorKind::invalid_input, "beta_limit_audit: empty radius sequence");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0)) fail(ErrorKind::domain, "beta_limit_audit: radii must be positive");
    if (i && !(betas[i] < betas[i - 1]))
      fail(ErrorKind::invalid_input, "beta_limit_audit: radii must be strictly decreasing");
  }
  BetaLimitReport out;
  out.point = x;
  out.betas = betas;
  out.index = regularity_index(jac, x, budget.conorm);
  out.ball.resize(betas.size());
  BallBudget bb = budget.ball;
  std::optional<BallSample> inner;
  for (std::size_t k = betas.size(); k-- > 0;) {
    bb.seed = derive_seed(budget.seed, "beta-limit", k);
    BallSample s = ball_sample(jac, x, betas[k], bb, inner ? &*inner : nullptr);
    out.ball[k] = ball_index_on(jac, s, budget.conorm);
    inner = std::move(s);
  }
  for (std::size_t k = 0; k + 1 < betas.size(); ++k)
    out.monotonicity_defect = std::max(out.monotonicity_defect, out.ball[k].upper - out.ball[k + 1].upper);
  out.gap_at_smallest = std::abs(out.index.upper - out.ball.back().upper);
  out.passes = out.gap_at_smallest < tol;
  return out;
}

struct GrowthReport {
  int trials = 0;
  int violations = 0;
  double floor = 0.0;
  double worst_ratio = std::numeric_limits<double>::infinity();  // min |f(x+h)-f(x)| / |h|
  Vector worst_h;
};

/// Checks |f(x+h) - f(x)| >= floor |h| (1 - 1e-6) for sampled 0 < |h| < beta,
/// floor being the lower end of the ball index enclosure.
inline GrowthReport growth_bound_audit(const MappingSpec& f, const PseudoJacobianMap& jac, const Vector& x, double beta,
                                       int trials = 500, const RegularityBudget& budget = {}) {
  const Enclosure e = ball_index(jac, x, beta, budget);
  if (!(e.lower > budget.conorm.zero_tol))
    fail(ErrorKind::not_regular, "growth_bound_audit: ball index lower bound is not positive at " + format_point(x));
  GrowthReport out;
  out.floor = e.lower;
  const Vector fx = f(x);
  Rng rng(derive_seed(budget.seed, "growth", hash_vector(x)));
  for (int k = 0; k < trials; ++k) {
    Vector h = beta * (1.0 - 1e-12) * rng.ball_point(x.size());
    if (h.norm() == 0.0) continue;
    const double ratio = (f(x + h) - fx).norm() / h.norm();
    ++out.trials;
    if (ratio < out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_h = h;
    }
    if (ratio < out.floor * (1.0 - 1e-6)) ++out.violations;
  }
  return out;
}

struct RegularityProfile {
  Vector center;
  std::vector<double> radii;
  std::vector<double> eta;
  std::vector<int> samples;
  RegularityBudget per_radius_budget;
  double sigma_lower = 0.0;
  bool certifying = false;
  std::optional<double> witness_radius;  // first radius with eta <= zero_tol
  std::optional<Vector> witness_point;
};

/// Lower Riemann sum of the piecewise-minimum of eta over [0, r].
inline double profile_integral(const RegularityProfile& p, double r) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < p.radii.size(); ++i) {
    const double a = p.radii[i];
    if (a >= r) break;
    const double b = std::min(p.radii[i + 1], r);
    sum += std::min(p.eta[i], p.eta[i + 1]) * (b - a);
  }
  return sum;
}

/// eta(t) = min over a seeded sphere sample |x - x0| = t of the lower end
/// of alpha_Jf; eta(0) = alpha_Jf(x0).
inline RegularityProfile radial_profile(const PseudoJacobianMap& jac, const Vector& x0, double rho,
                                        const RegularityBudget& budget = {}) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) fail(ErrorKind::domain, "radial_profile: radius must be nonnegative");
  if (x0.size() != jac.dim) fail(ErrorKind::invalid_input, "radial_profile: center dimension mismatch");
  RegularityProfile p;
  p.center = x0;
  p.per_radius_budget = budget;
  const double zero = budget.conorm.zero_tol;
  if (rho == 0.0) {
    p.radii = {0.0};
    p.eta = {regularity_index(jac, x0, budget.conorm).lower};
    p.samples = {1};
    p.sigma_lower = 0.0;
    p.certifying = true;
    return p;
  }
  if (budget.radii < 2) fail(ErrorKind::invalid_input, "radial_profile: need at least two radii");
  const auto n_r = static_cast<std::size_t>(budget.radii);
  for (std::size_t i = 0; i < n_r; ++i) p.radii.push_back(rho * static_cast<double>(i) / static_cast<double>(n_r - 1));
  p.radii.back() = rho;
  p.eta.assign(n_r, 0.0);
  p.samples.assign(n_r, 0);
  std::vector<Vector> argmin(n_r, x0);
  parallel_for(n_r, budget.threads, [&](std::size_t i) {
    if (i == 0) {
      p.eta[0] = regularity_index(jac, x0, budget.conorm).lower;
      p.samples[0] = 1;
      return;
    }
    const auto dirs = sphere_points(x0.size(), budget.sphere_points, derive_seed(budget.seed, "profile", i));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : dirs) {
      const Vector x = x0 + p.radii[i] * u;
      const double a = regularity_index(jac, x, budget.conorm).lower;
      if (a < best) {
        best = a;
        argmin[i] = x;
      }
    }
    p.eta[i] = best;
    p.samples[i] = static_cast<int>(dirs.size());
  });
  p.certifying = true;
  for (std::size_t i = 0; i < n_r; ++i)
    if (!(p.eta[i] > zero)) {
      p.certifying = false;
      p.witness_radius = p.radii[i];
      p.witness_point = argmin[i];
      break;
    }
  p.sigma_lower = p.certifying ? profile_integral(p, rho) : 0.0;
  return p;
}

inline std::string profile_to_csv(const RegularityProfile& p) {
  std::string out = "t,eta_lower,samples\n";
  char buf[96];
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", p.radii[i], p.eta[i], p.samples[i]);
    out += buf;
  }
  return out;
}

inline nlohmann::json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline nlohmann::json to_json(const RegularityProfile& p) {
  nlohmann::json j = {{"center", vector_to_json(p.center)},
                      {"radii", p.radii},
                      {"eta", p.eta},
                      {"samples", p.samples},
                      {"budget", to_json(p.per_radius_budget)},
                      {"certifying", p.certifying}};
  if (p.certifying) j["sigma_lower"] = p.sigma_lower;
  if (p.witness_radius) j["witness_radius"] = *p.witness_radius;
  if (p.witness_point) j["witness_point"] = vector_to_json(*p.witness_point);
  return j;
}

struct BallCertificate {
  Vector center;
  Vector center_image;
  double rho = 0.0;
  double sigma_lower = 0.0;
  RegularityBudget budget;
  std::vector<std::string> caveats;
};

/// f(x0 + rho B) contains f(x0) + sigma B, with sigma the profile's lower sum.
inline BallCertificate invertibility_ball(const RegularityProfile& p, const MappingSpec& f) {
  if (!p.certifying) {
    std::string why = "profile is not certifying";
    if (p.witness_radius) why += ": eta vanishes at radius " + std::to_string(*p.witness_radius);
    fail(ErrorKind::not_certified, why);
  }
  BallCertificate c;
  c.center = p.center;
  c.center_image = f(p.center);
  c.rho = p.radii.back();
  c.sigma_lower = p.sigma_lower;
  c.budget = p.per_radius_budget;
  c.caveats = {"eta is a minimum over " + std::to_string(p.per_radius_budget.sphere_points) +
                   " sampled sphere points per radius; the infimum over each sphere is not certified",
               "sigma is a lower Riemann sum over " + std::to_string(p.radii.size()) + " radii",
               "growth statement: |f(x) - f(center)| >= integral of eta from 0 to |x - center| for |x - center| <= rho"};
  return c;
}

inline nlohmann::json to_json(const BallCertificate& c) {
  return {{"center", vector_to_json(c.center)}, {"center_image", vector_to_json(c.center_image)},
          {"rho", c.rho},                        {"sigma_lower", c.sigma_lower},
          {"budget", to_json(c.budget)},         {"caveats", c.caveats}};
}

enum class EtaForm { constant, inverse, exponential, profile };

inline std::string_view to_string(EtaForm f) {
  switch (f) {
    case EtaForm::constant: return "const";
    case EtaForm::inverse: return "inv";
    case EtaForm::exponential: return "exp";
    case EtaForm::profile: return "profile";
  }
  return "unknown";
}

/// Declared radial minorant: c, c/(1+t), c e^{-t}, or "profile" (eta taken
/// from a sampled radial profile).
struct EtaRule {
  EtaForm form = EtaForm::constant;
  double c = 1.0;

  double operator()(double t) const {
    switch (form) {
      case EtaForm::constant: return c;
      case EtaForm::inverse: return c / (1.0 + t);
      case EtaForm::exponential: return c * std::exp(-t);
      case EtaForm::profile: break;
    }
    fail(ErrorKind::invalid_input, "EtaRule: profile form has no closed form");
  }

  /// Exact integral over [0, r].
  double integral(double r) const {
    switch (form) {
      case EtaForm::constant: return c * r;
      case EtaForm::inverse: return c * std::log1p(r);
      case EtaForm::exponential: return -c * std::expm1(-r);
      case EtaForm::profile: break;
    }
    fail(ErrorKind::invalid_input, "EtaRule: profile form has no closed form");
  }

  bool divergent() const { return form == EtaForm::constant || form == EtaForm::inverse; }
};

inline EtaRule parse_eta(std::string_view text) {
  if (text == "profile") return {EtaForm::profile, 0.0};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) fail(ErrorKind::invalid_input, "eta rule must be const:c, inv:c, exp:c or profile");
  const std::string_view name = text.substr(0, colon);
  const std::string value(text.substr(colon + 1));
  char* end = nullptr;
  const double c = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || !std::isfinite(c))
    fail(ErrorKind::invalid_input, "eta rule: bad constant '" + value + "'");
  EtaRule r;
  r.c = c;
  if (name == "const") r.form = EtaForm::constant;
  else if (name == "inv") r.form = EtaForm::inverse;
  else if (name == "exp") r.form = EtaForm::exponential;
  else fail(ErrorKind::invalid_input, "eta rule: unknown form '" + std::string(name) + "'");
  return r;
}

struct HadamardVerdict {
  bool certified_global = false;
  double integral_lower = 0.0;
  double r_max = 0.0;
  EtaRule rule;
  double verified_floor = 0.0;  // smallest sampled alpha lower end
  int checks = 0;
  std::optional<double> witness_radius;
  std::optional<Vector> witness_point;
  std::string reason;
  std::vector<std::string> caveats;
};

/// Integral-condition certificate. A declared constant or c/(1+t) minorant
/// certifies when it is verified against sampled alpha values on
/// |x - x0| <= r_max and its integral there exceeds the threshold. A
/// profile certifies through its verified positive floor.
inline HadamardVerdict hadamard_certify(const PseudoJacobianMap& jac, const MappingSpec& f, const EtaRule& rule,
                                        double r_max, double divergence_threshold = 1.0,
                                        const std::optional<Vector>& center = std::nullopt,
                                        const RegularityBudget& budget = {}) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) fail(ErrorKind::domain, "hadamard_certify: r_max must be positive");
  if (jac.dim != f.dim) fail(ErrorKind::invalid_input, "hadamard_certify: dimensions disagree");
  const Vector x0 = center ? *center : Vector::Zero(f.dim);
  HadamardVerdict v;
  v.r_max = r_max;
  v.rule = rule;
  v.caveats.push_back("sampling covers only |x - x0| <= " + std::to_string(r_max) +
                      "; behaviour beyond that radius is assumed, not verified");

  const RegularityProfile prof = radial_profile(jac, x0, r_max, budget);
  v.checks = 0;
  for (int s : prof.samples) v.checks += s;
  v.verified_floor = *std::min_element(prof.eta.begin(), prof.eta.end());
  if (!prof.certifying) {
    v.witness_radius = prof.witness_radius;
    v.witness_point = prof.witness_point;
    v.reason = "regularity index vanishes on the sampled region";
    return v;
  }

  if (rule.form == EtaForm::profile) {
    v.integral_lower = prof.sigma_lower;
    v.certified_global = true;
    v.reason = "positive regularity floor verified on the sampled region";
    v.caveats.push_back("certificate rests on the constant floor " + std::to_string(v.verified_floor) +
                        " extending to all of R^n");
    return v;
  }

  if (!(rule.c > 0.0)) {
    v.witness_radius = 0.0;
    v.reason = "declared minorant is not positive";
    return v;
  }
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    const double need = rule(prof.radii[i]);
    if (prof.eta[i] < need * (1.0 - 1e-12)) {
      v.witness_radius = prof.radii[i];
      v.reason = "declared minorant exceeds the sampled regularity index";
      return v;
    }
  }
  v.integral_lower = rule.integral(r_max);
  if (!rule.divergent()) {
    v.reason = "declared minorant is integrable on [0, inf)";
    return v;
  }
  if (!(v.integral_lower > divergence_threshold)) {
    v.reason = "integral over [0, r_max] does not exceed the divergence threshold";
    return v;
  }
  v.certified_global = true;
  v.reason = rule.form == EtaForm::constant ? "constant floor verified; its integral diverges"
                                            : "c/(1+t) minorant verified; its integral diverges logarithmically";
  return v;
}

inline nlohmann::json to_json(const HadamardVerdict& v) {
  nlohmann::json j = {{"certified_global", v.certified_global},
                      {"integral_lower", v.integral_lower},
                      {"r_max", v.r_max},
                      {"eta", {{"form", to_string(v.rule.form)}, {"c", v.rule.c}}},
                      {"verified_floor", v.verified_floor},
                      {"checks", v.checks},
                      {"reason", v.reason},
                      {"caveats", v.caveats}};
  if (v.witness_radius) j["witness_radius"] = *v.witness_radius;
  if (v.witness_point) j["witness_point"] = vector_to_json(*v.witness_point);
  return j;
}

struct MeanValueReport {
  double distance = 0.0;  // dist(f(u) - f(v), H (u - v))
  double ratio = 0.0;     // distance / |u - v|
  int samples_used = 0;
  bool passes = false;
};

/// Distance from f(u) - f(v) to H(u - v), H the union hull of Jf over
/// `samples` points of [u, v]. Rays are truncated at ray_tmax, which only
/// shrinks the set. `skip` drops segment points (e.g. near a blow-up).
inline MeanValueReport mean_value_audit(const MappingSpec& f, const PseudoJacobianMap& jac, const Vector& u,
                                        const Vector& v, int samples = 64,
                                        const std::function<bool(const Vector&)>& skip = {}, double tol = 1e-3,
                                        double ray_tmax = 1e3) {
  const Vector d = u - v;
  if (d.norm() == 0.0) fail(ErrorKind::domain, "mean_value_audit: u and v coincide");
  MatrixPolytope h;
  MeanValueReport out;
  for (int k = 0; k < samples; ++k) {
    const double t = samples == 1 ? 0.5 : static_cast<double>(k) / (samples - 1);
    const Vector p = v + t * d;
    if (skip && skip(p)) continue;
    h.merge(eval_at(jac, p));
    ++out.samples_used;
  }
  if (out.samples_used == 0) fail(ErrorKind::domain, "mean_value_audit: every segment sample was skipped");
  const Vector df = f(u) - f(v);
  const auto gens = detail::expanded_generators(h, ray_tmax);
  Matrix pts(d.size(), static_cast<Eigen::Index>(gens.size()));
  for (std::size_t k = 0; k < gens.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = gens[k] * d - df;
  out.distance = min_norm_point(pts, 1000, 1e-14).norm;
  out.ratio = out.distance / d.norm();
  out.passes = out.ratio <= tol;
  return out;
}

}  // namespace pjinv
