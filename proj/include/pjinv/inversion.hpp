#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pjinv/error.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/matrixset.hpp"
#include "pjinv/pseudojac.hpp"
#include "pjinv/regularity.hpp"

namespace pjinv {

struct LocalInvertConfig {
  double tol = 1e-10;
  int max_iter = 200;
  int max_halvings = 60;
  ConormBudget conorm;
};

/// Vertex of Jf(x) with the largest co-norm (rays ignored).
inline Matrix newton_matrix(const MatrixPolytope& p) {
  const Matrix* best = &p.vertices().front();
  double best_c = -1.0;
  for (const auto& v : p.vertices()) {
    const double c = co_norm(v);
    if (c > best_c) {
      best_c = c;
      best = &v;
    }
  }
  return *best;
}

/// Damped Newton iteration for f(x) = y using the maximal co-norm vertex.
inline Vector local_invert(const MappingSpec& f, const PseudoJacobianMap& jac, const Vector& x_guess, const Vector& y,
                           const LocalInvertConfig& cfg = {}) {
  if (x_guess.size() != f.dim || y.size() != f.dim)
    fail(ErrorKind::invalid_input, "local_invert: dimension mismatch");
  const Enclosure reg = regularity_index(jac, x_guess, cfg.conorm);
  if (!(reg.lower > cfg.conorm.zero_tol))
    fail(ErrorKind::not_regular, "not Jf-regular here: regularity index lower bound " + std::to_string(reg.lower) +
                                     " at " + format_point(x_guess));
  Vector x = x_guess;
  Vector r = f(x) - y;
  double rn = r.norm();
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (rn <= cfg.tol) return x;
    const Matrix m = newton_matrix(eval_at(jac, x));
    if (!(co_norm(m) > 0.0)) fail(ErrorKind::local_solve_failure, "local_invert: singular Newton matrix at " + format_point(x));
    const Vector dx = m.partialPivLu().solve(r);
    double s = 1.0;
    bool moved = false;
    for (int k = 0; k <= cfg.max_halvings; ++k, s *= 0.5) {
      const Vector trial = x - s * dx;
      Vector rt;
      try {
        rt = f(trial) - y;
      } catch (const Error&) {
        continue;
      }
      const double tn = rt.norm();
      if (tn < rn) {
        x = trial;
        r = rt;
        rn = tn;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (rn <= cfg.tol) return x;
      fail(ErrorKind::local_solve_failure, "local_invert: no residual decrease after " +
                                               std::to_string(cfg.max_halvings) + " halvings at " + format_point(x) +
                                               " (residual " + std::to_string(rn) + ")");
    }
  }
  if (rn <= cfg.tol) return x;
  fail(ErrorKind::non_convergence, "local_invert: " + std::to_string(cfg.max_iter) +
                                       " iterations exceeded (residual " + std::to_string(rn) + ")");
}

struct StepConfig {
  double c = 0.5;            // safety factor in dt |dy| <= c a beta
  double beta_max = 0.5;
  double beta_min = 1e-8;    // below this a vanishing floor is a breakdown
  double min_dt = 1e-12;
  int max_steps = 100000;
  double tol = 1e-10;        // residual tolerance at accepted steps
  RegularityBudget regularity;
  LocalInvertConfig local;
};

inline nlohmann::json to_json(const StepConfig& s) {
  return {{"c", s.c},           {"beta_max", s.beta_max}, {"beta_min", s.beta_min},
          {"min_dt", s.min_dt}, {"max_steps", s.max_steps}, {"tol", s.tol},
          {"regularity", to_json(s.regularity)}};
}

enum class LiftStatus { converged, max_steps, regularity_breakdown, local_solve_failure };

inline std::string_view to_string(LiftStatus s) {
  switch (s) {
    case LiftStatus::converged: return "converged";
    case LiftStatus::max_steps: return "max-steps";
    case LiftStatus::regularity_breakdown: return "regularity-breakdown";
    case LiftStatus::local_solve_failure: return "local-solve-failure";
  }
  return "unknown";
}

struct LiftStep {
  double t = 0.0;
  Vector x;
  double alpha_floor = 0.0;
  double step_len = 0.0;  // accepted dt
  double beta = 0.0;
  double residual = 0.0;
};

struct InversionCertificate {
  Vector target;
  Vector start;
  Vector y_start;
  std::vector<LiftStep> steps;
  LiftStatus status = LiftStatus::max_steps;
  Vector final_x;
  double final_residual = std::numeric_limits<double>::infinity();
  double alpha_min = std::numeric_limits<double>::infinity();
  int rejected = 0;
  std::string message;
  std::optional<Vector> breakdown_at;
};

namespace detail {

/// Best ball floor at x, halving beta until positive or below beta_min.
inline double positive_floor(const PseudoJacobianMap& jac, const Vector& x, double& beta, const StepConfig& cfg,
                             std::uint64_t index) {
  RegularityBudget rb = cfg.regularity;
  while (true) {
    rb.ball.seed = derive_seed(cfg.regularity.seed, "lift", index);
    const double a = ball_index(jac, x, beta, rb).lower;
    if (a > cfg.regularity.conorm.zero_tol) return a;
    if (beta * 0.5 < cfg.beta_min) return 0.0;
    beta *= 0.5;
  }
}

}  // namespace detail

/// Lifts p(t) = (1-t) y_start + t y_end through f starting at x_start.
/// Each step is limited by dt |y_end - y_start| <= c a beta, with a the lower
/// end of the sampled ball index at the current point, and corrected by
/// local_invert. Accepted steps satisfy |dx| <= dt |dy| / a (1 + 1e-6).
inline InversionCertificate lift_segment(const MappingSpec& f, const PseudoJacobianMap& jac, const Vector& x_start,
                                         const Vector& y_start, const Vector& y_end, const StepConfig& cfg = {}) {
  if (x_start.size() != f.dim || y_start.size() != f.dim || y_end.size() != f.dim)
    fail(ErrorKind::invalid_input, "lift_segment: dimension mismatch");
  if (!(cfg.c > 0.0) || !(cfg.beta_max > 0.0)) fail(ErrorKind::invalid_input, "lift_segment: bad step config");
  const double r0 = (f(x_start) - y_start).norm();
  if (r0 > cfg.tol) fail(ErrorKind::invalid_input, "lift_segment: start point does not map to y_start (residual " +
                                                      std::to_string(r0) + ")");
  InversionCertificate cert;
  cert.target = y_end;
  cert.start = x_start;
  cert.y_start = y_start;
  const Vector dy = y_end - y_start;
  const double len = dy.norm();
  Vector x = x_start;
  double t = 0.0, beta = cfg.beta_max;
  double dt_cap = 1.0;  // reduced after a rejection, relaxed after acceptance
  const double floor_eps = 1e-15 * (1.0 + std::max(y_start.norm(), y_end.norm()));

  auto finish = [&](LiftStatus s, std::string msg) {
    cert.status = s;
    cert.message = std::move(msg);
    cert.final_x = x;
    cert.final_residual = (f(x) - y_end).norm();
    return cert;
  };

  std::uint64_t index = 0;
  while (t < 1.0) {
    if (static_cast<int>(cert.steps.size()) >= cfg.max_steps) return finish(LiftStatus::max_steps, "step budget exhausted");
    const double a = detail::positive_floor(jac, x, beta, cfg, index++);
    if (!(a > 0.0)) {
      cert.breakdown_at = x;
      return finish(LiftStatus::regularity_breakdown,
                    "ball index vanishes at " + format_point(x) + " for every radius down to " +
                        std::to_string(cfg.beta_min));
    }
    double dt = len > 0.0 ? std::min({1.0 - t, cfg.c * a * beta / len, dt_cap}) : 1.0 - t;
    if (dt < cfg.min_dt) return finish(LiftStatus::max_steps, "step underflow at t = " + std::to_string(t));
    const double t_next = (1.0 - t - dt <= 1e-15) ? 1.0 : t + dt;
    dt = t_next - t;
    const Vector y_next = (t_next == 1.0) ? y_end : Vector(y_start + t_next * dy);

    // tangent predictor, then corrector
    const Matrix m = newton_matrix(eval_at(jac, x));
    Vector guess = x + m.partialPivLu().solve(dt * dy);
    if (!guess.allFinite() || (guess - x).norm() > beta) guess = x;

    LocalInvertConfig lc = cfg.local;
    lc.tol = std::max(std::min(cfg.tol, 1e-7 * dt * len), floor_eps);
    bool ok = false;
    Vector x_new;
    try {
      x_new = local_invert(f, jac, guess, y_next, lc);
      if (guess != x && (x_new - x).norm() > beta) x_new = local_invert(f, jac, x, y_next, lc);
      ok = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::local_solve_failure && e.kind() != ErrorKind::non_convergence &&
          e.kind() != ErrorKind::not_regular)
        throw;
      try {
        x_new = local_invert(f, jac, x, y_next, lc);
        ok = true;
      } catch (const Error& e2) {
        if (e2.kind() != ErrorKind::local_solve_failure && e2.kind() != ErrorKind::non_convergence &&
            e2.kind() != ErrorKind::not_regular)
          throw;
      }
    }
    const double move = ok ? (x_new - x).norm() : std::numeric_limits<double>::infinity();
    const double bound = dt * len / a * (1.0 + 1e-6) + 2.0 * floor_eps / a;
    if (!ok || move > bound || move > beta) {
      ++cert.rejected;
      dt_cap = 0.5 * dt;
      beta = std::max(0.5 * beta, cfg.beta_min);
      if (dt_cap < cfg.min_dt) {
        if (!ok) return finish(LiftStatus::local_solve_failure, "corrector failed at t = " + std::to_string(t));
        return finish(LiftStatus::max_steps, "step underflow at t = " + std::to_string(t));
      }
      continue;
    }
    x = x_new;
    t = t_next;
    const double res = (f(x) - y_next).norm();
    cert.steps.push_back(LiftStep{t, x, a, dt, beta, res});
    cert.alpha_min = std::min(cert.alpha_min, a);
    dt_cap = std::min(1.0, 4.0 * dt_cap);
    beta = std::min(cfg.beta_max, 2.0 * beta);
  }
  cert.final_x = x;
  cert.final_residual = (f(x) - y_end).norm();
  if (cert.final_residual <= std::max(cfg.tol, floor_eps)) {
    cert.status = LiftStatus::converged;
    cert.message = "segment lifted";
  } else {
    cert.status = LiftStatus::local_solve_failure;
    cert.message = "final residual above tolerance";
  }
  return cert;
}

/// Lift of [f(x_anchor), y]; alpha_min is the empirical alpha_K of the
/// lifted segment image.
inline InversionCertificate global_invert(const MappingSpec& f, const PseudoJacobianMap& jac, const Vector& y,
                                          const std::optional<Vector>& anchor = std::nullopt,
                                          const StepConfig& cfg = {}) {
  const Vector x0 = anchor ? *anchor : Vector::Zero(f.dim);
  return lift_segment(f, jac, x0, f(x0), y, cfg);
}

inline nlohmann::json to_json(const InversionCertificate& c) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : c.steps)
    steps.push_back({{"t", s.t},
                     {"x", vector_to_json(s.x)},
                     {"alpha_floor", s.alpha_floor},
                     {"step_len", s.step_len},
                     {"beta", s.beta},
                     {"residual", s.residual}});
  nlohmann::json j = {{"target", vector_to_json(c.target)},
                      {"start", vector_to_json(c.start)},
                      {"y_start", vector_to_json(c.y_start)},
                      {"status", to_string(c.status)},
                      {"final_x", vector_to_json(c.final_x)},
                      {"final_residual", c.final_residual},
                      {"alpha_min", c.steps.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.alpha_min)},
                      {"rejected_steps", c.rejected},
                      {"message", c.message},
                      {"steps", steps}};
  if (c.breakdown_at) j["breakdown_at"] = vector_to_json(*c.breakdown_at);
  return j;
}

/// Rows: t, x_1..x_n, alpha_floor, residual.
inline std::string trace_to_csv(const InversionCertificate& c) {
  const Eigen::Index n = c.start.size();
  std::string out = "t";
  for (Eigen::Index i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  out += ",alpha_floor,residual\n";
  char buf[64];
  for (const auto& s : c.steps) {
    std::snprintf(buf, sizeof buf, "%.17g", s.t);
    out += buf;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.x(i));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", s.alpha_floor, s.residual);
    out += buf;
  }
  return out;
}

}  // namespace pjinv
