#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "json.hpp"
#include "pjinv/error.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/parallel.hpp"
#include "pjinv/pseudojac.hpp"
#include "pjinv/random.hpp"
#include "pjinv/regularity.hpp"

namespace pjinv {

struct DiniConfig {
  std::vector<double> radii = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  int directions = 0;  // 0 means 64 n
  int band = 2;        // number of smallest radii used
  int refine_steps = 48;
  std::uint64_t seed = 0;
};

struct DiniEstimate {
  Vector point;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> radii_used;
  int directions_used = 0;
};

namespace detail {

inline void check_dini(const MappingSpec& f, const Vector& x, const DiniConfig& cfg) {
  if (x.size() != f.dim) fail(ErrorKind::invalid_input, "dini: point dimension mismatch");
  if (cfg.radii.empty()) fail(ErrorKind::invalid_input, "dini: empty radius list");
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    if (!(cfg.radii[i] > 0.0)) fail(ErrorKind::domain, "dini: radii must be positive");
    if (i && !(cfg.radii[i] < cfg.radii[i - 1])) fail(ErrorKind::invalid_input, "dini: radii must be decreasing");
  }
  const int dirs = cfg.directions > 0 ? cfg.directions : static_cast<int>(64 * x.size());
  if (dirs < 64) fail(ErrorKind::invalid_input, "dini: at least 64 directions required");
}

/// Difference quotients on the smallest-radius band, with a pattern search
/// on the sphere around the best direction. sign = +1 minimises, -1 maximises.
inline double dini_extreme(const MappingSpec& f, const Vector& x, const DiniConfig& cfg, double sign,
                           std::vector<double>& used, int& dirs_used) {
  check_dini(f, x, cfg);
  const Eigen::Index n = x.size();
  const int dirs = cfg.directions > 0 ? cfg.directions : static_cast<int>(64 * n);
  const std::size_t band = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(cfg.band, 1)), 1, cfg.radii.size());
  used.assign(cfg.radii.end() - static_cast<std::ptrdiff_t>(band), cfg.radii.end());
  dirs_used = dirs;
  const Vector fx = f(x);
  auto quotient = [&](const Vector& u, double r) { return (f(x + r * u) - fx).norm() / r; };
  const auto us = sphere_points(n, dirs, derive_seed(cfg.seed, "dini", hash_vector(x)));
  double best = std::numeric_limits<double>::infinity();
  Vector best_u = us.front();
  double best_r = used.front();
  for (double r : used)
    for (const auto& u : us) {
      const double q = sign * quotient(u, r);
      if (q < best) {
        best = q;
        best_u = u;
        best_r = r;
      }
    }
  // pattern search along tangent directions
  double step = 2.0 * std::acos(-1.0) / dirs;
  for (int it = 0; it < cfg.refine_steps && step > 1e-9; ++it) {
    bool improved = false;
    for (Eigen::Index i = 0; i < n && n > 1; ++i) {
      Vector e = Vector::Zero(n);
      e(i) = 1.0;
      Vector tangent = e - e.dot(best_u) * best_u;
      if (tangent.norm() < 1e-8) continue;
      tangent.normalize();
      for (double s : {step, -step}) {
        const Vector u = (best_u + s * tangent).normalized();
        const double q = sign * quotient(u, best_r);
        if (q < best) {
          best = q;
          best_u = u;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return sign * best;
}

}  // namespace detail

/// Over-estimate of the lower scalar Dini derivative (finitely many y).
inline DiniEstimate dini_lower(const MappingSpec& f, const Vector& x, const DiniConfig& cfg = {}) {
  DiniEstimate e;
  e.point = x;
  e.lower = detail::dini_extreme(f, x, cfg, 1.0, e.radii_used, e.directions_used);
  e.upper = std::max(e.lower, detail::dini_extreme(f, x, cfg, -1.0, e.radii_used, e.directions_used));
  return e;
}

/// Under-estimate of the upper scalar Dini derivative.
inline DiniEstimate dini_upper(const MappingSpec& f, const Vector& x, const DiniConfig& cfg = {}) {
  return dini_lower(f, x, cfg);
}

inline nlohmann::json to_json(const DiniEstimate& e) {
  std::vector<double> radii(e.radii_used.rbegin(), e.radii_used.rend());
  return {{"point", vector_to_json(e.point)},
          {"lower", e.lower},
          {"upper", e.upper},
          {"radii_used", radii},
          {"directions_used", e.directions_used}};
}

struct PathSample {
  std::vector<double> parameter_grid;
  std::vector<Vector> points;
  std::vector<Vector> image_points;
  std::function<Vector(double)> curve;  // q itself, empty for hand-built samples
};

inline PathSample sample_path(const MappingSpec& f, const std::function<Vector(double)>& q, double a, double b,
                              int count) {
  if (count < 2 || !(b > a)) fail(ErrorKind::invalid_input, "sample_path: need count >= 2 and a < b");
  PathSample p;
  for (int i = 0; i < count; ++i) {
    const double t = i == count - 1 ? b : a + (b - a) * i / (count - 1);
    p.parameter_grid.push_back(t);
    p.points.push_back(q(t));
    p.image_points.push_back(f(p.points.back()));
  }
  p.curve = q;
  return p;
}

inline PathSample straight_path(const MappingSpec& f, const Vector& from, const Vector& to, int count) {
  return sample_path(f, [from, to](double t) -> Vector { return (1.0 - t) * from + t * to; }, 0.0, 1.0, count);
}

/// Polygonal length of the image points.
inline double path_length(const PathSample& p) {
  if (p.image_points.size() < 2) fail(ErrorKind::invalid_input, "path_length: need at least two points");
  double len = 0.0;
  for (std::size_t i = 1; i < p.image_points.size(); ++i) len += (p.image_points[i] - p.image_points[i - 1]).norm();
  return len;
}

namespace detail {

// cosine of the turn between two chords, 1 when either is degenerate
inline double turn_cos(const Vector& u, const Vector& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 1.0;
  return u.dot(v) / (nu * nv);
}

// A midpoint gain alone misses a fold hiding near an end of the interval, so
// the chords entering and leaving the interval are compared as well.
inline double refine_length(const MappingSpec& f, const std::function<Vector(double)>& q, double ta, double tb,
                            const Vector& fa, const Vector& fb, const Vector& din, const Vector& dout,
                            double abs_tol, int depth, int min_depth) {
  const double chord = (fb - fa).norm();
  const double tm = 0.5 * (ta + tb);
  const Vector fm = f(q(tm));
  const Vector left = fm - fa, right = fb - fm;
  const double two = left.norm() + right.norm();
  if (depth <= 0) return two;
  constexpr double kStraight = 1.0 - 1e-4;
  const bool smooth = turn_cos(din, left) >= kStraight && turn_cos(left, right) >= kStraight &&
                      turn_cos(right, dout) >= kStraight;
  if (min_depth <= 0 && two - chord <= abs_tol && smooth) return two;
  return refine_length(f, q, ta, tm, fa, fm, din, right, abs_tol, depth - 1, min_depth - 1) +
         refine_length(f, q, tm, tb, fm, fb, left, dout, abs_tol, depth - 1, min_depth - 1);
}

}  // namespace detail

/// Length of f o q refined by bisection of each grid interval until the
/// polygon stops growing and stops turning; the bare polygon without a curve.
inline double curve_length(const MappingSpec& f, const PathSample& p, double rel_tol = 1e-9, int max_depth = 48) {
  const double poly = path_length(p);
  if (!p.curve) return poly;
  const double tol = rel_tol * std::max(poly, 1e-300);
  const auto& im = p.image_points;
  const std::size_t n = im.size();
  const Vector none = Vector::Zero(im.front().size());
  double len = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const Vector din = i >= 2 ? Vector(im[i - 1] - im[i - 2]) : none;
    const Vector dout = i + 1 < n ? Vector(im[i + 1] - im[i]) : none;
    len += detail::refine_length(f, p.curve, p.parameter_grid[i - 1], p.parameter_grid[i], im[i - 1], im[i], din,
                                 dout, tol, max_depth, 2);
  }
  return std::max(len, poly);
}

struct MviReport {
  double lhs = 0.0;        // length of f o q
  double rhs_floor = 0.0;  // (min over grid of dini_lower) |q(b) - q(a)|
  double min_dini = 0.0;
  bool passes = false;
};

/// l(f o q) >= inf_tau D^-_{q(tau)} f |q(b) - q(a)|, checked on the grid.
inline MviReport mvi_audit(const MappingSpec& f, const PathSample& q, const DiniConfig& cfg = {}, int threads = 1) {
  if (q.points.size() < 2) fail(ErrorKind::domain, "mvi_audit: path needs at least two points");
  const double chord = (q.points.back() - q.points.front()).norm();
  if (chord == 0.0) fail(ErrorKind::domain, "mvi_audit: degenerate path with q(a) = q(b)");
  std::vector<double> d(q.points.size());
  parallel_for(q.points.size(), threads, [&](std::size_t i) {
    std::vector<double> used;
    int dirs = 0;
    d[i] = detail::dini_extreme(f, q.points[i], cfg, 1.0, used, dirs);
  });
  MviReport r;
  r.lhs = curve_length(f, q);
  r.min_dini = *std::min_element(d.begin(), d.end());
  r.rhs_floor = r.min_dini * chord;
  r.passes = r.lhs >= r.rhs_floor * (1.0 - 1e-3);
  return r;
}

inline nlohmann::json to_json(const MviReport& r) {
  return {{"lhs", r.lhs}, {"rhs_floor", r.rhs_floor}, {"min_dini", r.min_dini}, {"passes", r.passes}};
}

}  // namespace pjinv
