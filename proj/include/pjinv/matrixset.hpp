#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pjinv/error.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/random.hpp"

namespace pjinv {

/// Finitely generated convex matrix set co(vertices) + cone(rays).
/// Rays are stored with unit Frobenius norm.
class MatrixPolytope {
 public:
  MatrixPolytope() = default;

  explicit MatrixPolytope(std::vector<Matrix> vertices, std::vector<Matrix> rays = {})
      : vertices_(std::move(vertices)), rays_(std::move(rays)) {
    if (vertices_.empty()) fail(ErrorKind::invalid_input, "MatrixPolytope: empty vertex list");
    dim_ = vertices_.front().rows();
    for (const auto& v : vertices_) check(v, "vertex");
    for (auto& r : rays_) {
      check(r, "ray");
      const double norm = r.norm();
      if (norm == 0.0) fail(ErrorKind::invalid_input, "MatrixPolytope: zero ray");
      r /= norm;
    }
  }

  static MatrixPolytope singleton(Matrix a) { return MatrixPolytope(std::vector<Matrix>{std::move(a)}); }

  Eigen::Index dim() const { return dim_; }
  const std::vector<Matrix>& vertices() const { return vertices_; }
  const std::vector<Matrix>& rays() const { return rays_; }
  bool is_singleton() const { return vertices_.size() == 1 && rays_.empty(); }

  /// Union hull: generators of both sets.
  void merge(const MatrixPolytope& other) {
    if (vertices_.empty()) {
      *this = other;
      return;
    }
    if (other.dim() != dim_) fail(ErrorKind::invalid_input, "MatrixPolytope::merge: dimension mismatch");
    vertices_.insert(vertices_.end(), other.vertices_.begin(), other.vertices_.end());
    rays_.insert(rays_.end(), other.rays_.begin(), other.rays_.end());
  }

  bool contains_vertex(const Matrix& a, double tol = 0.0) const {
    return std::any_of(vertices_.begin(), vertices_.end(),
                       [&](const Matrix& v) { return (v - a).cwiseAbs().maxCoeff() <= tol; });
  }

  /// sup over the set of <v, M u>; +inf when some ray has positive support.
  double support(const Vector& v, const Vector& u, double ray_tol = 0.0) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : vertices_) best = std::max(best, v.dot(m * u));
    for (const auto& r : rays_)
      if (v.dot(r * u) > ray_tol) return std::numeric_limits<double>::infinity();
    return best;
  }

 private:
  void check(const Matrix& a, const char* what) const {
    if (a.rows() != dim_ || a.cols() != dim_)
      fail(ErrorKind::invalid_input, std::string("MatrixPolytope: ") + what + " has wrong shape");
    if (!a.allFinite()) fail(ErrorKind::invalid_input, std::string("MatrixPolytope: non-finite ") + what);
  }

  std::vector<Matrix> vertices_;
  std::vector<Matrix> rays_;
  Eigen::Index dim_ = 0;
};

struct ConormBudget {
  int sphere_directions = 256;
  int refine_rounds = 4;
  int inner_iterations = 200;
  double inner_tol = 1e-10;
  double ray_tmax = 1e3;
  int ray_grid = 64;
  std::size_t bnb_max_generators = 8;
  int bnb_max_cells = 20000;
  int angular_max_evaluations = 4096;
  double rel_tol = 1e-7;
  double zero_tol = 1e-9;
  std::uint64_t seed = 0;
};

enum class ConormMethod { exact, simplex_bnb, angular_bnb, sphere_search };

inline std::string_view to_string(ConormMethod m) {
  switch (m) {
    case ConormMethod::exact: return "exact";
    case ConormMethod::simplex_bnb: return "simplex-branch-and-bound";
    case ConormMethod::angular_bnb: return "angular-branch-and-bound";
    case ConormMethod::sphere_search: return "sphere-search";
  }
  return "unknown";
}

/// Enclosure [lower, upper] of an infimum of co-norms. `certified` means the
/// lower end is a proven bound for the generator set (up to rounding);
/// otherwise it only reflects the sampled directions.
struct Enclosure {
  double lower = 0.0;
  double upper = 0.0;
  ConormMethod method = ConormMethod::exact;
  bool certified = true;
  bool converged = true;
  long evaluations = 0;
  std::size_t generators = 0;

  double width() const { return upper - lower; }
  bool positive(double zero_tol) const { return lower > zero_tol; }
};

namespace detail {

/// vertices + {0, tmax * ray}: the hull of the ray-expanded grid equals
/// co(vertices) + co({0} U tmax * rays).
inline std::vector<Matrix> expanded_generators(const MatrixPolytope& s, double tmax) {
  std::vector<Matrix> gens;
  gens.reserve(s.vertices().size() * (s.rays().size() + 1));
  for (const auto& v : s.vertices()) {
    gens.push_back(v);
    for (const auto& r : s.rays()) gens.push_back(v + tmax * r);
  }
  return gens;
}

inline std::vector<double> ray_grid(double tmax, int count) {
  std::vector<double> ts{0.0};
  const int k = std::max(count - 1, 1);
  for (int i = 0; i < k; ++i) {
    const double e = -6.0 * (1.0 - static_cast<double>(i) / std::max(k - 1, 1));
    ts.push_back(tmax * std::pow(10.0, e));
  }
  return ts;
}

inline void dedupe(std::vector<Matrix>& gens) {
  std::vector<Matrix> out;
  for (auto& g : gens) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Matrix& o) { return o == g; });
    if (!seen) out.push_back(std::move(g));
  }
  gens = std::move(out);
}

/// If the generators lie on a line, keep its two extreme points. Returns the
/// largest Frobenius distance of a generator from that line (0 when the
/// reduction is skipped).
inline double reduce_collinear(std::vector<Matrix>& gens) {
  if (gens.size() <= 2) return 0.0;
  const Eigen::Index n2 = gens.front().size();
  const Eigen::Index m = static_cast<Eigen::Index>(gens.size());
  Matrix diffs(n2, m - 1);
  const Vector base = flatten(gens.front());
  for (Eigen::Index i = 1; i < m; ++i) diffs.col(i - 1) = flatten(gens[static_cast<std::size_t>(i)]) - base;
  Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeThinU);
  const Vector sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  if (sv.size() > 1 && sv(1) > 1e-13 * sv(0)) return 0.0;
  const Vector dir = svd.matrixU().col(0);
  double cmin = 0.0, cmax = 0.0, resid = 0.0;
  std::size_t imin = 0, imax = 0;
  for (Eigen::Index i = 1; i < m; ++i) {
    const double c = dir.dot(diffs.col(i - 1));
    resid = std::max(resid, (diffs.col(i - 1) - c * dir).norm());
    if (c < cmin) {
      cmin = c;
      imin = static_cast<std::size_t>(i);
    }
    if (c > cmax) {
      cmax = c;
      imax = static_cast<std::size_t>(i);
    }
  }
  std::vector<Matrix> out{gens[imin]};
  if (imax != imin) out.push_back(gens[imax]);
  gens = std::move(out);
  return resid;
}

struct SimplexCell {
  std::vector<Matrix> verts;
  double lower = 0.0;
};

struct CellOrder {
  bool operator()(const SimplexCell& a, const SimplexCell& b) const { return a.lower > b.lower; }
};

inline double cell_lower_bound(const std::vector<Matrix>& verts, double& upper_candidate) {
  Matrix c = verts.front();
  for (std::size_t j = 1; j < verts.size(); ++j) c += verts[j];
  c /= static_cast<double>(verts.size());
  const Vector sv = singular_values(c);
  const double sc = sv(sv.size() - 1);
  upper_candidate = sc;
  double radius = 0.0;
  for (const auto& v : verts) radius = std::max(radius, spectral_norm(v - c));
  double bound = sc - radius;
  if (sc > 0.0 && radius > 0.0) {
    Matrix cinv;
    if (c.rows() == 2) {
      const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
      cinv.resize(2, 2);
      cinv << c(1, 1), -c(0, 1), -c(1, 0), c(0, 0);
      cinv /= det;
    } else {
      cinv = c.inverse();
    }
    double left = 0.0, right = 0.0;
    for (const auto& v : verts) {
      const Matrix e = v - c;
      left = std::max(left, spectral_norm(cinv * e));
      right = std::max(right, spectral_norm(e * cinv));
    }
    bound = std::max(bound, sc * (1.0 - std::min(left, right)));
  }
  // rounding slack
  bound -= 1e-13 * (sv(0) + radius);
  return std::max(0.0, bound);
}

inline Enclosure simplex_bnb(const std::vector<Matrix>& gens, const ConormBudget& budget) {
  Enclosure enc;
  enc.method = ConormMethod::simplex_bnb;
  enc.generators = gens.size();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : gens) best = std::min(best, co_norm(g));
  enc.evaluations = static_cast<long>(gens.size());

  // memory cap for large n
  const double per_cell = static_cast<double>(gens.size() * gens.front().size());
  const int max_cells = static_cast<int>(std::min<double>(budget.bnb_max_cells, 4e7 / std::max(per_cell, 1.0)));

  std::priority_queue<SimplexCell, std::vector<SimplexCell>, CellOrder> queue;
  {
    SimplexCell root{gens, 0.0};
    double up = 0.0;
    root.lower = cell_lower_bound(root.verts, up);
    best = std::min(best, up);
    ++enc.evaluations;
    queue.push(std::move(root));
  }
  int cells = 1;
  enc.converged = false;
  while (!queue.empty()) {
    const double tol = std::max(1e-12, budget.rel_tol * best);
    if (queue.top().lower >= best - tol || best <= 0.0) {
      enc.converged = true;
      break;
    }
    if (cells >= max_cells) break;
    SimplexCell cell = queue.top();
    queue.pop();
    std::size_t ia = 0, ib = 1;
    double longest = -1.0;
    for (std::size_t i = 0; i < cell.verts.size(); ++i)
      for (std::size_t j = i + 1; j < cell.verts.size(); ++j) {
        const double d = (cell.verts[i] - cell.verts[j]).squaredNorm();
        if (d > longest) {
          longest = d;
          ia = i;
          ib = j;
        }
      }
    const Matrix mid = 0.5 * (cell.verts[ia] + cell.verts[ib]);
    best = std::min(best, co_norm(mid));
    SimplexCell a{cell.verts, 0.0}, b{std::move(cell.verts), 0.0};
    a.verts[ib] = mid;
    b.verts[ia] = mid;
    double up = 0.0;
    a.lower = cell_lower_bound(a.verts, up);
    best = std::min(best, up);
    b.lower = cell_lower_bound(b.verts, up);
    best = std::min(best, up);
    enc.evaluations += 3;
    queue.push(std::move(a));
    queue.push(std::move(b));
    cells += 1;
  }
  enc.upper = best;
  enc.lower = queue.empty() ? best : std::min(queue.top().lower, best);
  return enc;
}

/// g(u) = min over co(gens) of |A u|, via the minimum-norm point of {G_i u}.
struct DirectionalMin {
  const std::vector<Matrix>& gens;
  const ConormBudget& budget;
  Matrix images;

  DirectionalMin(const std::vector<Matrix>& g, const ConormBudget& b)
      : gens(g), budget(b), images(g.front().rows(), static_cast<Eigen::Index>(g.size())) {}

  MinNormPoint operator()(const Vector& u) {
    for (std::size_t i = 0; i < gens.size(); ++i) images.col(static_cast<Eigen::Index>(i)) = gens[i] * u;
    return min_norm_point(images, budget.inner_iterations, budget.inner_tol);
  }

  Matrix combine(const Vector& w) const {
    Matrix a = Matrix::Zero(gens.front().rows(), gens.front().cols());
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (w(static_cast<Eigen::Index>(i)) != 0.0) a += w(static_cast<Eigen::Index>(i)) * gens[i];
    return a;
  }
};

/// Alternating descent: optimal weights for u, then the least singular
/// direction of the combined matrix. Returns the best co-norm seen.
inline double alternating_descent(DirectionalMin& g, Vector u, int iterations, long& evals) {
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    const MinNormPoint mp = g(u);
    ++evals;
    const Matrix a = g.combine(mp.weights);
    const double s = co_norm(a);
    if (s >= best - 1e-15 * std::max(1.0, best)) {
      best = std::min(best, s);
      break;
    }
    best = s;
    u = least_right_singular_vector(a);
  }
  return best;
}

inline double ray_grid_upper(const MatrixPolytope& s, const ConormBudget& budget, long& evals) {
  double best = std::numeric_limits<double>::infinity();
  if (s.rays().empty()) return best;
  const auto ts = ray_grid(budget.ray_tmax, budget.ray_grid);
  const std::size_t nv = std::min<std::size_t>(s.vertices().size(), 16);
  for (std::size_t i = 0; i < nv; ++i)
    for (const auto& r : s.rays())
      for (double t : ts) {
        best = std::min(best, co_norm(s.vertices()[i] + t * r));
        ++evals;
      }
  return best;
}

struct AngularCell {
  double a = 0.0, b = 0.0;
  double lower = 0.0;
};

struct AngularOrder {
  bool operator()(const AngularCell& x, const AngularCell& y) const { return x.lower > y.lower; }
};

inline Enclosure angular_bnb(const std::vector<Matrix>& gens, const ConormBudget& budget, double extra_upper) {
  Enclosure enc;
  enc.method = ConormMethod::angular_bnb;
  enc.generators = gens.size();
  DirectionalMin g(gens, budget);
  double lip = 0.0;
  for (const auto& m : gens) lip = std::max(lip, spectral_norm(m));

  auto unit = [](double theta) {
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    return u;
  };

  Rng rng(derive_seed(budget.seed, "angular"));
  const int k = std::max(budget.sphere_directions, 4);
  const double offset = rng.uniform();
  const double width = std::numbers::pi / k;

  double best = extra_upper;
  std::vector<std::pair<double, double>> samples;  // (value, theta)
  std::priority_queue<AngularCell, std::vector<AngularCell>, AngularOrder> queue;
  auto push = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    const double v = g(unit(mid)).norm;
    ++enc.evaluations;
    best = std::min(best, v);
    samples.emplace_back(v, mid);
    queue.push(AngularCell{a, b, std::max(0.0, v - lip * 0.5 * (b - a))});
  };
  for (int i = 0; i < k; ++i) push((i + offset) * width, (i + 1 + offset) * width);

  // local refinement of the upper end from the best sampled directions
  std::sort(samples.begin(), samples.end());
  const int starts = std::min<int>(static_cast<int>(samples.size()), std::max(1, budget.refine_rounds));
  for (int i = 0; i < starts; ++i)
    best = std::min(best, alternating_descent(g, unit(samples[static_cast<std::size_t>(i)].second), 25,
                                              enc.evaluations));

  enc.converged = false;
  while (!queue.empty()) {
    const double tol = std::max(1e-12, budget.rel_tol * best);
    if (queue.top().lower >= best - tol || best <= 0.0) {
      enc.converged = true;
      break;
    }
    if (enc.evaluations >= budget.angular_max_evaluations) break;
    const AngularCell c = queue.top();
    queue.pop();
    const double mid = 0.5 * (c.a + c.b);
    push(c.a, mid);
    push(mid, c.b);
  }
  enc.upper = best;
  enc.lower = queue.empty() ? best : std::min(queue.top().lower, best);
  return enc;
}

inline Enclosure sphere_search(const std::vector<Matrix>& gens, const ConormBudget& budget, double extra_upper) {
  Enclosure enc;
  enc.method = ConormMethod::sphere_search;
  enc.certified = false;
  enc.generators = gens.size();
  const Eigen::Index n = gens.front().rows();
  DirectionalMin g(gens, budget);

  double best = extra_upper;
  double sampled_min = std::numeric_limits<double>::infinity();
  Vector best_u = Vector::Unit(n, 0);
  const int k = std::max(budget.sphere_directions, 1);
  Rng rng(derive_seed(budget.seed, "sphere-search"));
  for (int round = 0; round < std::max(budget.refine_rounds, 1); ++round) {
    std::vector<Vector> dirs;
    if (round == 0) {
      dirs = sphere_points(n, k, derive_seed(budget.seed, "sphere-search", 0));
    } else {
      const double radius = std::pow(0.5, round);
      for (int i = 0; i < k; ++i) {
        Vector u = best_u + radius * rng.normal_vector(n) / std::sqrt(static_cast<double>(n));
        dirs.push_back(u.normalized());
      }
    }
    std::vector<std::pair<double, std::size_t>> vals;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const double v = g(dirs[i]).norm;
      ++enc.evaluations;
      vals.emplace_back(v, i);
      sampled_min = std::min(sampled_min, v);
    }
    std::sort(vals.begin(), vals.end());
    const std::size_t starts = std::min<std::size_t>(vals.size(), 8);
    for (std::size_t i = 0; i < starts; ++i) {
      const double s = alternating_descent(g, dirs[vals[i].second], 25, enc.evaluations);
      if (s < best) best = s;
    }
    if (!vals.empty()) best_u = dirs[vals.front().second];
  }
  best = std::min(best, sampled_min);
  enc.upper = best;
  enc.lower = std::min(sampled_min, best);
  enc.converged = true;
  return enc;
}

}  // namespace detail

/// Enclosure of inf{ co_norm(A) : A in co(vertices) + cone(rays) }.
/// Rays are truncated at budget.ray_tmax. Small generator sets get a
/// certified lower end by simplex branch and bound (the co-norm is
/// 1-Lipschitz in the spectral norm); n = 2 gets certified bounds by
/// angular branch and bound over the unit circle; otherwise the lower end
/// only covers the sampled directions.
inline Enclosure polytope_conorm(const MatrixPolytope& s, const ConormBudget& budget = {}) {
  if (s.vertices().empty()) fail(ErrorKind::invalid_input, "polytope_conorm: empty vertex list");
  if (budget.sphere_directions <= 0 || budget.inner_iterations <= 0)
    fail(ErrorKind::invalid_input, "polytope_conorm: budget must be positive");

  if (s.is_singleton()) {
    const double v = co_norm(s.vertices().front());
    Enclosure enc;
    enc.lower = enc.upper = v;
    enc.evaluations = 1;
    enc.generators = 1;
    return enc;
  }

  std::vector<Matrix> gens = detail::expanded_generators(s, budget.ray_tmax);
  detail::dedupe(gens);

  if (s.dim() == 1) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& g : gens) {
      lo = std::min(lo, g(0, 0));
      hi = std::max(hi, g(0, 0));
    }
    Enclosure enc;
    enc.generators = gens.size();
    enc.evaluations = static_cast<long>(gens.size());
    enc.lower = enc.upper = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    return enc;
  }

  const double line_residual = detail::reduce_collinear(gens);
  if (gens.size() == 1) {
    const double v = co_norm(gens.front());
    Enclosure enc;
    enc.upper = v;
    enc.lower = std::max(0.0, v - line_residual);
    enc.evaluations = 1;
    enc.generators = 1;
    return enc;
  }

  Enclosure enc;
  if (gens.size() <= budget.bnb_max_generators) {
    enc = detail::simplex_bnb(gens, budget);
    if (!enc.converged) {
      long extra = 0;
      double up = detail::ray_grid_upper(s, budget, extra);
      enc.upper = std::min(enc.upper, up);
      enc.evaluations += extra;
    }
  } else {
    long extra = 0;
    const double grid_up = detail::ray_grid_upper(s, budget, extra);
    enc = s.dim() == 2 ? detail::angular_bnb(gens, budget, grid_up) : detail::sphere_search(gens, budget, grid_up);
    enc.evaluations += extra;
  }
  enc.lower = std::max(0.0, enc.lower - line_residual);
  enc.lower = std::min(enc.lower, enc.upper);
  return enc;
}

/// Co-norm enclosure over co(rays), each ray rescaled to unit operator
/// norm (so a ray I gives 1). Zero means a singular recession direction.
inline Enclosure recession_conorm(const MatrixPolytope& s, const ConormBudget& budget = {}) {
  if (s.rays().empty()) fail(ErrorKind::domain, "recession_conorm: no recession directions");
  std::vector<Matrix> dirs;
  for (const auto& r : s.rays()) dirs.push_back(r / spectral_norm(r));
  return polytope_conorm(MatrixPolytope(std::move(dirs)), budget);
}

// JSON: {"dim": n, "vertices": [[...]], "rays": [[...]]}, each matrix a
// row-major flat array. Nested row arrays are accepted on input.

inline nlohmann::json matrix_to_json(const Matrix& a) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index dim = 0) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::invalid_input, "matrix JSON must be a nonempty array");
  std::vector<double> flat;
  if (j.front().is_array()) {
    const std::size_t rows = j.size();
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != rows) fail(ErrorKind::invalid_input, "matrix JSON rows must form a square");
      for (const auto& e : row) flat.push_back(e.get<double>());
    }
  } else {
    for (const auto& e : j) flat.push_back(e.get<double>());
  }
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
  if (n * n != static_cast<Eigen::Index>(flat.size())) fail(ErrorKind::invalid_input, "matrix JSON is not square");
  if (dim != 0 && n != dim) fail(ErrorKind::invalid_input, "matrix JSON dimension mismatch");
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = flat[static_cast<std::size_t>(i * n + k)];
  if (!a.allFinite()) fail(ErrorKind::invalid_input, "matrix JSON has non-finite entries");
  return a;
}

inline nlohmann::json to_json(const MatrixPolytope& s) {
  nlohmann::json out;
  out["dim"] = s.dim();
  out["vertices"] = nlohmann::json::array();
  for (const auto& v : s.vertices()) out["vertices"].push_back(matrix_to_json(v));
  out["rays"] = nlohmann::json::array();
  for (const auto& r : s.rays()) out["rays"].push_back(matrix_to_json(r));
  return out;
}

inline MatrixPolytope polytope_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("vertices"))
    fail(ErrorKind::invalid_input, "polytope JSON needs \"dim\" and \"vertices\"");
  const auto dim = j.at("dim").get<Eigen::Index>();
  if (dim <= 0) fail(ErrorKind::invalid_input, "polytope JSON: dim must be positive");
  std::vector<Matrix> vertices, rays;
  for (const auto& v : j.at("vertices")) vertices.push_back(matrix_from_json(v, dim));
  if (j.contains("rays"))
    for (const auto& r : j.at("rays")) rays.push_back(matrix_from_json(r, dim));
  return MatrixPolytope(std::move(vertices), std::move(rays));
}

inline nlohmann::json to_json(const Enclosure& e) {
  return {{"lower", e.lower},
          {"upper", e.upper},
          {"method", std::string(to_string(e.method))},
          {"certified", e.certified},
          {"converged", e.converged},
          {"evaluations", e.evaluations},
          {"generators", e.generators}};
}

inline nlohmann::json to_json(const ConormBudget& b) {
  return {{"sphere_directions", b.sphere_directions},
          {"refine_rounds", b.refine_rounds},
          {"inner_iterations", b.inner_iterations},
          {"inner_tol", b.inner_tol},
          {"ray_tmax", b.ray_tmax},
          {"ray_grid", b.ray_grid},
          {"bnb_max_generators", b.bnb_max_generators},
          {"bnb_max_cells", b.bnb_max_cells},
          {"angular_max_evaluations", b.angular_max_evaluations},
          {"rel_tol", b.rel_tol},
          {"zero_tol", b.zero_tol},
          {"seed", b.seed}};
}

}  // namespace pjinv
