#pragma once

#include <algorithm>
#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pjinv/error.hpp"

namespace pjinv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Matrix& a) { return a.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    fail(ErrorKind::invalid_input, std::string(what) + ": matrix must be square and nonempty");
  if (!a.allFinite()) fail(ErrorKind::invalid_input, std::string(what) + ": non-finite entry");
}

inline Vector singular_values(const Matrix& a) {
  if (a.rows() == 2 && a.cols() == 2) {
    // closed form, avoids the Jacobi sweep in the hot 2x2 path
    const double p = a(0, 0), q = a(0, 1), r = a(1, 0), s = a(1, 1);
    const double e = 0.5 * (p + s), f = 0.5 * (p - s);
    const double g = 0.5 * (r + q), h = 0.5 * (r - q);
    const double qq = std::hypot(e, h), rr = std::hypot(f, g);
    Vector out(2);
    out << qq + rr, std::abs(qq - rr);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

/// Smallest singular value, i.e. inf over unit u of |Au|.
inline double co_norm(const Matrix& a) {
  require_square_finite(a, "co_norm");
  const Vector s = singular_values(a);
  return s(s.size() - 1);
}

/// Right singular vector paired with the smallest singular value.
inline Vector least_right_singular_vector(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().col(a.cols() - 1);
}

/// Row-major flattening, used for hashing and affine-rank checks.
inline Vector flatten(const Matrix& a) {
  Vector v(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

/// Result of a minimum-norm-point computation over co{points}.
struct MinNormPoint {
  Vector point;
  Vector weights;
  double norm = 0.0;
  int iterations = 0;
};

/// Wolfe's minimum-norm-point algorithm over the convex hull of the columns
/// of `points`. Exact up to rounding; the active set never exceeds dim + 1.
inline MinNormPoint min_norm_point(const Matrix& points, int max_iterations = 200,
                                   double tol = 1e-10) {
  const Eigen::Index dim = points.rows();
  const Eigen::Index m = points.cols();
  if (m == 0) fail(ErrorKind::invalid_input, "min_norm_point: no points");

  MinNormPoint out;
  out.weights = Vector::Zero(m);

  // start from the point of smallest norm; ties go to the lowest index
  Eigen::Index start = 0;
  double best = points.col(0).squaredNorm();
  for (Eigen::Index i = 1; i < m; ++i) {
    const double v = points.col(i).squaredNorm();
    if (v < best) {
      best = v;
      start = i;
    }
  }
  if (m == 1) {
    out.weights(0) = 1.0;
    out.point = points.col(0);
    out.norm = out.point.norm();
    return out;
  }

  std::vector<Eigen::Index> active{start};
  Vector lambda(1);
  lambda(0) = 1.0;
  Vector x = points.col(start);

  const double scale = std::max(1.0, points.cwiseAbs().maxCoeff());
  const double eps = 1e-14 * scale * scale;

  auto affine_min = [&](const std::vector<Eigen::Index>& set) {
    // minimise |sum a_i p_i| subject to sum a_i = 1 via the KKT system
    const Eigen::Index k = static_cast<Eigen::Index>(set.size());
    Matrix kkt = Matrix::Zero(k + 1, k + 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j)
        kkt(i, j) = points.col(set[i]).dot(points.col(set[j]));
      kkt(i, k) = 1.0;
      kkt(k, i) = 1.0;
    }
    Vector rhs = Vector::Zero(k + 1);
    rhs(k) = 1.0;
    Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return Vector(sol.head(k));
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    out.iterations = iter + 1;
    // major cycle: most violating point
    Eigen::Index j = 0;
    double best_dot = points.col(0).dot(x);
    for (Eigen::Index i = 1; i < m; ++i) {
      const double d = points.col(i).dot(x);
      if (d < best_dot) {
        best_dot = d;
        j = i;
      }
    }
    const double xx = x.squaredNorm();
    if (xx - best_dot <= tol * std::max(xx, eps) + eps) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    if (static_cast<Eigen::Index>(active.size()) > dim) break;
    active.push_back(j);
    lambda.conservativeResize(lambda.size() + 1);
    lambda(lambda.size() - 1) = 0.0;

    // minor cycles: project back into the simplex when the affine minimiser
    // leaves it
    for (int minor = 0; minor < 4 * static_cast<int>(dim + 2); ++minor) {
      Vector alpha = affine_min(active);
      if ((alpha.array() > 1e-12).all()) {
        lambda = alpha;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha(i) <= 1e-12) {
          const double denom = lambda(i) - alpha(i);
          if (denom > 0) theta = std::min(theta, lambda(i) / denom);
        }
      }
      lambda = theta * alpha + (1.0 - theta) * lambda;
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_lambda;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > 1e-12) {
          kept.push_back(active[i]);
          kept_lambda.push_back(lambda(i));
        }
      }
      if (kept.empty()) {
        kept.push_back(active.back());
        kept_lambda.push_back(1.0);
      }
      active = kept;
      lambda = Eigen::Map<Vector>(kept_lambda.data(), static_cast<Eigen::Index>(kept_lambda.size()));
      lambda /= lambda.sum();
    }
    Vector next = Vector::Zero(dim);
    for (Eigen::Index i = 0; i < lambda.size(); ++i) next += lambda(i) * points.col(active[i]);
    if (next.squaredNorm() >= xx - eps * 1e-6 && iter > 0) {
      x = next;
      break;
    }
    x = next;
  }

  for (std::size_t i = 0; i < active.size(); ++i) out.weights(active[i]) = lambda(static_cast<Eigen::Index>(i));
  out.point = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < m; ++i)
    if (out.weights(i) != 0.0) out.point += out.weights(i) * points.col(i);
  out.norm = out.point.norm();
  return out;
}

/// Lower bound on the minimum norm over co{points} from the Wolfe gap:
/// for any unit direction z, min_i <z, p_i> bounds the distance from below.
inline double min_norm_dual_bound(const Matrix& points, const Vector& x) {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  const Vector z = x / nx;
  double lo = points.col(0).dot(z);
  for (Eigen::Index i = 1; i < points.cols(); ++i) lo = std::min(lo, points.col(i).dot(z));
  return std::max(0.0, lo);
}

}  // namespace pjinv
