#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pjinv/error.hpp"
#include "pjinv/linalg.hpp"
#include "pjinv/mapdsl.hpp"
#include "pjinv/matrixset.hpp"
#include "pjinv/pseudojac.hpp"

namespace pjinv {

/// A named mapping with its native pseudo-Jacobian.
struct Builtin {
  MappingSpec map;
  PseudoJacobianMap native;
  std::string source;                                // equivalent DSL source, empty if none
  bool smooth = false;                               // C^1 with singleton Jacobian
  std::function<Vector(const Vector&)> exact_inverse;  // empty if none
};

namespace detail {

inline Builtin make_linear(Matrix a, std::string label) {
  require_square_finite(a, "linear map");
  Builtin b;
  b.map.dim = a.rows();
  b.map.label = label;
  b.map.evaluate = [a](const Vector& x) -> Vector { return a * x; };
  b.map.analytic_jacobian = [a](const Vector&) -> Matrix { return a; };
  b.native = analytic_pseudo_jacobian(b.map);
  b.native.label = label;
  b.smooth = true;
  if (co_norm(a) > 0.0) {
    const Matrix inv = a.inverse();
    b.exact_inverse = [inv](const Vector& y) -> Vector { return inv * y; };
  }
  return b;
}

inline Eigen::Index parse_dim_suffix(std::string_view label, std::string_view base, Eigen::Index fallback) {
  if (label.size() == base.size()) return fallback;
  const std::string digits(label.substr(base.size() + 1));
  char* end = nullptr;
  const long n = std::strtol(digits.c_str(), &end, 10);
  if (digits.empty() || *end != '\0' || n < 1 || n > 16)
    fail(ErrorKind::unknown_identifier, "bad dimension suffix in map label '" + std::string(label) + "'");
  return static_cast<Eigen::Index>(n);
}

inline Builtin make_example4() {
  Builtin b;
  b.map.dim = 2;
  b.map.label = "example4";
  b.map.evaluate = [](const Vector& p) -> Vector {
    Vector out(2);
    out(0) = p(0) - p(1);
    out(1) = p(0) + 3.0 * std::cbrt(p(1));
    return out;
  };
  b.source = "(x - y, x + 3*cbrt(y))";
  b.native = finite_set_pseudo_jacobian(
      2,
      [](const Vector& p) {
        Matrix a(2, 2);
        a << 1.0, -1.0, 1.0, 0.0;
        if (p(1) != 0.0) {
          const double c = std::cbrt(p(1));
          a(1, 1) = 1.0 / (c * c);
          return MatrixPolytope::singleton(a);
        }
        Matrix ray = Matrix::Zero(2, 2);
        ray(1, 1) = 1.0;
        return MatrixPolytope({a}, {ray});
      },
      "example4", true,
      [](const Vector& x, double beta) {
        std::vector<Vector> out;
        if (std::abs(x(1)) < beta) out.push_back(Vector{{x(0), 0.0}});
        return out;
      });
  return b;
}

inline MatrixPolytope sign_polytope(const Vector& p) {
  std::vector<double> sx = p(0) > 0 ? std::vector<double>{1.0} : p(0) < 0 ? std::vector<double>{-1.0}
                                                                             : std::vector<double>{1.0, -1.0};
  std::vector<double> sy = p(1) > 0 ? std::vector<double>{1.0} : p(1) < 0 ? std::vector<double>{-1.0}
                                                                             : std::vector<double>{1.0, -1.0};
  std::vector<Matrix> verts;
  for (double a : sx)
    for (double c : sy) {
      Matrix m = Matrix::Zero(2, 2);
      m(0, 0) = a;
      m(1, 1) = c;
      verts.push_back(m);
    }
  return MatrixPolytope(std::move(verts));
}

inline Builtin make_absabs(bool clarke) {
  Builtin b;
  b.map.dim = 2;
  b.map.label = clarke ? "absabs:clarke" : "absabs";
  b.map.evaluate = [](const Vector& p) -> Vector { return p.cwiseAbs(); };
  b.source = "(abs(x), abs(y))";
  // Both representations share the corner generators; the Clarke form is
  // the interval box [-1,1] per kink coordinate, whose hull is the same set.
  b.native = finite_set_pseudo_jacobian(2, sign_polytope, b.map.label, true, [](const Vector& x, double beta) {
    std::vector<Vector> out;
    if (std::abs(x(0)) < beta) out.push_back(Vector{{0.0, x(1)}});
    if (std::abs(x(1)) < beta) out.push_back(Vector{{x(0), 0.0}});
    if (x.norm() < beta) out.push_back(Vector::Zero(2));
    return out;
  });
  if (clarke) b.native.kind = PseudoJacobianKind::finite_set;
  return b;
}

inline Matrix rotation_matrix(double phi) {
  Matrix r(2, 2);
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

/// Swirl f(p) = R(phi(|p|^2)) p with phi(s) = (pi/2) s / (1 + s).
inline Builtin make_rotation() {
  constexpr double k = std::numbers::pi / 2.0;
  Builtin b;
  b.map.dim = 2;
  b.map.label = "rotation";
  b.map.evaluate = [](const Vector& p) -> Vector {
    const double s = p.squaredNorm();
    return rotation_matrix(k * s / (1.0 + s)) * p;
  };
  b.map.analytic_jacobian = [](const Vector& p) -> Matrix {
    const double s = p.squaredNorm();
    const Matrix r = rotation_matrix(k * s / (1.0 + s));
    Matrix j(2, 2);
    j << 0.0, -1.0, 1.0, 0.0;
    const double dphi = k / ((1.0 + s) * (1.0 + s));
    return r * (Matrix::Identity(2, 2) + 2.0 * dphi * j * p * p.transpose());
  };
  b.native = analytic_pseudo_jacobian(b.map);
  b.native.label = "rotation";
  // the co-norm depends on |p| only and is smallest on |p| = 1
  b.native.locus_probe = [](const Vector& x, double beta) {
    std::vector<Vector> out;
    const double r = x.norm();
    if (r == 0.0) return out;
    const double shrink = beta * (1.0 - 1e-12);
    for (double target : {1.0, r - shrink, r + shrink})
      if (target > 0.0 && std::abs(target - r) < beta) out.push_back(x * (target / r));
    return out;
  };
  b.smooth = true;
  b.exact_inverse = [](const Vector& q) -> Vector {
    const double s = q.squaredNorm();
    return rotation_matrix(-k * s / (1.0 + s)) * q;
  };
  return b;
}

inline Builtin make_cubic_diagonal(Eigen::Index n) {
  Builtin b;
  b.map.dim = n;
  b.map.label = n == 2 ? "cubic-diagonal" : "cubic-diagonal:" + std::to_string(n);
  b.map.evaluate = [](const Vector& p) -> Vector { return p + p.cwiseProduct(p).cwiseProduct(p); };
  b.map.analytic_jacobian = [](const Vector& p) -> Matrix {
    return (Vector::Ones(p.size()) + 3.0 * p.cwiseProduct(p)).asDiagonal();
  };
  b.native = analytic_pseudo_jacobian(b.map);
  b.native.label = b.map.label;
  // 1 + 3 x_i^2 is smallest where x_i = 0
  b.native.locus_probe = [](const Vector& x, double beta) {
    std::vector<Vector> out;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (std::abs(x(i)) < beta) {
        Vector p = x;
        p(i) = 0.0;
        out.push_back(p);
      }
    return out;
  };
  b.smooth = true;
  b.exact_inverse = [](const Vector& y) -> Vector {
    Vector x(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      // real root of t^3 + t - y (Cardano, single real root)
      const double q = y(i) / 2.0;
      const double d = std::sqrt(q * q + 1.0 / 27.0);
      x(i) = std::cbrt(q + d) + std::cbrt(q - d);
    }
    return x;
  };
  if (n <= 4) {
    const auto vars = dsl::default_variables(static_cast<std::size_t>(n));
    std::string src = "(";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) src += ", ";
      src += vars[i] + " + " + vars[i] + "^3";
    }
    b.source = src + ")";
  }
  return b;
}

}  // namespace detail

inline std::vector<std::string> builtin_labels() {
  return {"example4", "absabs", "absabs:clarke", "identity", "rotation", "cubic-diagonal", "linear:<matrix-json>"};
}

inline bool is_builtin_label(std::string_view label) {
  auto starts = [&](std::string_view base) {
    return label == base || (label.size() > base.size() && label.substr(0, base.size()) == base &&
                             label[base.size()] == ':');
  };
  return label == "example4" || label == "absabs" || label == "absabs:clarke" || label == "rotation" ||
         starts("identity") || starts("cubic-diagonal") || starts("linear");
}

/// Resolves a registry label; throws unknown-identifier otherwise.
inline Builtin builtin(std::string_view label) {
  if (label == "example4") return detail::make_example4();
  if (label == "absabs") return detail::make_absabs(false);
  if (label == "absabs:clarke") return detail::make_absabs(true);
  if (label == "rotation") return detail::make_rotation();
  if (label.substr(0, 8) == "identity") {
    const Eigen::Index n = detail::parse_dim_suffix(label, "identity", 2);
    Builtin b = detail::make_linear(Matrix::Identity(n, n), std::string(label));
    if (n <= 4) {
      const auto vars = dsl::default_variables(static_cast<std::size_t>(n));
      std::string src = "(";
      for (std::size_t i = 0; i < vars.size(); ++i) src += (i ? ", " : "") + vars[i];
      b.source = src + ")";
    }
    return b;
  }
  if (label.substr(0, 14) == "cubic-diagonal") return detail::make_cubic_diagonal(detail::parse_dim_suffix(label, "cubic-diagonal", 2));
  if (label.substr(0, 7) == "linear:") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(label.substr(7));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::invalid_input, std::string("linear map: bad matrix JSON: ") + e.what());
    }
    return detail::make_linear(matrix_from_json(j), std::string(label));
  }
  fail(ErrorKind::unknown_identifier, "unknown map label '" + std::string(label) + "'");
}

/// Wraps a DSL expression as a MappingSpec (no analytic Jacobian).
inline MappingSpec mapping_from_expr(dsl::MappingExpr expr, std::string label) {
  MappingSpec m;
  m.dim = expr.arity();
  m.label = std::move(label);
  m.evaluate = [e = std::move(expr)](const Vector& x) { return e.evaluate(x); };
  return m;
}

}  // namespace pjinv
