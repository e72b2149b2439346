#pragma once

#include <cstdio>
#include <string>
#include <utility>

#include "pjinv/linalg.hpp"

namespace pjinv {

enum class DifferenceScheme { forward, central };

/// Finite-difference Jacobian of fn at x with step h.
template <class Fn>
Matrix fd_jacobian(Fn&& fn, const Vector& x, double h, DifferenceScheme scheme = DifferenceScheme::forward) {
  if (!(h > 0.0)) fail(ErrorKind::domain, "finite difference step must be positive");
  const Vector fx = fn(x);
  Matrix jac(fx.size(), x.size());
  Vector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (scheme == DifferenceScheme::forward) {
      probe(j) = x(j) + h;
      jac.col(j) = (fn(probe) - fx) / h;
    } else {
      probe(j) = x(j) + h;
      const Vector plus = fn(probe);
      probe(j) = x(j) - h;
      jac.col(j) = (plus - fn(probe)) / (2.0 * h);
    }
    probe(j) = x(j);
  }
  return jac;
}

inline std::string format_point(const Vector& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x(i));
    out += buf;
  }
  return out + ")";
}

}  // namespace pjinv
