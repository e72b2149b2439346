#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"
#include "pjinv/error.hpp"
#include "pjinv/inversion.hpp"
#include "pjinv/regularity.hpp"

namespace pjinv {

struct SearchBox {
  Vector lo;
  Vector hi;
};

struct CompactBudget {
  int grid_points = 10201;  // total grid size, split evenly across dimensions
  int polish_starts = 8;    // best grid points tried as Newton starts
  double tol = 1e-9;
  LocalInvertConfig local;
};

struct PreimageResult {
  Vector target;
  bool found = false;
  Vector x;
  double residual = std::numeric_limits<double>::infinity();
  Enclosure index;
  std::string note;
};

struct CompactReport {
  double alpha_K_lower = std::numeric_limits<double>::infinity();
  std::vector<PreimageResult> points;
  int missing = 0;
  int grid_per_axis = 0;
  std::vector<std::string> caveats;
};

/// Finds a preimage of each K point inside the box (grid search polished by
/// local_invert) and takes the minimum regularity lower bound there.
inline CompactReport compact_set_check(const PseudoJacobianMap& jac, const MappingSpec& f,
                                       const std::vector<Vector>& k_points, const SearchBox& box,
                                       const CompactBudget& budget = {}) {
  const Eigen::Index n = f.dim;
  if (box.lo.size() != n || box.hi.size() != n || !(box.lo.array() <= box.hi.array()).all() || !box.lo.allFinite() ||
      !box.hi.allFinite())
    fail(ErrorKind::invalid_input, "compact_set_check: search box must be bounded and match the dimension");
  CompactReport rep;
  const int per_axis = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(budget.grid_points),
                                                                          1.0 / static_cast<double>(n)) + 1e-9)));
  rep.grid_per_axis = per_axis;
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);

  std::vector<Vector> xs(total), ys(total);
  for (std::size_t g = 0; g < total; ++g) {
    Vector x(n);
    std::size_t rest = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      x(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * k / (per_axis - 1);
    }
    xs[g] = x;
    ys[g] = f(x);
  }

  LocalInvertConfig lc = budget.local;
  lc.tol = budget.tol;
  for (const auto& y : k_points) {
    if (y.size() != n) fail(ErrorKind::invalid_input, "compact_set_check: K point dimension mismatch");
    PreimageResult pr;
    pr.target = y;
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(budget.polish_starts, 1)), total);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) { return (ys[a] - y).norm() < (ys[b] - y).norm(); });
    for (std::size_t s = 0; s < keep && !pr.found; ++s) {
      try {
        const Vector x = local_invert(f, jac, xs[order[s]], y, lc);
        if ((x.array() >= box.lo.array() - 1e-12).all() && (x.array() <= box.hi.array() + 1e-12).all()) {
          pr.found = true;
          pr.x = x;
          pr.residual = (f(x) - y).norm();
        } else {
          pr.note = "polished point left the search box";
        }
      } catch (const Error& e) {
        pr.note = e.what();
      }
    }
    if (pr.found) {
      pr.index = regularity_index(jac, pr.x, lc.conorm);
      pr.note.clear();
      rep.alpha_K_lower = std::min(rep.alpha_K_lower, pr.index.lower);
    } else {
      ++rep.missing;
      if (pr.note.empty()) pr.note = "no preimage found in the search box";
    }
    rep.points.push_back(std::move(pr));
  }
  if (rep.missing == static_cast<int>(k_points.size())) rep.alpha_K_lower = 0.0;
  rep.caveats = {"preimage search is limited to the given box and " + std::to_string(total) + " grid points",
                 "only the supplied finite K is checked; the characterization quantifies over every compact set"};
  return rep;
}

inline nlohmann::json to_json(const CompactReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json j = {{"target", vector_to_json(p.target)}, {"found", p.found}};
    if (p.found) {
      j["x"] = vector_to_json(p.x);
      j["residual"] = p.residual;
      j["index"] = to_json(p.index);
    } else {
      j["note"] = p.note;
    }
    pts.push_back(j);
  }
  return {{"alpha_K_lower", r.alpha_K_lower},
          {"missing", r.missing},
          {"grid_per_axis", r.grid_per_axis},
          {"points", pts},
          {"caveats", r.caveats}};
}

}  // namespace pjinv
