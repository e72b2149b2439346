// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "oracles.hpp"
#include "pjinv/cli.hpp"
#include "pjinv/pjinv.hpp"

using namespace pjinv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> body;
};

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kExampleFloor = 1.0 / (2.0 * std::sqrt(2.0));

Outcome c1() {
  const Builtin ex = builtin("example4");
  Rng rng(derive_seed(2024, "c1"));
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    const Vector x = v2(rng.uniform(-5, 5), k < 50 ? 0.0 : rng.uniform(-5, 5));
    worst = std::min(worst, regularity_index(ex.native, x).lower);
  }
  return {worst >= kExampleFloor - 1e-6, fmt("min lower %.9f over 200 points (50 on y=0), need >= %.7f", worst,
                                             kExampleFloor - 1e-6)};
}

Outcome c2() {
  const Builtin ex = builtin("example4");
  Rng rng(derive_seed(2024, "c2"));
  int bad_status = 0, bad_res = 0, bad_oracle = 0;
  double worst_res = 0, worst_gap = 0, lift_time = 0;
  for (int k = 0; k < 100; ++k) {
    const Vector y = v2(rng.uniform(-10, 10), rng.uniform(-10, 10));
    const auto t0 = std::chrono::steady_clock::now();
    const InversionCertificate c = global_invert(ex.map, ex.native, y);
    lift_time += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.status != LiftStatus::converged) {
      ++bad_status;
      continue;
    }
    worst_res = std::max(worst_res, c.final_residual);
    if (c.final_residual > 1e-8) ++bad_res;
    const Vector o = oracle::brute_inverse(ex.map, y, v2(-25, -15), v2(25, 15), 400);
    const double gap = (c.final_x - o).norm();
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6) ++bad_oracle;
  }
  return {bad_status + bad_res + bad_oracle == 0,
          fmt("100 targets: %d not converged, max residual %.2e, max oracle gap %.2e, lift time %.2f s", bad_status,
              worst_res, worst_gap, lift_time)};
}

Outcome c3() {
  std::string detail;
  bool ok = true;
  for (const char* label : {"absabs", "absabs:clarke"}) {
    const Builtin b = builtin(label);
    const Enclosure e = regularity_index(b.native, Vector::Zero(2));
    bool refused = false;
    try {
      local_invert(b.map, b.native, Vector::Zero(2), v2(0.1, 0.1));
    } catch (const Error& err) {
      refused = std::string(err.what()).find("not Jf-regular here") != std::string::npos;
    }
    ok = ok && e.upper <= 1e-9 && refused;
    detail += fmt("%s upper %.1e refused %s; ", label, e.upper, refused ? "yes" : "no");
  }
  return {ok, detail};
}

Outcome c4() {
  int violations = 0, total = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const char* label : {"example4", "identity", "linear:[[2,0],[0,3]]", "rotation"}) {
    const Builtin b = builtin(label);
    Rng rng(derive_seed(2024, "c4", total));
    for (int k = 0; k < 50; ++k, ++total) {
      // a few example4 points sit on the ray locus
      const bool on_axis = std::string(label) == "example4" && k % 5 == 0;
      const Vector x = v2(rng.uniform(-3, 3), on_axis ? 0.0 : rng.uniform(-3, 3));
      DiniConfig cfg;
      cfg.seed = derive_seed(2024, "c4dini", total);
      const double d = dini_lower(b.map, x, cfg).lower;
      const double a = regularity_index(b.native, x).lower;
      worst = std::min(worst, d - a);
      if (d < a - 5e-3) ++violations;
    }
  }
  return {violations == 0, fmt("%d points, %d violations, min (dini - alpha) %.3e", total, violations, worst)};
}

Outcome c5() {
  int violations = 0, skipped = 0;
  std::string detail;
  for (const char* label : {"example4", "identity", "linear:[[2,0],[0,3]]", "rotation", "cubic-diagonal", "absabs"}) {
    const Builtin b = builtin(label);
    Rng rng(derive_seed(2024, "c5", std::hash<std::string>{}(label)));
    int done = 0, local = 0;
    while (done < 500) {
      const Vector x = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const double beta = rng.uniform(0.01, 1.5);
      RegularityBudget rb;
      rb.ball.seed = rng.uniform() * 1e9;
      const double floor = ball_index(b.native, x, beta, rb).lower;
      if (!(floor > 1e-9)) {
        ++skipped;
        continue;
      }
      const Vector h = beta * (1.0 - 1e-12) * rng.ball_point(2);
      if (h.norm() == 0.0) continue;
      ++done;
      if ((b.map(x + h) - b.map(x)).norm() < floor * h.norm() * (1.0 - 1e-6)) ++local;
    }
    violations += local;
    detail += fmt("%s %d; ", label, local);
  }
  return {violations == 0, fmt("violations per map: %s(%d triples skipped with zero floor)", detail.c_str(), skipped)};
}

// Preimage search for example4 in the coordinates (x, s) with y = s^3, where
// the map (x - s^3, x + 3 s) is smooth and the unit ball is x^2 + s^6 <= 1.
struct Example4Cover {
  double cell = 0.02;
  std::unordered_map<long long, std::vector<std::pair<double, double>>> bins;

  long long key(double u, double v) const {
    const auto i = static_cast<long long>(std::floor(u / cell)), j = static_cast<long long>(std::floor(v / cell));
    return (i + 1000000) * 4000000 + (j + 1000000);
  }
  static Vector image(double x, double s) { return v2(x - s * s * s, x + 3 * s); }

  explicit Example4Cover(int grid) {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double x = -1.0 + 2.0 * i / (grid - 1), s = -1.0 + 2.0 * j / (grid - 1);
        if (x * x + std::pow(s, 6) > 1.0) continue;
        const Vector f = image(x, s);
        bins[key(f(0), f(1))].emplace_back(x, s);
      }
  }

  // residual of the best preimage found inside the closed unit ball
  double residual(const Vector& y) const {
    double best = std::numeric_limits<double>::infinity();
    std::pair<double, double> start{0, 0};
    for (int ring = 1; ring <= 4 && !std::isfinite(best); ++ring)
      for (int di = -ring; di <= ring; ++di)
        for (int dj = -ring; dj <= ring; ++dj) {
          const auto it = bins.find(key(y(0) + di * cell, y(1) + dj * cell));
          if (it == bins.end()) continue;
          for (const auto& p : it->second) {
            const double r = (image(p.first, p.second) - y).norm();
            if (r < best) {
              best = r;
              start = p;
            }
          }
        }
    if (!std::isfinite(best)) return best;
    double x = start.first, s = start.second;
    for (int it = 0; it < 40 && best > 1e-13; ++it) {
      const Vector r = image(x, s) - y;
      Eigen::Matrix2d j;
      j << 1, -3 * s * s, 1, 3;
      const Eigen::Vector2d d = j.inverse() * Eigen::Vector2d(r(0), r(1));
      double step = 1.0;
      bool moved = false;
      while (step > 1e-10) {
        const double xn = x - step * d(0), sn = s - step * d(1);
        const double rn = (image(xn, sn) - y).norm();
        if (xn * xn + std::pow(sn, 6) <= 1.0 && rn < best) {
          x = xn;
          s = sn;
          best = rn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    return best;
  }
};

Outcome c6() {
  const Builtin ex = builtin("example4");
  const RegularityProfile p = radial_profile(ex.native, Vector::Zero(2), 1.0);
  const BallCertificate cert = invertibility_ball(p, ex.map);
  const double sigma = cert.sigma_lower;
  const Example4Cover cover(801);
  const double radius = 0.95 * sigma;
  int targets = 0, uncovered = 0;
  double worst = 0;
  auto check = [&](const Vector& y) {
    ++targets;
    const double r = cover.residual(cert.center_image + y);
    worst = std::max(worst, r);
    if (!(r <= 1e-3)) ++uncovered;
  };
  const int m = 81;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Vector y = v2(-radius + 2 * radius * i / (m - 1), -radius + 2 * radius * j / (m - 1));
      if (y.norm() <= radius) check(y);
    }
  for (int k = 0; k < 720; ++k) {
    const double th = 2 * std::numbers::pi * k / 720;
    check(radius * v2(std::cos(th), std::sin(th)));
  }
  const bool ok = sigma >= 0.9 * kExampleFloor && uncovered == 0;
  return {ok, fmt("sigma %.6f (need >= %.6f), %d targets in f(0)+0.95 sigma B, %d uncovered, worst residual %.2e",
                  sigma, 0.9 * kExampleFloor, targets, uncovered, worst)};
}

Outcome c7() {
  const Builtin ex = builtin("example4"), id = builtin("identity");
  std::string detail;
  bool ok = true;
  auto run = [&](const Builtin& b, const char* eta, double r_max, bool expect) {
    const HadamardVerdict v = hadamard_certify(b.native, b.map, parse_eta(eta), r_max);
    ok = ok && v.certified_global == expect;
    detail += fmt("%s %s R=%g: %s (integral %.6f); ", b.map.label.c_str(), eta, r_max,
                  v.certified_global ? "certified" : "rejected", v.integral_lower);
    return v;
  };
  run(ex, "const:0.3535", 100, true);
  run(ex, "inv:0.3535", 100, true);
  run(id, "const:1", 10, true);
  run(id, "inv:1", 10, true);
  for (double r : {5.0, 10.0, 20.0}) {
    const HadamardVerdict v = run(id, "exp:1", r, false);
    ok = ok && std::abs(v.integral_lower - (1.0 - std::exp(-r))) <= 1e-6;
  }
  return {ok, detail};
}

Outcome c8() {
  int fails = 0, total = 0;
  double worst = 0;
  for (const char* label : {"identity", "linear:[[2,0],[0,3]]", "linear:[[2,1],[0,3]]", "rotation", "cubic-diagonal"}) {
    const Builtin b = builtin(label);
    Rng rng(derive_seed(2024, "c8", total));
    for (int k = 0; k < 200; ++k, ++total) {
      const Vector u = v2(rng.uniform(-3, 3), rng.uniform(-3, 3)), v = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const MeanValueReport r = mean_value_audit(b.map, b.native, u, v);
      worst = std::max(worst, r.ratio);
      if (!r.passes) ++fails;
    }
  }
  const Builtin ex = builtin("example4");
  Rng rng(derive_seed(2024, "c8", 99));
  auto band = [](const Vector& p) { return std::abs(p(1)) < 1e-3; };
  for (int k = 0; k < 200; ++k, ++total) {
    const Vector u = v2(rng.uniform(-3, 3), rng.uniform(-3, 3)), v = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const MeanValueReport r = mean_value_audit(ex.map, ex.native, u, v, 64, band);
    worst = std::max(worst, r.ratio);
    if (!r.passes) ++fails;
  }
  return {fails == 0, fmt("%d pairs, %d failures, max dist/|u-v| %.2e (tol 1e-3)", total, fails, worst)};
}

Outcome c9() {
  int fails = 0, total = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const char* label : {"example4", "identity", "linear:[[2,0],[0,3]]", "rotation", "cubic-diagonal", "absabs",
                            "absabs:clarke"}) {
    const Builtin b = builtin(label);
    Rng rng(derive_seed(2024, "c9", total));
    for (int k = 0; k < 100; ++k, ++total) {
      const Vector a = v2(rng.uniform(-3, 3), rng.uniform(-3, 3)), c = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      DiniConfig cfg;
      cfg.seed = derive_seed(2024, "c9dini", total);
      const MviReport r = mvi_audit(b.map, straight_path(b.map, a, c, 17), cfg);
      if (r.rhs_floor > 0) worst = std::min(worst, r.lhs / r.rhs_floor);
      if (!r.passes) ++fails;
    }
  }
  return {fails == 0, fmt("%d paths, %d failures, min length/floor %.6f", total, fails, worst)};
}

Outcome c10() {
  int alpha_bad = 0, inv_bad = 0, points = 0, inversions = 0;
  double worst_alpha = 0, worst_inv = 0;
  for (const char* label : {"identity", "linear:[[2,0],[0,3]]", "linear:[[2,1],[0,3]]", "rotation", "cubic-diagonal"}) {
    const Builtin b = builtin(label);
    Rng rng(derive_seed(2024, "c10", points));
    for (int k = 0; k < 200; ++k, ++points) {
      const Vector x = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const Matrix j = b.map.analytic_jacobian(x);
      const double want = 1.0 / oracle::spectral_norm_eig(j.inverse());
      const Enclosure e = regularity_index(b.native, x);
      const double gap = std::max(std::abs(e.lower - want), std::abs(e.upper - want));
      worst_alpha = std::max(worst_alpha, gap);
      if (gap > 1e-8) ++alpha_bad;
    }
    for (int k = 0; k < 8; ++k, ++inversions) {
      const Vector y = v2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const InversionCertificate c = global_invert(b.map, b.native, y);
      const Vector o = oracle::newton_continuation(b.map, b.map.analytic_jacobian, Vector::Zero(2), y);
      const double gap = c.status == LiftStatus::converged ? (c.final_x - o).norm() : 1.0;
      worst_inv = std::max(worst_inv, gap);
      if (gap > 1e-9) ++inv_bad;
    }
  }
  return {alpha_bad + inv_bad == 0, fmt("%d points max |alpha - 1/|df^-1|| %.2e; %d inversions max gap %.2e", points,
                                        worst_alpha, inversions, worst_inv)};
}

std::string cli_bytes(std::vector<std::string> args) {
  args.insert(args.begin(), "pjinv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str();
}

Outcome c11() {
  const std::vector<std::vector<std::string>> cmds = {
      {"index", "--map", "(x - y, x + 3*cbrt(y))", "--at", "0,1"},
      {"invert", "--map", "example4", "--target", "0,4"},
      {"invert", "--map", "rotation", "--target", "2,-1", "--format", "csv"},
      {"certify", "--map", "example4", "--eta", "const:0.3535", "--rmax", "100"},
      {"profile", "--map", "example4", "--rho", "1"},
      {"falsify", "--map", "(abs(x), abs(y))", "--pj", "sampled", "--at", "0,0"},
      {"dini", "--map", "absabs", "--at", "0.5,0"},
      {"audit", "--map", "example4", "--at", "0.3,0.2", "--budget", "trials=50,mv_pairs=4"}};
  int same = 0, total = 0;
  for (const auto& c : cmds)
    for (const char* seed : {"3", "12345"}) {
      auto args = c;
      args.insert(args.end(), {"--seed", seed, "--no-timestamp"});
      ++total;
      if (cli_bytes(args) == cli_bytes(args)) ++same;
    }
  // library level: seeded ball samples and lifts repeat exactly
  const Builtin ex = builtin("example4");
  const BallSample s1 = ball_sample(ex.native, v2(1, 0.1), 0.5, BallBudget{.seed = 77});
  const BallSample s2 = ball_sample(ex.native, v2(1, 0.1), 0.5, BallBudget{.seed = 77});
  bool lib = s1.points.size() == s2.points.size();
  for (std::size_t i = 0; lib && i < s1.points.size(); ++i) lib = s1.points[i] == s2.points[i];
  lib = lib && to_json(global_invert(ex.map, ex.native, v2(5, -7))).dump() ==
                   to_json(global_invert(ex.map, ex.native, v2(5, -7))).dump();
  return {same == total && lib,
          fmt("%d/%d CLI reports byte-identical, library repeat %s", same, total, lib ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "example4 regularity floor", 5, c1},
      {2, "example4 global inversion", 30, c2},
      {3, "degenerate detection", 0, c3},
      {4, "dini lower vs regularity index", 0, c4},
      {5, "growth bound", 0, c5},
      {6, "invertibility ball", 60, c6},
      {7, "hadamard certifier", 0, c7},
      {8, "mean-value inclusion", 0, c8},
      {9, "mean-value inequality on paths", 0, c9},
      {10, "smooth consistency", 0, c10},
      {11, "determinism", 0, c11},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2f s", secs);
    if (c.time_limit > 0) {
      timing += fmt(" (limit %.0f s)", c.time_limit);
      if (secs >= c.time_limit) pass = false;
    }
    if (!pass) ++failed;
    std::printf("%s criterion %2d %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
