#pragma once

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pjinv/pjinv.hpp"

namespace pjinv::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
  std::string command;
  std::string map;
  std::string pj = "native";
  std::optional<Vector> at, target, anchor;
  double rho = 1.0;
  double rmax = 100.0;
  std::string eta = "profile";
  std::uint64_t seed = 0;
  std::string seed_source = "default";
  std::map<std::string, std::string> budget;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
  int threads = 1;
  std::string trace;
  bool timestamp = true;
};

struct Outcome {
  int exit_code = 0;
  std::string report;            // main artifact text
  std::optional<std::string> trace;  // CSV step trace for invert
};

inline Vector parse_point(const std::string& text, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v))
      fail(ErrorKind::usage, "flag " + flag + ": bad coordinate '" + item + "'");
    vals.push_back(v);
  }
  if (vals.empty()) fail(ErrorKind::usage, "flag " + flag + ": empty point");
  Vector out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
  return out;
}

inline std::map<std::string, std::string> parse_budget(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      fail(ErrorKind::usage, "flag --budget: expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

/// Parses argv into a RunConfig. Throws Error(usage) naming the flag;
/// returns nullopt after printing help.
inline std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& help_out = std::cout) {
  RunConfig c;
  CLI::App app{"pseudo-Jacobian regularity, certification and inversion toolkit", "pjinv"};
  app.set_version_flag("--version", kVersion);
  std::string at, target, anchor, budget, seed;
  bool no_ts = false;
  app.add_option("command", c.command, "index | profile | invert | certify | dini | falsify | audit")
      ->required()
      ->check(CLI::IsMember({"index", "profile", "invert", "certify", "dini", "falsify", "audit"}));
  app.add_option("--map", c.map, "registry label, DSL source, or @file")->required();
  app.add_option("--pj", c.pj, "native | sampled | file:path");
  app.add_option("--at", at, "point x1,x2,...");
  app.add_option("--target", target, "target point for invert");
  app.add_option("--anchor", anchor, "anchor point for invert (default origin)");
  app.add_option("--rho", c.rho, "profile radius");
  app.add_option("--rmax", c.rmax, "certification radius");
  app.add_option("--eta", c.eta, "const:c | inv:c | exp:c | profile");
  app.add_option("--seed", seed, "64-bit seed (fallback PJINV_SEED, then 0)");
  app.add_option("--budget", budget, "comma separated key=value overrides");
  app.add_option("--tol", c.tol, "residual tolerance");
  app.add_option("--out", c.out, "output path (default stdout)");
  app.add_option("--format", c.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--trace", c.trace, "csv: emit the lift step trace")->check(CLI::IsMember({"csv"}));
  app.add_flag("--no-timestamp", no_ts, "omit the timestamp from reports");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    help_out << kVersion << "\n";
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::usage, e.what());
  }
  c.timestamp = !no_ts;
  if (!at.empty()) c.at = parse_point(at, "--at");
  if (!target.empty()) c.target = parse_point(target, "--target");
  if (!anchor.empty()) c.anchor = parse_point(anchor, "--anchor");
  if (!budget.empty()) c.budget = parse_budget(budget);
  auto parse_seed = [](const std::string& s, const std::string& where) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 0);
    if (s.empty() || *end != '\0' || errno != 0 || s.front() == '-')
      fail(ErrorKind::usage, where + ": seed must be an unsigned 64-bit integer, got '" + s + "'");
    return static_cast<std::uint64_t>(v);
  };
  if (!seed.empty()) {
    c.seed = parse_seed(seed, "flag --seed");
    c.seed_source = "flag";
  } else if (const char* env = std::getenv("PJINV_SEED"); env && *env) {
    c.seed = parse_seed(env, "PJINV_SEED");
    c.seed_source = "env";
  }
  if (!(c.rho >= 0.0)) fail(ErrorKind::usage, "flag --rho: must be nonnegative");
  if (!(c.rmax > 0.0)) fail(ErrorKind::usage, "flag --rmax: must be positive");
  if (c.tol && !(*c.tol > 0.0)) fail(ErrorKind::usage, "flag --tol: must be positive");
  if (c.pj != "native" && c.pj != "sampled" && c.pj.rfind("file:", 0) != 0)
    fail(ErrorKind::usage, "flag --pj: expected native, sampled or file:path");
  return c;
}

namespace detail {

class BudgetReader {
 public:
  explicit BudgetReader(const std::map<std::string, std::string>& b) : b_(b) {}

  template <class T>
  void read(const std::string& key, T& dst) {
    used_.insert(key);
    const auto it = b_.find(key);
    if (it == b_.end()) return;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v) || v <= 0.0)
      fail(ErrorKind::usage, "flag --budget: key '" + key + "' needs a positive number, got '" + it->second + "'");
    dst = static_cast<T>(v);
  }

  void finish() const {
    for (const auto& [k, v] : b_)
      if (!used_.count(k)) fail(ErrorKind::usage, "flag --budget: unknown key '" + k + "'");
  }

 private:
  const std::map<std::string, std::string>& b_;
  std::set<std::string> used_;
};

struct Budgets {
  RegularityBudget reg;
  DiniConfig dini;
  FalsifyConfig falsify;
  SampledConfig sampled;
  StepConfig step;
  int trials = 500;
  double beta = 0.5;
  int mv_pairs = 20;
};

inline Budgets read_budgets(const RunConfig& c) {
  Budgets b;
  BudgetReader r(c.budget);
  r.read("directions", b.reg.conorm.sphere_directions);
  r.read("rounds", b.reg.conorm.refine_rounds);
  r.read("ray_tmax", b.reg.conorm.ray_tmax);
  r.read("max_cells", b.reg.conorm.bnb_max_cells);
  r.read("ball_points", b.reg.ball.points);
  r.read("radii", b.reg.radii);
  r.read("sphere_points", b.reg.sphere_points);
  r.read("dini_directions", b.dini.directions);
  r.read("pairs", b.falsify.pairs);
  r.read("trials", b.trials);
  r.read("beta", b.beta);
  r.read("c", b.step.c);
  r.read("max_steps", b.step.max_steps);
  r.read("perturbations", b.sampled.perturbations);
  r.read("sample_radius", b.sampled.radius);
  r.read("mv_pairs", b.mv_pairs);
  r.finish();
  if (b.reg.radii < 2) fail(ErrorKind::usage, "flag --budget: radii must be at least 2");
  if (b.dini.directions && b.dini.directions < 64) fail(ErrorKind::usage, "flag --budget: dini_directions must be >= 64");
  b.reg.seed = derive_seed(c.seed, "regularity");
  b.reg.conorm.seed = derive_seed(c.seed, "conorm");
  b.reg.ball.seed = derive_seed(c.seed, "ball");
  b.reg.threads = c.threads;
  b.dini.seed = derive_seed(c.seed, "dini");
  b.falsify.seed = derive_seed(c.seed, "falsify");
  b.sampled.seed = derive_seed(c.seed, "sampled");
  b.step.regularity = b.reg;
  if (c.tol) {
    b.step.tol = *c.tol;
    b.step.local.tol = *c.tol;
  }
  return b;
}

inline nlohmann::json budgets_json(const Budgets& b) {
  return {{"regularity", to_json(b.reg)},
          {"dini", {{"radii", b.dini.radii}, {"directions", b.dini.directions}, {"band", b.dini.band}}},
          {"falsify",
           {{"pairs", b.falsify.pairs}, {"t_max", b.falsify.t_max}, {"t_min", b.falsify.t_min}, {"tol", b.falsify.tol}}},
          {"sampled", {{"perturbations", b.sampled.perturbations}, {"radius", b.sampled.radius}, {"step", b.sampled.step}}},
          {"lift", to_json(b.step)},
          {"growth_trials", b.trials},
          {"beta", b.beta},
          {"mean_value_pairs", b.mv_pairs}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_input, "cannot read file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Resolved {
  MappingSpec map;
  PseudoJacobianMap jac;
  std::string map_kind;  // builtin | dsl
  std::string canonical;
  bool sampled = false;
  std::vector<std::string> caveats;
};

inline Resolved resolve(const RunConfig& c, const Budgets& b) {
  Resolved r;
  if (is_builtin_label(c.map)) {
    Builtin bi = builtin(c.map);
    r.map = bi.map;
    r.jac = bi.native;
    r.map_kind = "builtin";
    r.canonical = c.map;
  } else {
    const std::string src = c.map.rfind('@', 0) == 0 ? read_file(c.map.substr(1)) : c.map;
    dsl::MappingExpr e = dsl::parse_mapping(src);
    r.canonical = e.print();
    r.map = mapping_from_expr(std::move(e), "dsl");
    r.map_kind = "dsl";
  }
  if (c.pj == "sampled" || (c.pj == "native" && r.map_kind == "dsl")) {
    r.jac = sampled_pseudo_jacobian(r.map, b.sampled);
    r.sampled = true;
    if (c.pj == "native")
      r.caveats.push_back("DSL mappings have no native pseudo-Jacobian; the sampled candidate is used");
    r.caveats.push_back("sampled pseudo-Jacobian is a finite-difference candidate, checked only by the falsifier");
  } else if (c.pj.rfind("file:", 0) == 0) {
    const auto j = nlohmann::json::parse(read_file(c.pj.substr(5)));
    MatrixPolytope p = polytope_from_json(j);
    if (p.dim() != r.map.dim) fail(ErrorKind::invalid_input, "pseudo-Jacobian file dimension does not match the map");
    r.jac = constant_pseudo_jacobian(std::move(p), "file");
    r.caveats.push_back("pseudo-Jacobian read from file is position independent and declared, not verified");
  }
  if (!r.jac.usc_declared) r.caveats.push_back("upper semicontinuity is not declared for this pseudo-Jacobian");
  return r;
}

inline Vector point_or_origin(const std::optional<Vector>& p, Eigen::Index dim, const std::string& flag) {
  if (!p) return Vector::Zero(dim);
  if (p->size() != dim)
    fail(ErrorKind::usage, "flag " + flag + ": expected " + std::to_string(dim) + " coordinates, got " +
                               std::to_string(p->size()));
  return *p;
}

inline nlohmann::json falsify_json(const FalsifyVerdict& v) {
  nlohmann::json j = {{"falsified", v.falsified}, {"pairs_tested", v.pairs_tested}, {"steps", v.steps}};
  j["max_gap"] = std::isfinite(v.max_gap) ? nlohmann::json(v.max_gap) : nlohmann::json(nullptr);
  if (v.witness)
    j["witness"] = {{"u", vector_to_json(v.witness->u)},
                    {"v", vector_to_json(v.witness->v)},
                    {"gap", v.witness->gap},
                    {"dini_estimate", v.witness->dini_estimate},
                    {"support", v.witness->support}};
  return j;
}

inline std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j = {{"command", c.command}, {"map", c.map},       {"pj", c.pj},         {"rho", c.rho},
                      {"rmax", c.rmax},       {"eta", c.eta},       {"seed", c.seed},     {"seed_source", c.seed_source},
                      {"budget", c.budget},   {"format", c.format}, {"threads", c.threads}};
  j["at"] = c.at ? vector_to_json(*c.at) : nlohmann::json(nullptr);
  j["target"] = c.target ? vector_to_json(*c.target) : nlohmann::json(nullptr);
  j["anchor"] = c.anchor ? vector_to_json(*c.anchor) : nlohmann::json(nullptr);
  j["tol"] = c.tol ? nlohmann::json(*c.tol) : nlohmann::json(nullptr);
  j["trace"] = c.trace.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.trace);
  return j;
}

inline void text_lines(const nlohmann::json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) text_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.size() > 8)) {
    out += prefix + ": [" + std::to_string(j.size()) + " entries]\n";
  } else {
    out += prefix + ": " + j.dump() + "\n";
  }
}

}  // namespace detail

/// Executes a parsed configuration; never throws.
inline Outcome run(const RunConfig& c) {
  Outcome o;
  nlohmann::json rep = {{"tool", "pjinv"}, {"version", kVersion}, {"command", c.command}, {"seed", c.seed}};
  rep["config"] = detail::config_json(c);
  nlohmann::json caveats = nlohmann::json::array();
  std::optional<std::string> csv;
  try {
    const detail::Budgets b = detail::read_budgets(c);
    rep["budgets"] = detail::budgets_json(b);
    const detail::Resolved r = detail::resolve(c, b);
    for (const auto& cv : r.caveats) caveats.push_back(cv);
    const Eigen::Index n = r.map.dim;
    nlohmann::json res = {{"map", {{"kind", r.map_kind}, {"canonical", r.canonical}, {"dim", n}}},
                          {"pseudo_jacobian", {{"kind", to_string(r.jac.kind)}, {"usc_declared", r.jac.usc_declared}}}};
    auto attach_falsifier = [&](const Vector& x) {
      if (!r.sampled) return;
      res["falsifier"] = detail::falsify_json(falsify_pseudo_jacobian(r.jac, r.map, x, b.falsify));
    };

    if (c.command == "index") {
      const Vector x = detail::point_or_origin(c.at, n, "--at");
      const MatrixPolytope p = eval_at(r.jac, x);
      const Enclosure e = polytope_conorm(p, b.reg.conorm);
      res["point"] = vector_to_json(x);
      res["polytope"] = to_json(p);
      res["index"] = to_json(e);
      res["regular"] = jf_regular(e, b.reg.conorm.zero_tol);
      if (c.budget.count("beta")) res["ball_index"] = to_json(ball_index(r.jac, x, b.beta, b.reg));
      if (!p.rays().empty()) res["recession"] = to_json(recession_conorm(p, b.reg.conorm));
      if (!e.certified) caveats.push_back("lower end covers only the sampled directions");
      attach_falsifier(x);
      o.exit_code = res["regular"].get<bool>() ? 0 : 2;
    } else if (c.command == "profile") {
      const Vector x0 = detail::point_or_origin(c.at, n, "--at");
      const RegularityProfile p = radial_profile(r.jac, x0, c.rho, b.reg);
      res["profile"] = to_json(p);
      if (p.certifying) {
        const BallCertificate cert = invertibility_ball(p, r.map);
        res["certificate"] = to_json(cert);
        for (const auto& cv : cert.caveats) caveats.push_back(cv);
        o.exit_code = 0;
      } else {
        res["certificate"] = nullptr;
        caveats.push_back("profile is not certifying; no invertibility ball emitted");
        o.exit_code = 2;
      }
      attach_falsifier(x0);
      if (c.format == "csv") csv = profile_to_csv(p);
    } else if (c.command == "invert") {
      if (!c.target) fail(ErrorKind::usage, "command invert requires --target");
      const Vector y = detail::point_or_origin(c.target, n, "--target");
      const Vector x0 = detail::point_or_origin(c.anchor, n, "--anchor");
      const InversionCertificate cert = global_invert(r.map, r.jac, y, x0, b.step);
      res["certificate"] = to_json(cert);
      res["converged"] = cert.status == LiftStatus::converged;
      caveats.push_back("ball floors come from finite ball samples and over-estimate the true index");
      attach_falsifier(x0);
      o.exit_code = cert.status == LiftStatus::converged ? 0 : 2;
      if (!c.trace.empty() || c.format == "csv") o.trace = trace_to_csv(cert);
      if (c.format == "csv") csv = *o.trace;
    } else if (c.command == "certify") {
      const EtaRule rule = parse_eta(c.eta);
      const Vector x0 = detail::point_or_origin(c.at, n, "--at");
      const HadamardVerdict v = hadamard_certify(r.jac, r.map, rule, c.rmax, 1.0, x0, b.reg);
      res["verdict"] = to_json(v);
      for (const auto& cv : v.caveats) caveats.push_back(cv);
      attach_falsifier(x0);
      o.exit_code = v.certified_global ? 0 : 2;
    } else if (c.command == "dini") {
      const Vector x = detail::point_or_origin(c.at, n, "--at");
      res["dini"] = to_json(dini_lower(r.map, x, b.dini));
      res["index"] = to_json(regularity_index(r.jac, x, b.reg.conorm));
      caveats.push_back("the lower estimate is biased upward and the upper estimate downward (finitely many points)");
      o.exit_code = 0;
    } else if (c.command == "falsify") {
      const Vector x = detail::point_or_origin(c.at, n, "--at");
      const FalsifyVerdict v = falsify_pseudo_jacobian(r.jac, r.map, x, b.falsify);
      res["verdict"] = detail::falsify_json(v);
      caveats.push_back("a passing verdict cannot prove the pseudo-Jacobian property");
      o.exit_code = v.falsified ? 2 : 0;
    } else if (c.command == "audit") {
      const Vector x = detail::point_or_origin(c.at, n, "--at");
      const BetaLimitReport bl = beta_limit_audit(r.jac, x, {1.0, 1e-1, 1e-2, 1e-3, 1e-4}, b.reg);
      nlohmann::json balls = nlohmann::json::array();
      for (std::size_t k = 0; k < bl.betas.size(); ++k) balls.push_back({{"beta", bl.betas[k]}, {"index", to_json(bl.ball[k])}});
      res["beta_limit"] = {{"index", to_json(bl.index)},
                           {"balls", balls},
                           {"gap_at_smallest", bl.gap_at_smallest},
                           {"monotonicity_defect", bl.monotonicity_defect},
                           {"passes", bl.passes}};
      bool ok = bl.passes;
      try {
        const GrowthReport g = growth_bound_audit(r.map, r.jac, x, b.beta, b.trials, b.reg);
        res["growth"] = {{"trials", g.trials},
                         {"violations", g.violations},
                         {"floor", g.floor},
                         {"worst_ratio", g.worst_ratio},
                         {"beta", b.beta}};
        ok = ok && g.violations == 0;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::not_regular) throw;
        res["growth"] = {{"skipped", e.what()}};
        ok = false;
      }
      Rng rng(derive_seed(c.seed, "audit-mv"));
      int mv_fail = 0;
      double worst = 0.0;
      for (int k = 0; k < b.mv_pairs; ++k) {
        const Vector u = x + b.beta * rng.ball_point(n), v = x + b.beta * rng.ball_point(n);
        if ((u - v).norm() == 0.0) continue;
        const MeanValueReport m = mean_value_audit(r.map, r.jac, u, v);
        worst = std::max(worst, m.ratio);
        mv_fail += m.passes ? 0 : 1;
      }
      res["mean_value"] = {{"pairs", b.mv_pairs}, {"failures", mv_fail}, {"worst_ratio", worst}};
      ok = ok && mv_fail == 0;
      res["passes"] = ok;
      attach_falsifier(x);
      o.exit_code = ok ? 0 : 2;
    }
    rep["result"] = res;
  } catch (const Error& e) {
    rep["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    rep["result"] = nullptr;
    if (!rep.contains("budgets")) rep["budgets"] = nullptr;
    o.exit_code = 1;
    csv.reset();
    o.trace.reset();
  } catch (const std::exception& e) {
    rep["error"] = {{"kind", "internal"}, {"message", e.what()}};
    rep["result"] = nullptr;
    if (!rep.contains("budgets")) rep["budgets"] = nullptr;
    o.exit_code = 1;
    csv.reset();
    o.trace.reset();
  }
  rep["caveats"] = caveats;
  if (c.timestamp) rep["timestamp"] = detail::timestamp_now();
  if (csv) {
    o.report = *csv;
  } else if (c.format == "text" && o.exit_code != 1) {
    std::string t;
    detail::text_lines(rep, "", t);
    o.report = t;
  } else {
    o.report = rep.dump(2) + "\n";
  }
  return o;
}

/// Full entry point: parse, run, write outputs; returns the exit status.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  try {
    auto parsed = parse_args(argc, argv, out);
    if (!parsed) return 0;
    c = *parsed;
  } catch (const Error& e) {
    nlohmann::json j = {{"tool", "pjinv"},
                        {"version", kVersion},
                        {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    out << j.dump(2) << "\n";
    err << "pjinv: " << e.what() << "\n";
    return 1;
  }
  const Outcome o = run(c);
  if (c.out.empty()) {
    out << o.report;
    if (o.trace && !c.trace.empty() && c.format != "csv") out << o.trace.value();
  } else {
    std::ofstream f(c.out);
    if (!f) {
      err << "pjinv: cannot write '" << c.out << "'\n";
      return 1;
    }
    f << o.report;
    if (o.trace && !c.trace.empty() && c.format != "csv") {
      std::ofstream t(c.out + ".trace.csv");
      t << *o.trace;
    }
  }
  return o.exit_code;
}

}  // namespace pjinv::cli
