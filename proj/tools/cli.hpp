#pragma once

// Command-line front end. Everything lives here so the test suite can drive
// run_cli in process; sresonance.cpp only forwards main().

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sresonance/sresonance.hpp"

namespace sres::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kDegenerate = 3 };

/// lo:hi:step, inclusive of hi when it lies on the lattice.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  static GridSpec parse(const std::string& text, const std::string& key) {
    GridSpec g;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
      throw ConfigError(key + ": expected lo:hi:step, got '" + text + "'");
    return g;
  }

  std::vector<double> values(const std::string& key) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0))
      throw ConfigError(key + ": grid needs finite bounds and a positive step");
    if (hi < lo) throw ConfigError(key + ": grid is empty (hi < lo)");
    const double span = (hi - lo) / step;
    if (span > 1e7) throw ConfigError(key + ": grid has too many points");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
    return v;
  }

  std::string str() const {
    std::ostringstream o;
    o.precision(17);
    o << lo << ':' << hi << ':' << step;
    return o.str();
  }
};

struct RunConfig {
  std::string noise = "ou";
  std::string drift = "-x";
  std::string diffusion = "1";
  double tau = 1.0;
  double theta = 0.5;
  double theta0 = 0.0;
  double theta1 = 0.5;
  double eps = 0.7244;
  double T = 1000.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
  std::string scheme = "time";
  std::optional<std::string> grid;
  std::string theta1_grid = "0.1:0.9:0.1";
  double p0 = 0.5;
  int reps = 200;
  std::string study = "all";
  std::string out;
  std::string format = "csv";
  std::string path_out;
  unsigned workers = default_workers();
};

/// Overlays JSON keys onto cfg; unknown keys and wrong types are ConfigError.
inline void apply_json(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    auto num = [&]() {
      if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
      return v.get<double>();
    };
    auto str = [&]() {
      if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
      return v.get<std::string>();
    };
    auto count = [&]() {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
      return v.get<long long>();
    };
    if (key == "noise") cfg.noise = str();
    else if (key == "drift") cfg.drift = str();
    else if (key == "diffusion") cfg.diffusion = str();
    else if (key == "tau") cfg.tau = num();
    else if (key == "theta") cfg.theta = num();
    else if (key == "theta0") cfg.theta0 = num();
    else if (key == "theta1") cfg.theta1 = num();
    else if (key == "eps") cfg.eps = num();
    else if (key == "T") cfg.T = num();
    else if (key == "dt") cfg.dt = num();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(count());
    else if (key == "scheme") cfg.scheme = str();
    else if (key == "grid") cfg.grid = str();
    else if (key == "theta1_grid") cfg.theta1_grid = str();
    else if (key == "p0") cfg.p0 = num();
    else if (key == "reps") cfg.reps = static_cast<int>(count());
    else if (key == "study") cfg.study = str();
    else if (key == "out") cfg.out = str();
    else if (key == "format") cfg.format = str();
    else if (key == "path_out") cfg.path_out = str();
    else if (key == "workers") cfg.workers = static_cast<unsigned>(count());
    else throw ConfigError("config: unknown key '" + key + "'");
  }
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

inline std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return "nan";
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
    os << '\n';
  }
}

inline json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(json(r));
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

/// csv: the table goes to --out (or stdout) and the report to <out>.json.
/// json: one document {report, table} to --out (or stdout).
inline void emit(const RunConfig& cfg, const json& report, const Table& table, std::ostream& out) {
  auto open = [](const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
    return f;
  };
  if (cfg.format == "json") {
    json doc = report;
    doc["table"] = table_json(table);
    if (cfg.out.empty()) {
      out << doc.dump(2) << '\n';
    } else {
      auto f = open(cfg.out);
      f << doc.dump(2) << '\n';
    }
    return;
  }
  if (cfg.out.empty()) {
    write_csv(out, table);
    return;
  }
  auto f = open(cfg.out);
  write_csv(f, table);
  auto r = open(cfg.out + ".json");
  r << report.dump(2) << '\n';
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Shared construction.

inline DiffusionSpec make_spec(const RunConfig& cfg) {
  if (cfg.noise == "ou") return ou_spec();
  if (cfg.noise == "custom") return expression_spec(cfg.drift, cfg.diffusion);
  throw ConfigError("noise: expected 'ou' or 'custom', got '" + cfg.noise + "'");
}

inline InvariantLaw make_law(const RunConfig& cfg) {
  return cfg.noise == "ou" ? ou_law() : build_invariant_law(make_spec(cfg));
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

inline void check_channel(const RunConfig& cfg) {
  require(std::isfinite(cfg.tau), "tau must be finite");
  require(cfg.eps > 0.0 && std::isfinite(cfg.eps), "eps must be positive");
  require(cfg.T > 0.0 && std::isfinite(cfg.T), "T must be positive");
  require(cfg.dt > 0.0 && cfg.dt <= cfg.T, "dt must satisfy 0 < dt <= T");
  parse_scheme(cfg.scheme);
}

inline void check_priors(const RunConfig& cfg) {
  require(cfg.p0 > 0.0 && cfg.p0 < 1.0, "p0 must lie strictly between 0 and 1");
}

inline json law_report(const ErgodicityReport& r, const InvariantLaw& law) {
  return {{"label", law.label()},
          {"kind", law.kind() == LawKind::ornstein_uhlenbeck ? "ou" : "numeric"},
          {"c2_left_limit", finite_or_null(r.c2_left_limit)},
          {"c2_right_limit", finite_or_null(r.c2_right_limit)},
          {"G", finite_or_null(r.G)},
          {"c2_holds", r.c2_holds},
          {"c3_holds", r.c3_holds}};
}

// ---------------------------------------------------------------------------
// Commands.

inline int cmd_law(const RunConfig& cfg, std::ostream& out) {
  const auto spec = make_spec(cfg);
  spec.validate();
  const auto erg = check_ergodicity(spec);
  if (!erg.ergodic())
    throw NotErgodic("noise '" + spec.label + "' has no stationary law (c2 " +
                     (erg.c2_holds ? "holds" : "fails") + ", c3 " + (erg.c3_holds ? "holds" : "fails") + ")");
  const auto law = make_law(cfg);
  const auto xs = GridSpec::parse(cfg.grid.value_or("-4:4:0.1"), "grid").values("grid");
  Table t{{"x", "pdf", "cdf"}, {}};
  for (double x : xs) t.rows.push_back({x, law.pdf(x), law.cdf(x)});
  json report = {{"command", "law"}, {"law", law_report(erg, law)}, {"rows", xs.size()}};
  emit(cfg, report, t, out);
  return kOk;
}

inline int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  check_channel(cfg);
  require(cfg.theta < cfg.tau, "theta must lie below tau");
  const auto spec = make_spec(cfg);
  const auto law = make_law(cfg);
  const SimConfig sc{cfg.T, cfg.dt, cfg.seed, 0.0};
  const auto y = perturb(simulate_path(spec, sc), cfg.theta, cfg.eps);
  if (!cfg.path_out.empty()) {
    std::ofstream f(cfg.path_out);
    if (!f) throw ConfigError("cannot write path file '" + cfg.path_out + "'");
    Table p{{"t", "value"}, {}};
    for (std::size_t k = 0; k < y.values.size(); ++k)
      p.rows.push_back({static_cast<double>(k) * y.dt, y.values[k]});
    write_csv(f, p);
  }
  const auto obs = observe(y, cfg.tau);
  const ChannelConfig ch{cfg.tau, cfg.eps, law};
  const double th_time = estimate_theta_time(obs.gamma_T, ch);
  const double th_energy = estimate_theta_energy(obs.nu_T, ch);
  const double sigma = sigma_time(cfg.theta, ch).value;
  const double sigma_tilde = sigma_energy(cfg.theta, ch).value;
  json report = {{"command", "estimate"},  {"seed", cfg.seed},
                 {"theta", cfg.theta},     {"tau", cfg.tau},
                 {"eps", cfg.eps},         {"T", obs.T},
                 {"gamma_T", obs.gamma_T}, {"nu_T", obs.nu_T},
                 {"theta_hat_time", th_time}, {"theta_hat_energy", th_energy},
                 {"Sigma", sigma},         {"Sigma_tilde", sigma_tilde}};
  Table t{{"gamma_T", "nu_T", "theta_hat_time", "theta_hat_energy", "Sigma", "Sigma_tilde"},
          {{obs.gamma_T, obs.nu_T, th_time, th_energy, sigma, sigma_tilde}}};
  emit(cfg, report, t, out);
  return kOk;
}

inline int cmd_resonance(const RunConfig& cfg, std::ostream& out) {
  require(std::isfinite(cfg.tau), "tau must be finite");
  const Scheme scheme = parse_scheme(cfg.scheme);
  const auto law = make_law(cfg);
  const auto eps = GridSpec::parse(cfg.grid.value_or("0.02:3:0.02"), "grid").values("grid");
  require(eps.front() > 0.0, "grid: noise levels must be positive");
  const auto curve = resonance_curve(cfg.theta, cfg.tau, law, scheme, eps, cfg.workers);
  Table t{{"eps", "fisher", "scheme", "theta", "tau", "ok"}, {}};
  std::size_t failed = 0;
  for (const auto& p : curve) {
    t.rows.push_back({p.eps, p.fisher, to_string(scheme), cfg.theta, cfg.tau, p.ok});
    failed += !p.ok;
  }
  json report = {{"command", "resonance"}, {"scheme", to_string(scheme)}, {"theta", cfg.theta},
                 {"tau", cfg.tau}, {"failed_points", failed}};
  if (eps.size() >= 2) {
    const auto r = find_resonance(cfg.theta, cfg.tau, law, scheme, {eps.front(), eps.back()});
    json maxima = json::array();
    for (const auto& m : r.local_maxima) maxima.push_back({{"eps", m.x}, {"fisher", m.value}});
    report["eps_star"] = r.eps_star;
    report["fisher_star"] = r.fisher_star;
    report["local_maxima"] = std::move(maxima);
    report["multi_resonance"] = r.multi_resonance();
  }
  emit(cfg, report, t, out);
  return kOk;
}

inline TestProblem problem_template(const RunConfig& cfg, const InvariantLaw& law) {
  check_priors(cfg);
  require(std::isfinite(cfg.tau), "tau must be finite");
  require(cfg.T > 0.0, "T must be positive");
  return {cfg.theta0, cfg.theta1, cfg.p0, 1.0 - cfg.p0, cfg.tau, cfg.eps, cfg.T, law,
          parse_scheme(cfg.scheme)};
}

inline int cmd_test(const RunConfig& cfg, std::ostream& out) {
  const auto law = make_law(cfg);
  const TestProblem tmpl = problem_template(cfg, law);
  const auto eps = GridSpec::parse(cfg.grid.value_or("0.05:3:0.05"), "grid").values("grid");
  const auto th1 = GridSpec::parse(cfg.theta1_grid, "theta1_grid").values("theta1_grid");
  require(eps.front() > 0.0, "grid: noise levels must be positive");
  require(eps.size() >= 2, "grid: at least two noise levels are needed");
  const auto cells = p_err_surface(tmpl, th1, eps, cfg.workers);
  Table t{{"theta1", "eps", "case_id", "delta", "gamma_lo", "gamma_hi", "p_err", "ok"}, {}};
  for (const auto& c : cells)
    t.rows.push_back({c.theta1, c.eps, c.case_id, c.delta, c.gamma_lo, c.gamma_hi, c.p_err, c.ok});

  const auto minima = parallel_map(
      th1.size(),
      [&](std::size_t i) -> json {
        TestProblem pr = tmpl;
        pr.theta1 = th1[i];
        json row = {{"theta1", th1[i]}};
        if (!(pr.theta0 < pr.theta1 && pr.theta1 < pr.tau)) {
          row["skipped"] = "requires theta0 < theta1 < tau";
          return row;
        }
        try {
          const auto m = find_perr_minimum(pr, {eps.front(), eps.back()});
          json local = json::array();
          for (const auto& e : m.local_minima) local.push_back({{"eps", e.x}, {"p_err", e.value}});
          row["eps_star"] = m.eps_star;
          row["p_err_min"] = m.p_err_min;
          row["p_err_lo"] = m.p_err_lo;
          row["p_err_hi"] = m.p_err_hi;
          row["local_minima"] = std::move(local);
          row["interior_below_endpoints"] = m.interior_below_endpoints();
        } catch (const NonFinite& e) {
          row["skipped"] = e.what();
        } catch (const NonConvergence& e) {
          row["skipped"] = e.what();
        }
        return row;
      },
      cfg.workers);
  json report = {{"command", "test"}, {"scheme", cfg.scheme}, {"theta0", cfg.theta0},
                 {"tau", cfg.tau}, {"p0", cfg.p0}, {"p1", 1.0 - cfg.p0}, {"T", cfg.T},
                 {"minima", minima}};
  emit(cfg, report, t, out);
  return kOk;
}

struct Replication {
  std::uint64_t seed;
  ObservationSummary obs;
  double theta_hat_time;
  double theta_hat_energy;
};

inline double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  require(cfg.reps >= 50, "reps must be at least 50");
  require(cfg.study == "all" || cfg.study == "variance" || cfg.study == "error",
          "study: expected all, variance or error");
  check_channel(cfg);
  const auto spec = make_spec(cfg);
  const auto law = make_law(cfg);
  const auto n = static_cast<std::size_t>(cfg.reps);
  json report = {{"command", "validate"}, {"study", cfg.study}, {"n_reps", cfg.reps},
                 {"eps", cfg.eps}, {"tau", cfg.tau}, {"T", cfg.T}, {"dt", cfg.dt}};
  Table t{{"study", "seed", "label", "gamma_T", "nu_T", "theta_hat_time", "theta_hat_energy", "decision"}, {}};
  json seeds = json::array();
  for (std::size_t k = 0; k < n; ++k) seeds.push_back(cfg.seed + k);

  if (cfg.study != "error") {
    require(cfg.theta < cfg.tau, "theta must lie below tau");
    const ChannelConfig ch{cfg.tau, cfg.eps, law};
    const auto reps = parallel_map(
        n,
        [&](std::size_t k) {
          const SimConfig sc{cfg.T, cfg.dt, cfg.seed + k, 0.0};
          const auto obs = observe(perturb(simulate_path(spec, sc), cfg.theta, cfg.eps), cfg.tau);
          return Replication{sc.seed, obs, estimate_theta_time(obs.gamma_T, ch),
                             estimate_theta_energy(obs.nu_T, ch)};
        },
        cfg.workers);
    std::vector<double> th, te;
    for (const auto& r : reps) {
      th.push_back(r.theta_hat_time);
      te.push_back(r.theta_hat_energy);
      t.rows.push_back({"variance", r.seed, "", r.obs.gamma_T, r.obs.nu_T, r.theta_hat_time,
                        r.theta_hat_energy, ""});
    }
    const double horizon = reps.front().obs.T;
    const double s_time = sigma_time(cfg.theta, ch).value;
    const double s_energy = sigma_energy(cfg.theta, ch).value;
    report["theta"] = cfg.theta;
    report["Sigma"] = s_time;
    report["Sigma_tilde"] = s_energy;
    report["empirical_var_ratio_time"] = horizon * sample_variance(th) / s_time;
    report["empirical_var_ratio_energy"] = horizon * sample_variance(te) / s_energy;
  }

  if (cfg.study != "variance") {
    const auto tmpl = problem_template(cfg, law);
    require(tmpl.theta0 < tmpl.theta1 && tmpl.theta1 < tmpl.tau, "requires theta0 < theta1 < tau");
    TestProblem pr = tmpl;
    pr.T = SimConfig{cfg.T, cfg.dt, 0, 0.0}.steps() * cfg.dt;
    const auto rule = build_rule(pr);
    const auto predicted = p_err(rule);
    struct Labeled {
      std::uint64_t seed;
      int label;
      ObservationSummary obs;
      Decision d;
    };
    const auto paths = parallel_map(
        n,
        [&](std::size_t k) {
          const std::uint64_t seed = cfg.seed + k;
          // The label is drawn from its own stream so it never shares
          // variates with the noise path.
          std::mt19937_64 coin(seed ^ 0x9e3779b97f4a7c15ULL);
          const int label = std::bernoulli_distribution(pr.p1)(coin) ? 1 : 0;
          const double theta = label ? pr.theta1 : pr.theta0;
          const SimConfig sc{cfg.T, cfg.dt, seed, 0.0};
          const auto obs = observe(perturb(simulate_path(spec, sc), theta, cfg.eps), cfg.tau);
          const double stat = pr.scheme == Scheme::time ? obs.gamma_T : obs.nu_T;
          return Labeled{seed, label, obs, decide(rule, stat)};
        },
        cfg.workers);
    std::size_t errors = 0;
    for (const auto& p : paths) {
      const bool wrong = (p.d == Decision::D1) != (p.label == 1);
      errors += wrong;
      t.rows.push_back({"error", p.seed, p.label, p.obs.gamma_T, p.obs.nu_T, nullptr, nullptr,
                        to_string(p.d)});
    }
    const double rate = static_cast<double>(errors) / static_cast<double>(n);
    report["theta0"] = pr.theta0;
    report["theta1"] = pr.theta1;
    report["p0"] = pr.p0;
    report["scheme"] = to_string(pr.scheme);
    report["case_id"] = rule.case_id;
    report["empirical_error_rate"] = rate;
    report["predicted_p_err"] = predicted.p_err;
    report["binomial_se"] = std::sqrt(std::max(predicted.p_err * (1.0 - predicted.p_err), 0.0) /
                                      static_cast<double>(n));
  }
  report["seeds"] = std::move(seeds);
  emit(cfg, report, t, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point.

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold detection with added diffusion noise: laws, estimators, resonance, MAP tests"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> noise, drift, diffusion, scheme, grid, theta1_grid, study, out_path,
      format, path_out;
  std::optional<double> tau, theta, theta0, theta1, eps, T, dt, p0;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<unsigned> workers;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with the same keys as the flags");
    sub->add_option("--noise", noise, "ou or custom");
    sub->add_option("--drift", drift, "drift S(x) for custom noise, e.g. -x^3");
    sub->add_option("--diffusion", diffusion, "sigma(x) for custom noise");
    sub->add_option("--tau", tau, "threshold");
    sub->add_option("--out", out_path, "output file (stdout if omitted)");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--workers", workers, "worker threads");
  };
  auto add_channel = [&](CLI::App* sub) {
    sub->add_option("--theta", theta, "signal level");
    sub->add_option("--eps", eps, "noise level");
    sub->add_option("--T", T, "observation horizon");
    sub->add_option("--dt", dt, "Euler-Maruyama step");
    sub->add_option("--seed", seed, "base RNG seed");
    sub->add_option("--scheme", scheme, "time or energy");
  };

  auto* law = app.add_subcommand("law", "stationary law: ergodicity report and f, F tables");
  add_common(law);
  law->add_option("--grid", grid, "x grid lo:hi:step");

  auto* est = app.add_subcommand("estimate", "simulate one path and estimate theta both ways");
  add_common(est);
  add_channel(est);
  est->add_option("--path-out", path_out, "write the observed path as t,value CSV");

  auto* res = app.add_subcommand("resonance", "Fisher information over eps and its maxima");
  add_common(res);
  add_channel(res);
  res->add_option("--grid", grid, "eps grid lo:hi:step");

  auto* tst = app.add_subcommand("test", "MAP test error surface over (theta1, eps)");
  add_common(tst);
  add_channel(tst);
  tst->add_option("--theta0", theta0, "null hypothesis signal");
  tst->add_option("--theta1", theta1, "alternative signal");
  tst->add_option("--p0", p0, "prior of theta0");
  tst->add_option("--grid", grid, "eps grid lo:hi:step");
  tst->add_option("--theta1-grid", theta1_grid, "theta1 grid lo:hi:step");

  auto* val = app.add_subcommand("validate", "Monte Carlo variance and error-rate studies");
  add_common(val);
  add_channel(val);
  val->add_option("--theta0", theta0, "null hypothesis signal");
  val->add_option("--theta1", theta1, "alternative signal");
  val->add_option("--p0", p0, "prior of theta0");
  val->add_option("--reps", reps, "replications (>= 50)");
  val->add_option("--study", study, "all, variance or error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? kOk : kConfig;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_json(cfg, load_config_file(config_path));
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(cfg.noise, noise);
    set(cfg.drift, drift);
    set(cfg.diffusion, diffusion);
    set(cfg.tau, tau);
    set(cfg.theta, theta);
    set(cfg.theta0, theta0);
    set(cfg.theta1, theta1);
    set(cfg.eps, eps);
    set(cfg.T, T);
    set(cfg.dt, dt);
    set(cfg.seed, seed);
    set(cfg.scheme, scheme);
    if (grid) cfg.grid = grid;
    set(cfg.theta1_grid, theta1_grid);
    set(cfg.p0, p0);
    set(cfg.reps, reps);
    set(cfg.study, study);
    set(cfg.out, out_path);
    set(cfg.format, format);
    set(cfg.path_out, path_out);
    set(cfg.workers, workers);
    require(cfg.format == "csv" || cfg.format == "json", "format: expected csv or json");
    require(cfg.workers >= 1, "workers must be at least 1");

    if (law->parsed()) return cmd_law(cfg, out);
    if (est->parsed()) return cmd_estimate(cfg, out);
    if (res->parsed()) return cmd_resonance(cfg, out);
    if (tst->parsed()) return cmd_test(cfg, out);
    return cmd_validate(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DegenerateObservation& e) {
    err << "degenerate observation: " << e.what() << '\n';
    return kDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace sres::cli
