#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "critmc/coalescent.hpp"
#include "critmc/experiments.hpp"
#include "critmc/exploration.hpp"
#include "critmc/fluid.hpp"
#include "critmc/parallel.hpp"
#include "critmc/random.hpp"
#include "critmc/records.hpp"
#include "critmc/rules.hpp"
#include "manifest.hpp"

namespace {

using nlohmann::json;
using critmc::cli::Manifest;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailed = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string rule = "erdos-renyi";
  std::uint32_t n = 100000;
  double gamma = 0.18;
  std::vector<double> lambda;
  std::size_t replicates = 100;
  std::size_t top_k = 10;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  double step = 1e-3;
  double horizon = 15.0;
  std::size_t checkpoints = 20;
  std::size_t grid_points = 200;
  std::vector<double> t;
  std::string format = "csv";
  std::string mode = "gillespie";
  std::size_t instances = 200;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double alpha = 0.01;

  std::string config;
  std::string out;
  std::string trajectory;
  std::string empirical;
  std::string reference;
  std::string state;
};

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw UsageError("config key '" + key + "': bad value '" + value + "'");
  return v;
}

std::map<std::string, std::function<void(const std::string&)>> config_setters(Settings& s) {
  auto text = [](std::string& f) { return [&f](const std::string& v) { f = v; }; };
  auto list = [](std::vector<double>& f) {
    return [&f](const std::string& v) { f = critmc::parse_double_list(v); };
  };
  auto num = [](auto& f, const char* key) {
    return [&f, key](const std::string& v) {
      f = parse_number<std::remove_reference_t<decltype(f)>>(key, v);
    };
  };
  return {
      {"rule", text(s.rule)},
      {"n", num(s.n, "n")},
      {"gamma", num(s.gamma, "gamma")},
      {"lambda", list(s.lambda)},
      {"replicates", num(s.replicates, "replicates")},
      {"top_k", num(s.top_k, "top_k")},
      {"seed", num(s.seed, "seed")},
      {"tol", num(s.tol, "tol")},
      {"step", num(s.step, "step")},
      {"horizon", num(s.horizon, "horizon")},
      {"checkpoints", num(s.checkpoints, "checkpoints")},
      {"grid_points", num(s.grid_points, "grid_points")},
      {"t", list(s.t)},
      {"format", text(s.format)},
      {"mode", text(s.mode)},
      {"instances", num(s.instances, "instances")},
      {"bound", num(s.bound, "bound")},
      {"alpha", num(s.alpha, "alpha")},
  };
}

/// Fills every setting present in the config file whose flag was not given
/// on the command line. Keys without a flag on this subcommand are accepted
/// and ignored, since all subcommands share one schema.
void apply_config(CLI::App& sub, Settings& s) {
  if (s.config.empty()) return;
  std::ifstream in(s.config);
  if (!in) throw UsageError("cannot read config file " + s.config);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto values = critmc::parse_config(buf.str());
  auto setters = config_setters(s);
  for (const auto& [key, value] : values) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    if (opt == nullptr || opt->count() > 0) continue;
    setters.at(key)(value);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(Manifest& m, const std::string& path, const std::string& data) {
  if (path.empty()) {
    std::cout << data << std::flush;
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << data;
  }
  m.outputs.push_back({path.empty() ? "-" : path, critmc::cli::sha256_hex(data), data.size()});
}

void write_manifest(const Manifest& m, const std::string& out) {
  const std::string path = out.empty() ? "critmc_" + m.command + ".manifest.json"
                                       : out + ".manifest.json";
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << m.to_json().dump(2) << '\n';
}

json constants_json(const critmc::CriticalConstants& c) {
  return {{"rule_fingerprint", c.rule_fingerprint},
          {"t_c", c.t_c},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"b_tc", c.b_tc},
          {"tol", c.tol},
          {"steps", c.steps},
          {"rejected", c.rejected},
          {"switch_time", c.switch_time}};
}

std::string trajectory_csv(const critmc::FluidTrajectory& f) {
  using critmc::format_double;
  std::ostringstream os;
  const std::uint32_t K = f.bound();
  os << 't';
  for (std::uint32_t i = 1; i <= K; ++i) os << ",x_" << i;
  os << ",x_pi,s2,s3,y,z\n";
  for (double t : f.node_times()) {
    os << format_double(t);
    for (double x : f.x(t)) os << ',' << format_double(x);
    os << ',' << format_double(f.s2(t)) << ',' << format_double(f.s3(t)) << ','
       << format_double(f.y(t)) << ',' << format_double(f.z(t)) << '\n';
  }
  return os.str();
}

json settings_json(const Settings& s, std::initializer_list<const char*> keys) {
  const std::map<std::string, json> all = {
      {"rule", s.rule},
      {"n", s.n},
      {"gamma", s.gamma},
      {"lambda", s.lambda},
      {"replicates", s.replicates},
      {"top_k", s.top_k},
      {"seed", s.seed},
      {"tol", s.tol},
      {"step", s.step},
      {"horizon", s.horizon},
      {"checkpoints", s.checkpoints},
      {"grid_points", s.grid_points},
      {"t", s.t},
      {"format", s.format},
      {"mode", s.mode},
      {"instances", s.instances},
      {"bound", std::isnan(s.bound) ? json(nullptr) : json(s.bound)},
      {"alpha", s.alpha},
      {"state", s.state},
      {"empirical", s.empirical},
      {"reference", s.reference},
  };
  json j = json::object();
  for (const char* k : keys) j[k] = all.at(k);
  j["threads"] = critmc::thread_cap();
  return j;
}

int cmd_tc(const Settings& s, Manifest& m) {
  const critmc::BoundedSizeRule rule = critmc::load_rule(s.rule);
  const auto [fluid, c] = critmc::integrate(rule, s.tol);
  m.config = settings_json(s, {"rule", "tol"});
  emit(m, s.out, constants_json(c).dump(2) + "\n");
  if (!s.trajectory.empty()) emit(m, s.trajectory, trajectory_csv(fluid));
  m.summary = constants_json(c);
  std::fprintf(stderr, "t_c = %.6f  alpha = %.6f  beta = %.6f\n", c.t_c, c.alpha, c.beta);
  return kOk;
}

int cmd_simulate(const Settings& s, Manifest& m) {
  const critmc::BoundedSizeRule rule = critmc::load_rule(s.rule);
  if (s.t.empty()) throw UsageError("simulate needs at least one --t");
  std::optional<critmc::CriticalConstants> c;
  try {
    c = critmc::integrate(rule, s.tol).second;
  } catch (const critmc::FluidError&) {
    // No critical time: the lambda column stays empty.
  }
  const auto records = critmc::run_snapshots(rule, s.n, s.t, s.replicates, s.top_k, s.seed,
                                             c ? &*c : nullptr);
  std::ostringstream os;
  critmc::write_snapshots(os, records, critmc::parse_format(s.format));
  m.config = settings_json(s, {"rule", "n", "t", "replicates", "top_k", "seed", "tol", "format"});
  emit(m, s.out, os.str());
  m.summary = {{"records", records.size()}};
  std::fprintf(stderr, "simulate: %zu records from %zu replicates\n", records.size(), s.replicates);
  return kOk;
}

int cmd_window(const Settings& s, Manifest& m) {
  const critmc::BoundedSizeRule rule = critmc::load_rule(s.rule);
  critmc::WindowConfig cfg{rule,          s.n,    s.gamma, s.lambda.empty() ? std::vector<double>{0.0} : s.lambda,
                           s.replicates,  s.top_k, s.seed,  critmc::integrate(rule, s.tol).second};
  const auto records = critmc::run_window(cfg);
  std::ostringstream os;
  critmc::write_scaled(os, records, critmc::Schema::window, critmc::parse_format(s.format));
  m.config = settings_json(s, {"rule", "n", "gamma", "lambda", "replicates", "top_k", "seed",
                               "tol", "format"});
  m.config["lambda"] = cfg.lambdas;
  m.config["constants"] = constants_json(cfg.constants);
  emit(m, s.out, os.str());
  m.summary = {{"records", records.size()}};
  std::fprintf(stderr, "window: %zu records, t_c = %.6f\n", records.size(), cfg.constants.t_c);
  return kOk;
}

int cmd_limit(const Settings& s, Manifest& m) {
  critmc::LimitConfig cfg{s.lambda.empty() ? std::vector<double>{0.0} : s.lambda,
                          s.replicates, s.step, s.horizon, s.top_k, s.seed};
  const auto records = critmc::run_limit_reference(cfg);
  std::ostringstream os;
  critmc::write_scaled(os, records, critmc::Schema::limit, critmc::parse_format(s.format));
  m.config = settings_json(s, {"lambda", "replicates", "step", "horizon", "top_k", "seed", "format"});
  m.config["lambda"] = cfg.lambdas;
  emit(m, s.out, os.str());
  m.summary = {{"records", records.size()}};
  std::fprintf(stderr, "limit: %zu records\n", records.size());
  return kOk;
}

json moments_json(const critmc::Moments& mo) {
  return {{"count", mo.count}, {"mean", mo.mean}, {"variance", mo.variance}, {"sem", mo.sem()}};
}

int cmd_compare(const Settings& s, Manifest& m) {
  if (s.empirical.empty() || s.reference.empty())
    throw UsageError("compare needs --empirical and --reference");
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    return critmc::read_scaled(in);
  };
  critmc::ComparisonReport rep;
  try {
    rep = critmc::compare(load(s.empirical), load(s.reference));
  } catch (const critmc::ComparisonError& e) {
    throw UsageError(e.what());
  }
  json rows = json::array();
  bool pass = true;
  for (const auto& r : rep.rows) {
    const bool ok = r.ks.p_value >= s.alpha && r.y1_z <= 3.0;
    pass = pass && ok;
    rows.push_back({{"lambda", r.lambda},
                    {"ks_statistic", r.ks.statistic},
                    {"ks_p_value", r.ks.p_value},
                    {"c1", {{"empirical", moments_json(r.empirical_c1)},
                            {"reference", moments_json(r.reference_c1)}}},
                    {"y1", {{"empirical", moments_json(r.empirical_y1)},
                            {"reference", moments_json(r.reference_y1)}}},
                    {"weighted_sum", {{"empirical", moments_json(r.empirical_weighted)},
                                      {"reference", moments_json(r.reference_weighted)}}},
                    {"y1_mean_diff_sigmas", r.y1_z},
                    {"pass", ok}});
  }
  json report = {{"alpha", s.alpha}, {"rows", rows}, {"pass", pass}};
  m.config = settings_json(s, {"empirical", "reference", "alpha"});
  emit(m, s.out, report.dump(2) + "\n");
  m.summary = {{"pass", pass}, {"lambdas", rep.rows.size()}};
  std::fprintf(stderr, "compare: %s over %zu lambda values\n", pass ? "PASS" : "FAIL",
               rep.rows.size());
  return pass ? kOk : kFailed;
}

int cmd_amc(const Settings& s, Manifest& m) {
  if (s.state.empty()) throw UsageError("amc needs --state");
  if (s.t.size() != 1) throw UsageError("amc needs exactly one --t");
  if (s.mode != "gillespie" && s.mode != "graphical")
    throw UsageError("--mode must be gillespie or graphical");
  const critmc::AugmentedState start = critmc::parse_state_csv(read_file(s.state));
  const double t = s.t.front();
  const bool graphical = s.mode == "graphical";
  const auto finals = critmc::run_replicates(s.replicates, [&](std::size_t r) {
    const std::uint64_t seed = critmc::derive_seed(s.seed, "amc", r);
    return graphical ? critmc::graphical_construction(start, t, seed)
                     : critmc::amc_run(start, t, seed);
  });
  std::ostringstream os;
  double blocks = 0.0, surplus = 0.0;
  for (std::size_t r = 0; r < finals.size(); ++r) {
    if (r > 0) os << '\n';
    for (const auto& b : finals[r].blocks())
      os << critmc::format_double(b.mass) << ',' << b.surplus << '\n';
    blocks += double(finals[r].size());
    surplus += double(finals[r].total_surplus());
  }
  const double reps = std::max<double>(1.0, double(finals.size()));
  m.config = settings_json(s, {"state", "t", "replicates", "mode", "seed"});
  emit(m, s.out, os.str());
  m.summary = {{"replicates", finals.size()},
               {"mean_blocks", blocks / reps},
               {"mean_total_surplus", surplus / reps}};
  std::fprintf(stderr, "amc: %zu replicates, mean blocks %.4f, mean total surplus %.4f\n",
               finals.size(), blocks / reps, surplus / reps);
  return kOk;
}

int cmd_walk_check(const Settings& s, Manifest& m) {
  const critmc::WalkCheckReport rep = critmc::run_walk_check(s.instances, s.seed);
  json report = {{"instances", rep.instances},
                 {"consistency_failures", rep.consistency_failures},
                 {"bound_violations", rep.bound_violations},
                 {"worst_gap_ratio", rep.worst_gap_ratio},
                 {"pass", rep.ok()}};
  if (rep.first_failure) {
    const auto& f = *rep.first_failure;
    report["counterexample"] = {{"instance", f.instance},
                                {"masses", f.input.masses},
                                {"q", f.input.q},
                                {"build_seed", f.build_seed},
                                {"reason", f.reason}};
  }
  m.config = settings_json(s, {"instances", "seed"});
  emit(m, s.out, report.dump(2) + "\n");
  m.summary = report;
  std::fprintf(stderr, "walk-check: %s (%zu instances)\n", rep.ok() ? "PASS" : "FAIL",
               rep.instances);
  return rep.ok() ? kOk : kFailed;
}

int cmd_subcritical(const Settings& s, Manifest& m) {
  const critmc::BoundedSizeRule rule = critmc::load_rule(s.rule);
  const auto c = critmc::integrate(rule, s.tol).second;
  const double t_end = critmc::subcritical_end(c, s.n, s.gamma);
  if (!(t_end > 0.0)) throw UsageError("t_c - n^-gamma is not positive");
  const auto checkpoints = critmc::uniform_checkpoints(t_end, s.checkpoints);
  const auto rep = critmc::check_subcritical(rule, s.n, s.gamma, checkpoints,
                                             critmc::derive_seed(s.seed, "subcritical", 0), c);
  const bool pass = std::isnan(s.bound) || rep.max_ratio <= s.bound;
  json report = {{"t_c", c.t_c},         {"t_end", t_end},       {"times", rep.times},
                 {"ratios", rep.ratios}, {"max_ratio", rep.max_ratio}, {"pass", pass}};
  report["bound"] = std::isnan(s.bound) ? json(nullptr) : json(s.bound);
  m.config = settings_json(s, {"rule", "n", "gamma", "checkpoints", "seed", "tol", "bound"});
  emit(m, s.out, report.dump(2) + "\n");
  m.summary = {{"max_ratio", rep.max_ratio}, {"pass", pass}};
  std::fprintf(stderr, "check-subcritical: max ratio %.6g%s\n", rep.max_ratio,
               std::isnan(s.bound) ? "" : (pass ? " PASS" : " FAIL"));
  return pass ? kOk : kFailed;
}

int cmd_susceptibility(const Settings& s, Manifest& m) {
  const critmc::BoundedSizeRule rule = critmc::load_rule(s.rule);
  const auto [fluid, c] = critmc::integrate(rule, s.tol);
  const double t_end = critmc::subcritical_end(c, s.n, s.gamma);
  if (!(t_end > 0.0)) throw UsageError("t_c - n^-gamma is not positive");
  const auto grid = critmc::susceptibility_grid(t_end, s.grid_points);
  const auto rep = critmc::check_susceptibility(
      rule, s.n, s.gamma, grid, critmc::derive_seed(s.seed, "susceptibility", 0), fluid, c);
  json report = {{"t_c", c.t_c},
                 {"t_end", t_end},
                 {"grid", {{"points", grid.size()},
                           {"layout", "0, then t_end - t_end*1e-3^(k/(N-2)), then t_end"}}},
                 {"sup_inv_s2", rep.sup_inv_s2},
                 {"sup_s3_ratio", rep.sup_s3_ratio}};
  m.config = settings_json(s, {"rule", "n", "gamma", "grid_points", "seed", "tol"});
  emit(m, s.out, report.dump(2) + "\n");
  m.summary = report;
  std::fprintf(stderr, "check-susceptibility: sup1 = %.6g  sup2 = %.6g\n", rep.sup_inv_s2,
               rep.sup_s3_ratio);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critmc: bounded-size rule critical-window simulator"};
  app.require_subcommand(1);
  Settings s;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", s.config, "key = value configuration file");
    sub->add_option("--out", s.out, "output file (default: stdout)");
  };
  auto rule_opts = [&](CLI::App* sub) {
    sub->add_option("--rule", s.rule, "erdos-renyi, bohman-frieze, or a rule file");
    sub->add_option("--tol", s.tol, "fluid solver tolerance");
  };
  auto lambdas = [&](CLI::App* sub) {
    sub->add_option("--lambda", s.lambda, "window parameter (repeatable)")->allow_extra_args(false);
  };

  auto* tc = app.add_subcommand("tc", "critical time and scaling constants");
  common(tc);
  rule_opts(tc);
  tc->add_option("--trajectory", s.trajectory, "dump the fluid trajectory as CSV");

  auto* simulate = app.add_subcommand("simulate", "raw component snapshots at fixed times");
  common(simulate);
  rule_opts(simulate);
  simulate->add_option("--n", s.n, "vertex count");
  simulate->add_option("--t", s.t, "snapshot time (repeatable)")->allow_extra_args(false);
  simulate->add_option("--replicates", s.replicates);
  simulate->add_option("--top-k", s.top_k);
  simulate->add_option("--seed", s.seed);
  simulate->add_option("--format", s.format, "csv or jsonl");

  auto* window = app.add_subcommand("window", "rescaled critical-window snapshots");
  common(window);
  rule_opts(window);
  lambdas(window);
  window->add_option("--n", s.n);
  window->add_option("--gamma", s.gamma);
  window->add_option("--replicates", s.replicates);
  window->add_option("--top-k", s.top_k);
  window->add_option("--seed", s.seed);
  window->add_option("--format", s.format);

  auto* limit = app.add_subcommand("limit", "marked excursions of the limit process");
  common(limit);
  lambdas(limit);
  limit->add_option("--step", s.step);
  limit->add_option("--horizon", s.horizon);
  limit->add_option("--replicates", s.replicates);
  limit->add_option("--top-k", s.top_k);
  limit->add_option("--seed", s.seed);
  limit->add_option("--format", s.format);

  auto* compare = app.add_subcommand("compare", "compare window records with limit records");
  common(compare);
  compare->add_option("--empirical", s.empirical, "window records");
  compare->add_option("--reference", s.reference, "limit records");
  compare->add_option("--alpha", s.alpha, "KS significance level");

  auto* amc = app.add_subcommand("amc", "augmented multiplicative coalescent");
  common(amc);
  amc->add_option("--state", s.state, "initial state CSV (mass,surplus)");
  amc->add_option("--t", s.t, "duration")->allow_extra_args(false);
  amc->add_option("--replicates", s.replicates);
  amc->add_option("--mode", s.mode, "gillespie or graphical");
  amc->add_option("--seed", s.seed);

  auto* walk = app.add_subcommand("walk-check", "exploration-walk consistency fuzz");
  common(walk);
  walk->add_option("--instances", s.instances);
  walk->add_option("--seed", s.seed);

  auto* sub = app.add_subcommand("check-subcritical", "largest component below t_c");
  common(sub);
  rule_opts(sub);
  sub->add_option("--n", s.n);
  sub->add_option("--gamma", s.gamma);
  sub->add_option("--checkpoints", s.checkpoints);
  sub->add_option("--seed", s.seed);
  sub->add_option("--bound", s.bound, "fail (exit 2) above this ratio");

  auto* sus = app.add_subcommand("check-susceptibility", "susceptibility vs fluid limit");
  common(sus);
  rule_opts(sus);
  sus->add_option("--n", s.n);
  sus->add_option("--gamma", s.gamma);
  sus->add_option("--grid-points", s.grid_points);
  sus->add_option("--seed", s.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  const std::map<CLI::App*, int (*)(const Settings&, Manifest&)> commands = {
      {tc, cmd_tc},         {simulate, cmd_simulate}, {window, cmd_window},
      {limit, cmd_limit},   {compare, cmd_compare},   {amc, cmd_amc},
      {walk, cmd_walk_check}, {sub, cmd_subcritical}, {sus, cmd_susceptibility}};
  CLI::App* chosen = app.get_subcommands().front();
  Manifest m;
  m.command = chosen->get_name();
  try {
    apply_config(*chosen, s);
    m.seed = s.seed;
    const auto start = std::chrono::steady_clock::now();
    const int code = commands.at(chosen)(s, m);
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(m, s.out);
    return code;
  } catch (const std::exception& e) {
    std::cerr << "critmc " << m.command << ": " << e.what() << '\n';
    return kUsage;
  }
}
