#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "noc/association.hpp"
#include "noc/channel.hpp"
#include "noc/dataset.hpp"
#include "noc/io.hpp"
#include "noc/metrics.hpp"
#include "noc/optimal.hpp"
#include "noc/solver.hpp"
#include "noc/surrogate.hpp"

namespace fs = std::filesystem;
using namespace noc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;

struct Infeasible : std::runtime_error {
  json certificate;
  Infeasible(const std::string& what, json cert)
      : std::runtime_error(what), certificate(std::move(cert)) {}
};

/// Relative output paths land under NOC_OUTPUT_DIR when it is set.
std::string out_path(const std::string& p) {
  const char* dir = std::getenv("NOC_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0' || fs::path(p).is_absolute()) return p;
  fs::create_directories(dir);
  return (fs::path(dir) / p).string();
}

struct Common {
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct ParamFlags {
  double s_min = 4.0;
  double p_max_dbm = 46.02;
  double i_max_dbm = -100.0;
  int cluster_size = 2;

  void add(CLI::App* app) {
    app->add_option("--s-min", s_min, "Minimum connected-user SE, bit/s/Hz")->capture_default_str();
    app->add_option("--p-max-dbm", p_max_dbm, "BS power budget")->capture_default_str();
    app->add_option("--imax-dbm", i_max_dbm, "Co-channel interference cap per victim")
        ->capture_default_str();
    app->add_option("-q,--cluster-size", cluster_size, "Users per NOMA cluster")
        ->capture_default_str();
  }
  SystemParams resolve() const {
    SystemParams p;
    p.s_min = s_min;
    p.p_max = dbm_to_linear(PowerDbm{p_max_dbm});
    p.i_max = dbm_to_linear(PowerDbm{i_max_dbm});
    p.cluster_size = cluster_size;
    p.validate();
    return p;
  }
};

struct SolverFlags {
  double tol = 1e-8;
  int max_iter = 500;

  void add(CLI::App* app) {
    app->add_option("--solver-tol", tol, "Duality-gap tolerance")->capture_default_str();
    app->add_option("--solver-max-iter", max_iter, "Newton iteration limit")->capture_default_str();
  }
  barrier::SolverConfig resolve() const {
    barrier::SolverConfig c;
    c.outer_tol = tol;
    c.max_iterations = max_iter;
    return c;
  }
  json to_json() const { return {{"outer_tol", tol}, {"max_iterations", max_iter}}; }
};

SubchannelLayout layout_from_string(const std::string& s) {
  if (s == "disjoint") return SubchannelLayout::disjoint;
  if (s == "reuse") return SubchannelLayout::reuse;
  throw ConfigError("unknown layout '" + s + "' (expected disjoint|reuse)");
}

json report_summary(const Scenario& sc, const AssociationMap& assoc, const PowerSolution& sol,
                    Mode mode) {
  const UserSe se = evaluate_se(sc, assoc, sol, mode);
  std::vector<double> all;
  json failed = json::object(), connected = json::object();
  for (const auto& [u, v] : se.connected) {
    all.push_back(v);
    connected[std::to_string(u)] = v;
  }
  double sum_f = 0.0;
  for (const auto& [u, v] : se.failed) {
    all.push_back(v);
    sum_f += v;
    failed[std::to_string(u)] = v;
  }
  const int total = static_cast<int>(sc.topology.users.size());
  const int n_failed = static_cast<int>(sc.failed_users.size());
  double sum_all = 0.0;
  for (double v : all) sum_all += v;
  return {{"objective", failed_objective(sc, assoc, sol, mode)},
          {"avg_failed_se", n_failed > 0 ? sum_f / n_failed : 0.0},
          {"avg_all_se", total > 0 ? sum_all / total : 0.0},
          {"jain", jain_fairness(all, total)},
          {"connected_se", connected},
          {"failed_se", failed},
          {"violations", to_json(check_constraints(sc, assoc, sol, mode))}};
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  int cells = 3;
  int users = 12;
  int failed = 4;
  double ring = 2.0;
  std::string layout = "disjoint";
  std::string out = "scenario.json";
  ParamFlags params;
};

int run_generate(const GenerateArgs& a, const Common& c) {
  if (a.cells < 1 || a.users < a.cells || a.users % a.cells != 0) {
    throw ConfigError("--users must be a positive multiple of --cells");
  }
  TopologyConfig tc;
  tc.n_compensating = a.cells;
  tc.users_per_cell = a.users / a.cells;
  tc.n_failed = a.failed;
  tc.cluster_size = a.params.cluster_size;
  tc.seed = c.seed;
  tc.ring_factor = a.ring;
  const auto layout = layout_from_string(a.layout);
  const Scenario sc = build_scenario(generate_topology(tc), a.params.resolve(), layout);
  json j = to_json(sc, layout);
  j["config"] = {{"command", "generate"},   {"cells", a.cells},   {"users", a.users},
                 {"failed", a.failed},      {"ring_factor", a.ring}, {"layout", a.layout},
                 {"seed", c.seed},          {"params", to_json(sc.params)}};
  const auto path = out_path(a.out);
  write_json_file(path, j);
  std::cout << "wrote " << path << " (" << sc.topology.users.size() << " users, "
            << sc.topology.resamples << " resamples)\n";
  return kExitOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string scenario;
  std::string mode = "isolated";
  std::string pa = "solver";
  std::string model;
  bool optimal = false;
  long long budget_assoc = 0;
  double budget_seconds = 0.0;
  std::string trace;
  std::string out = "solution.json";
  SolverFlags solver;
};

int run_solve(const SolveArgs& a, const Common& c) {
  const json sj = read_json_file(a.scenario);
  const Scenario sc = scenario_from_json(sj);
  const Mode mode = mode_from_string(a.mode);
  if (a.pa != "solver" && a.pa != "dnn") throw ConfigError("--pa must be solver or dnn");
  if (a.optimal && a.pa == "dnn") throw ConfigError("--optimal uses the convex solver only");

  EvalOptions opt;
  opt.mode = mode;
  opt.solver = a.solver.resolve();
  if (a.budget_assoc > 0) opt.budget.max_associations = a.budget_assoc;
  if (a.budget_seconds > 0.0) opt.budget.max_seconds = a.budget_seconds;
  SurrogateModel model;
  if (a.pa == "dnn") {
    if (a.model.empty()) throw ConfigError("--pa dnn needs --model");
    model = load_model(a.model);
    opt.model = &model;
  }
  const Scheme scheme = a.optimal ? Scheme::opt_noc
                        : a.pa == "dnn" ? Scheme::lc_noc_dnn
                                        : Scheme::lc_noc;
  const MetricsReport rep = evaluate_scheme(sc, scheme, opt);

  json config = {{"command", "solve"},     {"scenario", a.scenario},
                 {"scenario_seed", sc.topology.seed}, {"mode", a.mode},
                 {"pa", a.pa},             {"model", a.model},
                 {"scheme", to_string(scheme)},   {"seed", c.seed},
                 {"solver", a.solver.to_json()},  {"params", to_json(sc.params)},
                 {"budget_assoc", a.budget_assoc}, {"budget_seconds", a.budget_seconds}};
  if (!rep.feasible) {
    throw Infeasible("infeasible", {{"config", config}, {"feasible", false},
                                    {"certificate", rep.diagnostic}});
  }
  json out = {{"config", config},
              {"mode", a.mode},
              {"association", to_json(rep.assoc)},
              {"solution", to_json(rep.solution)},
              {"metrics", to_json(rep)}};

  if (!a.trace.empty()) {
    const PaMode pm = mode == Mode::interference ? PaMode::compensation_interference
                                                 : PaMode::compensation;
    json traces = json::array();
    for (int bs_id : sc.compensating) {
      PaInstance inst = make_instance(sc, bs_id, pm, &rep.assoc);
      const auto r = solve_instance(inst, opt.solver, true);
      json rows = json::array();
      for (const auto& t : r.trace) {
        rows.push_back({{"phase", t.phase}, {"outer", t.outer}, {"t", t.t},
                        {"objective", t.objective}, {"decrement", t.decrement}, {"step", t.step}});
      }
      traces.push_back({{"bs", bs_id}, {"newton_iterations", r.newton_iterations}, {"trace", rows}});
    }
    write_json_file(out_path(a.trace), {{"config", config}, {"per_bs", traces}});
  }
  const auto path = out_path(a.out);
  write_json_file(path, out);
  std::cout << to_string(scheme) << ": objective " << rep.solution.objective << " bit/s/Hz, "
            << rep.served << "/" << rep.failed_users << " failed users served, jain " << rep.jain
            << "\nwrote " << path << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- dataset

struct DatasetArgs {
  int cells = 3;
  int users_per_cell = 4;
  int failed = 3;
  int n = 1000;
  double ring = 2.0;
  std::string mode = "isolated";
  std::string layout = "disjoint";
  std::string out = "dataset.jsonl";
  ParamFlags params;
  SolverFlags solver;
};

int run_dataset(const DatasetArgs& a, const Common& c) {
  DatasetConfig cfg;
  cfg.topology.n_compensating = a.cells;
  cfg.topology.users_per_cell = a.users_per_cell;
  cfg.topology.n_failed = a.failed;
  cfg.topology.cluster_size = a.params.cluster_size;
  cfg.topology.ring_factor = a.ring;
  cfg.params = a.params.resolve();
  cfg.mode = mode_from_string(a.mode);
  cfg.layout = layout_from_string(a.layout);
  cfg.n_samples = a.n;
  cfg.seed = c.seed;
  cfg.jobs = c.jobs;
  cfg.solver = a.solver.resolve();
  DatasetStats st;
  const auto samples = generate_dataset(cfg, &st);
  const auto path = out_path(a.out);
  write_jsonl(path, samples);
  const json manifest = {{"command", "dataset"},
                         {"cells", a.cells},
                         {"users_per_cell", a.users_per_cell},
                         {"failed", a.failed},
                         {"n", a.n},
                         {"ring_factor", a.ring},
                         {"mode", a.mode},
                         {"layout", a.layout},
                         {"seed", c.seed},
                         {"params", to_json(cfg.params)},
                         {"solver", a.solver.to_json()},
                         {"scenarios", st.scenarios},
                         {"infeasible", st.infeasible},
                         {"emitted", st.emitted}};
  write_json_file(path + ".config.json", manifest);
  std::cout << "wrote " << st.emitted << " samples from " << st.scenarios << " scenarios ("
            << st.infeasible << " infeasible) to " << path << "\n";
  return kExitOk;
}

struct SplitArgs {
  std::string in;
  std::vector<double> ratios{0.7, 0.15, 0.15};
  int augment = 0;
  std::string prefix = "split";
};

int run_split(const SplitArgs& a, const Common& c) {
  if (a.ratios.size() != 3) throw ConfigError("--ratios takes three values");
  const auto samples = read_jsonl(a.in);
  const auto sp = split_dataset(samples, {a.ratios[0], a.ratios[1], a.ratios[2]}, c.seed, a.augment);
  const std::map<std::string, const std::vector<LabeledSample>*> parts{
      {"train", &sp.train}, {"val", &sp.val}, {"test", &sp.test}};
  for (const auto& [name, v] : parts) {
    const auto path = out_path(a.prefix + "." + name + ".jsonl");
    write_jsonl(path, *v);
    std::cout << name << ": " << v->size() << " -> " << path << "\n";
  }
  write_json_file(out_path(a.prefix + ".config.json"),
                  {{"command", "dataset split"}, {"in", a.in}, {"ratios", a.ratios},
                   {"augment", a.augment}, {"seed", c.seed}});
  return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string train;
  std::string val;
  std::string out = "model.bin";
  std::string decay_mode = "beta1";
  std::string encoding = "log10";
  TrainConfig cfg;
};

int run_train(TrainArgs a, const Common& c) {
  a.cfg.seed = c.seed;
  if (a.decay_mode == "beta1") {
    a.cfg.decay_mode = DecayMode::beta1;
  } else if (a.decay_mode == "lr_schedule") {
    a.cfg.decay_mode = DecayMode::lr_schedule;
  } else {
    throw ConfigError("--decay-mode must be beta1 or lr_schedule");
  }
  if (a.encoding == "log10") {
    a.cfg.encoding = OutputEncoding::log10;
  } else if (a.encoding == "linear") {
    a.cfg.encoding = OutputEncoding::linear;
  } else {
    throw ConfigError("--encoding must be log10 or linear");
  }
  const auto train = read_jsonl(a.train);
  const auto val = read_jsonl(a.val);
  if (train.empty()) throw ConfigError("training split is empty");
  const json meta = json::parse(train.front().meta);
  const double p_max = meta.value("p_max_mw", SystemParams{}.p_max.value);
  TrainReport rep;
  const SurrogateModel m = train_surrogate(train, val, a.cfg, p_max, &rep);
  const auto path = out_path(a.out);
  save_model(m, path);
  write_json_file(path + ".report.json",
                  {{"command", "train"},
                   {"train", a.train},
                   {"val", a.val},
                   {"seed", c.seed},
                   {"epochs", a.cfg.epochs},
                   {"batch", a.cfg.batch},
                   {"lr", a.cfg.lr},
                   {"decay", a.cfg.decay},
                   {"decay_mode", a.decay_mode},
                   {"hidden", a.cfg.hidden},
                   {"hidden_layers", a.cfg.hidden_layers},
                   {"encoding", a.encoding},
                   {"train_mse", rep.train_mse},
                   {"val_mse", rep.val_mse},
                   {"best_epoch", rep.best_epoch},
                   {"seconds", rep.seconds}});
  std::cout << "best epoch " << rep.best_epoch << ", val mse "
            << (rep.best_epoch >= 0 ? rep.val_mse[rep.best_epoch] : NAN) << ", " << rep.seconds
            << " s\nwrote " << path << "\n";
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string scenario;
  std::string scenarios;
  std::vector<std::string> schemes{"lc_noc", "no_oc"};
  std::vector<std::string> solutions;
  std::string dataset;
  std::string model;
  std::string mode = "isolated";
  long long budget_assoc = 0;
  std::string out = "eval.json";
  SolverFlags solver;
};

int run_eval(const EvalArgs& a, const Common& c) {
  json out = {{"config",
               {{"command", "eval"}, {"scenario", a.scenario}, {"scenarios", a.scenarios},
                {"schemes", a.schemes}, {"solutions", a.solutions}, {"dataset", a.dataset},
                {"model", a.model}, {"mode", a.mode}, {"seed", c.seed},
                {"solver", a.solver.to_json()}}}};
  SurrogateModel model;
  const bool have_model = !a.model.empty();
  if (have_model) model = load_model(a.model);

  // Precomputed solution files against one scenario.
  if (!a.solutions.empty()) {
    if (a.scenario.empty()) throw ConfigError("--solutions needs --scenario");
    const Scenario sc = scenario_from_json(read_json_file(a.scenario));
    json rows = json::array();
    for (const auto& f : a.solutions) {
      const json j = read_json_file(f);
      const Mode mode = mode_from_string(j.value("mode", a.mode));
      const auto assoc = association_from_json(j.at("association"));
      const auto sol = solution_from_json(j.at("solution"));
      json r = report_summary(sc, assoc, sol, mode);
      r["file"] = f;
      std::cout << f << ": objective " << r["objective"].get<double>() << ", jain "
                << r["jain"].get<double>() << "\n";
      rows.push_back(std::move(r));
    }
    out["solutions"] = rows;
  }

  // Scheme comparison over scenario files.
  std::vector<std::string> files;
  if (!a.scenario.empty() && a.solutions.empty()) files.push_back(a.scenario);
  if (!a.scenarios.empty()) {
    for (const auto& e : fs::directory_iterator(a.scenarios)) {
      if (e.path().extension() == ".json") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
  }
  if (!files.empty()) {
    EvalOptions opt;
    opt.mode = mode_from_string(a.mode);
    opt.solver = a.solver.resolve();
    opt.model = have_model ? &model : nullptr;
    if (a.budget_assoc > 0) opt.budget.max_associations = a.budget_assoc;
    json per_scheme = json::object();
    for (const auto& name : a.schemes) {
      const Scheme s = scheme_from_string(name);
      json rows = json::array();
      double f_se = 0.0, all_se = 0.0, jain = 0.0;
      int ok = 0;
      for (const auto& f : files) {
        const auto rep = evaluate_scheme(scenario_from_json(read_json_file(f)), s, opt);
        json r = to_json(rep);
        r["file"] = f;
        rows.push_back(std::move(r));
        if (!rep.feasible) continue;
        ++ok;
        f_se += rep.avg_failed_se;
        all_se += rep.avg_all_se;
        jain += rep.jain;
      }
      const double n = std::max(ok, 1);
      per_scheme[name] = {{"feasible", ok},
                          {"scenarios", files.size()},
                          {"mean_failed_se", f_se / n},
                          {"mean_all_se", all_se / n},
                          {"mean_jain", jain / n},
                          {"runs", rows}};
      std::cout << name << ": " << ok << "/" << files.size() << " feasible, failed SE "
                << f_se / n << ", all SE " << all_se / n << ", jain " << jain / n << "\n";
    }
    out["schemes"] = per_scheme;
  }

  // DNN min-SE error distribution on a labelled split.
  if (!a.dataset.empty()) {
    if (!have_model) throw ConfigError("--dataset needs --model");
    std::vector<double> errors;
    for (const auto& s : read_jsonl(a.dataset)) {
      const json meta = json::parse(s.meta);
      const double noise = meta.value("sigma2_mw", 1e-15) + meta.value("extra_floor_mw", 0.0);
      const auto e = dnn_c1_errors(model, s, meta.value("s_min", 4.0), noise);
      errors.insert(errors.end(), e.begin(), e.end());
    }
    const Cdf cdf = violation_cdf(errors);
    out["c1_error"] = {{"users", errors.size()},
                       {"fraction_below_0.01", cdf.fraction_below(0.01)},
                       {"cdf_x", cdf.x},
                       {"cdf_F", cdf.F}};
    std::cout << "connected users with min-SE error < 0.01: " << cdf.fraction_below(0.01)
              << " of " << errors.size() << "\n";
  }
  if (a.solutions.empty() && files.empty() && a.dataset.empty()) {
    throw ConfigError("eval needs --scenario, --scenarios, --solutions or --dataset");
  }
  const auto path = out_path(a.out);
  write_json_file(path, out);
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string sweep = "failed=4,8,12";
  int cells = 3;
  int users_per_cell = 0;
  int reps = 5;
  long long opt_sample = 200;
  std::string model;
  std::string out = "bench.json";
};

std::vector<int> parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || s.substr(0, eq) != "failed") {
    throw ConfigError("--sweep must look like failed=4,8,12");
  }
  std::vector<int> v;
  std::stringstream ss(s.substr(eq + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("--sweep: bad value '" + tok + "'");
    }
  }
  if (v.empty()) throw ConfigError("--sweep lists no values");
  return v;
}

int run_bench(const BenchArgs& a, const Common& c) {
  BenchConfig cfg;
  cfg.failed_sizes = parse_sweep(a.sweep);
  cfg.n_compensating = a.cells;
  cfg.users_per_cell = a.users_per_cell;
  cfg.repetitions = a.reps;
  cfg.seed = c.seed;
  cfg.opt_sample = a.opt_sample;
  SurrogateModel model;
  if (!a.model.empty()) {
    model = load_model(a.model);
    cfg.model = &model;
  }
  const auto rows = runtime_bench(cfg);
  json jr = json::array();
  std::vector<double> x, y;
  std::cout << "U^f  clusters  assoc_s      dnn_s        convex_s     opt_count   opt_s\n";
  for (const auto& r : rows) {
    jr.push_back({{"failed", r.failed},
                  {"clusters", r.clusters},
                  {"association_s", r.association_s},
                  {"dnn_inference_s", r.dnn_inference_s},
                  {"convex_solve_s", r.convex_solve_s},
                  {"opt_associations", r.opt_associations},
                  {"opt_per_association_s", r.opt_per_association_s},
                  {"opt_extrapolated_s", r.opt_extrapolated_s},
                  {"opt_extrapolated", r.opt_extrapolated}});
    const double m = static_cast<double>(r.clusters) * r.failed;
    x.push_back(m * std::log(m));
    y.push_back(r.association_s);
    const std::string count = r.opt_associations == std::numeric_limits<long long>::max()
                                  ? "overflow"
                                  : std::to_string(r.opt_associations);
    std::printf("%-4d %-9d %-12.3e %-12.3e %-12.3e %-11s %.3e%s\n", r.failed, r.clusters,
                r.association_s, r.dnn_inference_s, r.convex_solve_s, count.c_str(),
                r.opt_extrapolated_s, r.opt_extrapolated ? " (extrapolated)" : "");
  }
  const double slope = rows.size() >= 2 ? loglog_slope(x, y) : NAN;
  std::cout << "association log-log slope vs L*U^f*log(L*U^f): " << slope << "\n";
  const auto path = out_path(a.out);
  write_json_file(path, {{"config",
                          {{"command", "bench"}, {"sweep", a.sweep}, {"cells", a.cells},
                           {"users_per_cell", a.users_per_cell}, {"reps", a.reps},
                           {"opt_sample", a.opt_sample}, {"model", a.model}, {"seed", c.seed}}},
                         {"rows", jr},
                         {"association_slope", slope}});
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell outage compensation with NOMA: scenarios, solvers, surrogate, metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "noc 1.0");
  Common common;
  app.add_option("--seed", common.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--jobs", common.jobs, "Parallel scenario workers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.footer("Relative output paths are written under $NOC_OUTPUT_DIR when it is set.\n"
             "Exit codes: 0 ok, 1 error, 2 usage, 3 infeasible, 4 enumeration budget exceeded.");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Draw a random outage scenario");
  g->add_option("--cells", gen.cells, "Compensating BSs")->capture_default_str();
  g->add_option("--users", gen.users, "Connected users in total, split evenly over cells")
      ->capture_default_str();
  g->add_option("--failed", gen.failed, "Users of the failed BS")->capture_default_str();
  g->add_option("--ring-factor", gen.ring, "Compensating BS ring radius in cell radii")
      ->capture_default_str();
  g->add_option("--layout", gen.layout, "Subchannel layout: disjoint|reuse")->capture_default_str();
  g->add_option("-o,--out", gen.out, "Scenario JSON")->capture_default_str();
  gen.params.add(g);

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Associate failed users and allocate power");
  s->add_option("--scenario", sol.scenario, "Scenario JSON")->required();
  s->add_option("--mode", sol.mode, "isolated|interference")->capture_default_str();
  s->add_option("--pa", sol.pa, "Power allocation: solver|dnn")->capture_default_str();
  s->add_option("--model", sol.model, "Surrogate model file for --pa dnn");
  s->add_flag("--optimal", sol.optimal, "Exhaustive association search (OPT_NOC)");
  s->add_option("--budget-assoc", sol.budget_assoc, "Max associations for --optimal (0 = none)");
  s->add_option("--budget-seconds", sol.budget_seconds, "Wall-clock cap for --optimal (0 = none)");
  s->add_option("--trace", sol.trace, "Write per-BS barrier iteration traces to this JSON");
  s->add_option("-o,--out", sol.out, "Solution JSON")->capture_default_str();
  sol.solver.add(s);

  DatasetArgs ds;
  auto* d = app.add_subcommand("dataset", "Generate labelled samples (JSONL)");
  d->add_option("--cells", ds.cells, "Compensating BSs")->capture_default_str();
  d->add_option("--users-per-cell", ds.users_per_cell, "Connected users per cell")
      ->capture_default_str();
  d->add_option("--failed", ds.failed, "Failed users")->capture_default_str();
  d->add_option("-n,--samples", ds.n, "Samples to emit")->capture_default_str();
  d->add_option("--ring-factor", ds.ring, "Compensating BS ring radius in cell radii")
      ->capture_default_str();
  d->add_option("--mode", ds.mode, "isolated|interference")->capture_default_str();
  d->add_option("--layout", ds.layout, "disjoint|reuse")->capture_default_str();
  d->add_option("-o,--out", ds.out, "Output JSONL")->capture_default_str();
  ds.params.add(d);
  ds.solver.add(d);
  d->require_subcommand(0, 1);

  SplitArgs sp;
  auto* dsp = d->add_subcommand("split", "Shuffle a JSONL corpus into train/val/test");
  dsp->add_option("--in", sp.in, "Input JSONL")->required();
  dsp->add_option("--ratios", sp.ratios, "train val test fractions")
      ->expected(3)
      ->delimiter(',')
      ->capture_default_str();
  dsp->add_option("--augment", sp.augment, "Permuted copies per training sample")
      ->capture_default_str();
  dsp->add_option("--prefix", sp.prefix, "Output prefix")->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Fit the surrogate MLP");
  t->add_option("--train", tr.train, "Training JSONL")->required();
  t->add_option("--val", tr.val, "Validation JSONL")->required();
  t->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  t->add_option("--batch", tr.cfg.batch)->capture_default_str();
  t->add_option("--lr", tr.cfg.lr)->capture_default_str();
  t->add_option("--decay", tr.cfg.decay, "beta1 or per-epoch lr factor")->capture_default_str();
  t->add_option("--decay-mode", tr.decay_mode, "beta1|lr_schedule")->capture_default_str();
  t->add_option("--hidden", tr.cfg.hidden, "Units per hidden layer")->capture_default_str();
  t->add_option("--layers", tr.cfg.hidden_layers, "Hidden layers")->capture_default_str();
  t->add_option("--encoding", tr.encoding, "Output encoding: log10|linear")->capture_default_str();
  t->add_option("-o,--out", tr.out, "Model file")->capture_default_str();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Compare schemes or solution files");
  e->add_option("--scenario", ev.scenario, "One scenario JSON");
  e->add_option("--scenarios", ev.scenarios, "Directory of scenario JSON files");
  e->add_option("--scheme", ev.schemes, "lc_noc|lc_noc_dnn|opt_noc|no_oc (repeatable)")
      ->capture_default_str();
  e->add_option("--solutions", ev.solutions, "Solution files from `solve` to score");
  e->add_option("--dataset", ev.dataset, "Labelled JSONL for the DNN min-SE error CDF");
  e->add_option("--model", ev.model, "Surrogate model file");
  e->add_option("--mode", ev.mode, "isolated|interference")->capture_default_str();
  e->add_option("--budget-assoc", ev.budget_assoc, "Max associations for opt_noc (0 = none)");
  e->add_option("-o,--out", ev.out, "Report JSON")->capture_default_str();
  ev.solver.add(e);

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Runtime scaling sweep");
  b->add_option("--sweep", bn.sweep, "failed=a,b,c")->capture_default_str();
  b->add_option("--cells", bn.cells, "Compensating BSs")->capture_default_str();
  b->add_option("--users-per-cell", bn.users_per_cell, "0 = enough for 2*U^f clusters")
      ->capture_default_str();
  b->add_option("--reps", bn.reps, "Timing repetitions")->capture_default_str();
  b->add_option("--opt-sample", bn.opt_sample, "OPT_NOC associations timed before extrapolating")
      ->capture_default_str();
  b->add_option("--model", bn.model, "Surrogate model for inference timing");
  b->add_option("-o,--out", bn.out, "Report JSON")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  try {
    if (*g) return run_generate(gen, common);
    if (*s) return run_solve(sol, common);
    if (*dsp) return run_split(sp, common);
    if (*d) return run_dataset(ds, common);
    if (*t) return run_train(tr, common);
    if (*e) return run_eval(ev, common);
    if (*b) return run_bench(bn, common);
  } catch (const Infeasible& ex) {
    std::cout << ex.certificate.dump(2) << "\n";
    return kExitInfeasible;
  } catch (const BudgetExceeded& ex) {
    std::cerr << "error: " << ex.what() << " after " << ex.completed << " associations\n";
    return kExitBudget;
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
