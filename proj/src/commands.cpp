#include "ddlab/cli.hpp"

#include "ddlab/classify.hpp"
#include "ddlab/config.hpp"
#include "ddlab/error.hpp"
#include "ddlab/exact_dynamics.hpp"
#include "ddlab/experiment_engine.hpp"
#include "ddlab/gd_simulator.hpp"
#include "ddlab/replica_theory.hpp"
#include "ddlab/svg.hpp"
#include "ddlab/table.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <thread>

namespace ddlab {

namespace {

namespace fs = std::filesystem;

// Command-line overrides and the config key each one sets. --kappa goes to
// sweep.kappas on commands that sweep kappa.
const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"--d", "model.d"},
    {"--n", "model.n"},
    {"--p", "model.p"},
    {"--kappa", "modulation.kappa"},
    {"--sigma-eps", "model.sigma_eps"},
    {"--lambda", "train.lambda"},
    {"--eta", "train.eta"},
    {"--t-grid", "sweep.t_grid"},
    {"--seeds", "train.seeds"},
    {"--seed", "train.base_seed"},
};

void declare_model(Settings& s, const std::string& p) {
  s.declare("model.d", "100");
  s.declare("model.n", "150");
  s.declare("model.p", p);
  s.declare("model.sigma_eps", "0.3");
  s.declare("modulation.sigma1", "1");
  s.declare("train.eta", "0.1");
  s.declare("output.format", "csv");
  s.declare("output.svg", "false");
}

Settings declare_for(const std::string& command) {
  Settings s;
  if (command == "theory-curve" || command == "exact-curve" || command == "simulate") {
    declare_model(s, "70");
    s.declare("modulation.kappa", "100");
    s.declare("train.lambda", "0.0001");
    s.declare("sweep.t_grid", "log:1:1e7:60");
    if (command != "theory-curve") s.declare("train.base_seed", "0");
    if (command == "exact-curve") s.declare("exact.mode", "realized");
    if (command == "simulate") {
      s.declare("train.seeds", "10");
      s.declare("train.update_noise", "0");
    }
  } else if (command == "compare") {
    declare_model(s, "70");
    s.declare("sweep.kappas", "1,10,100");
    s.declare("train.lambda", "0.0001");
    s.declare("train.seeds", "100");
    s.declare("train.base_seed", "0");
    s.declare("sweep.t_grid", "log:10:1e7:40");
  } else if (command == "heatmap") {
    declare_model(s, "70");
    s.declare("modulation.kappa", "100");
    s.declare("sweep.lambda_grid", "log:1e-6:10:40");
    s.declare("sweep.include_infinite_lambda", "true");
    s.declare("sweep.t_grid", "log:1:1e7:60");
  } else if (command == "phase") {
    declare_model(s, "70");
    s.declare("sweep.kappas", "10,100,1000,100000");
    s.declare("train.lambda", "0");
    s.declare("sweep.t_grid", "log:1:1e7:60");
    s.declare("phase.grid_R", "101");
    s.declare("phase.grid_Q", "121");
  } else if (command == "rdecomp") {
    declare_model(s, "50");
    s.set("model.sigma_eps", "0", "defaults");
    s.declare("modulation.sigma2", "0.01");
    s.declare("train.lambda", "0");
    s.declare("sweep.t_grid", "log:1:1e9:90");
  } else {
    throw InvalidArgument("unknown command '" + command + "'");
  }
  return s;
}

ModelDims dims_of(const Settings& s) {
  return {s.integer("model.d"), s.integer("model.p"), s.integer("model.n")};
}

double kappa_of(const Settings& s) {
  const double k = s.real("modulation.kappa");
  if (!(k >= 1.0) || !std::isfinite(k))
    throw InvalidArgument("modulation.kappa must be finite and >= 1");
  return k;
}

ReplicaInputs replica_of(const Settings& s) {
  ReplicaInputs in;
  in.dims = dims_of(s);
  in.sigma1 = s.real("modulation.sigma1");
  in.sigma2 = in.sigma1 / kappa_of(s);
  in.eta = s.real("train.eta");
  in.lambda = s.real("train.lambda");
  in.sigma_eps = s.real("model.sigma_eps");
  in.t = 1.0;
  in.validate();
  return in;
}

struct Product {
  OutputTable table;
  std::optional<SvgKind> svg;
  SvgOptions svg_options;
  bool log_x = true;
};

struct Outputs {
  std::vector<Product> products;
  DataTable phase_background;  // kept alive for the phase rendering
};

DataTable curve_table(const std::vector<MacroObservables>& curve) {
  DataTable t;
  t.columns = {"t", "R", "Q", "L_G"};
  for (const auto& o : curve) t.rows.push_back({o.t, o.R, o.Q, clamp_loss(o.L_G)});
  return t;
}

Outputs compute(const std::string& command, const Settings& s, int threads) {
  Outputs out;
  auto add = [&](const std::string& name, DataTable data, std::optional<SvgKind> kind,
                 SvgOptions options = {}) {
    Product p;
    p.table.command = command;
    p.table.name = name;
    p.table.config = s.values();
    p.table.data = std::move(data);
    p.svg = kind;
    p.svg_options = std::move(options);
    out.products.push_back(std::move(p));
  };
  auto titled = [](std::string title, std::vector<std::string> y = {"L_G"}, bool log_x = true) {
    SvgOptions o;
    o.title = std::move(title);
    o.y = std::move(y);
    o.log_x = log_x;
    return o;
  };

  if (command == "theory-curve") {
    const ReplicaInputs in = replica_of(s);
    const Axis axis = s.axis("sweep.t_grid");
    const std::vector<double> grid = axis.values();
    add("theory_curve", curve_table(theory_curve(in, grid)), SvgKind::lines,
        titled("replica theory L_G(t)", {"L_G"}, axis.scale == AxisScale::log));
  } else if (command == "exact-curve") {
    const ReplicaInputs in = replica_of(s);
    const Axis axis = s.axis("sweep.t_grid");
    std::vector<std::int64_t> grid{0};
    for (const auto t : axis.integer_values())
      if (t > 0) grid.push_back(t);
    const ProblemInstance inst =
        generate_instance(in.dims, Modulation::bipartite(in.dims.d, in.dims.p, in.sigma1, in.sigma2),
                          in.sigma_eps, s.seed("train.base_seed"));
    ExactCurveOptions opts;
    opts.mode = s.word("exact.mode", {"realized", "noise_averaged"}) == "realized"
                    ? ExactMode::realized
                    : ExactMode::noise_averaged;
    add("exact_curve", curve_table(exact_curve(inst, in.eta, in.lambda, grid, opts)), SvgKind::lines,
        titled("exact dynamics L_G(t)", {"L_G"}, axis.scale == AxisScale::log));
  } else if (command == "simulate") {
    const ReplicaInputs in = replica_of(s);
    const Axis axis = s.axis("sweep.t_grid");
    TrainConfig cfg;
    cfg.eta = in.eta;
    cfg.lambda = in.lambda;
    cfg.sgd_noise_std = s.real("train.update_noise");
    cfg.num_seeds = s.integer("train.seeds");
    cfg.base_seed = s.seed("train.base_seed");
    cfg.checkpoints = {0};
    for (const auto t : axis.integer_values())
      if (t > 0) cfg.checkpoints.push_back(t);
    cfg.validate();
    const TrajectoryStats st =
        train(in.dims, Modulation::bipartite(in.dims.d, in.dims.p, in.sigma1, in.sigma2), in.sigma_eps,
              cfg, threads);
    DataTable t;
    t.columns = {"t",        "R_mean",   "R_std",    "Q_mean",   "Q_std", "L_G_mean",
                 "L_G_std",  "L_T_mean", "L_T_std",  "n_used",   "diverged"};
    for (std::size_t k = 0; k < st.checkpoints.size(); ++k) {
      const double lg = st.seeds_used > 0 ? clamp_loss(st.mean_L_G[k]) : st.mean_L_G[k];
      t.rows.push_back({static_cast<double>(st.checkpoints[k]), st.mean_R[k], st.std_R[k], st.mean_Q[k],
                        st.std_Q[k], lg, st.std_L_G[k], st.mean_L_T[k], st.std_L_T[k],
                        static_cast<double>(st.seeds_used), static_cast<double>(st.diverged_seeds.size())});
    }
    add("simulate", std::move(t), SvgKind::lines,
        titled("simulated L_G(t), seed mean", {"L_G_mean"}, axis.scale == AxisScale::log));
  } else if (command == "compare") {
    ComparisonConfig c;
    c.dims = dims_of(s);
    c.kappas = s.reals("sweep.kappas");
    c.sigma1 = s.real("modulation.sigma1");
    c.eta = s.real("train.eta");
    c.lambda = s.real("train.lambda");
    c.sigma_eps = s.real("model.sigma_eps");
    c.t_axis = s.axis("sweep.t_grid");
    c.num_seeds = s.integer("train.seeds");
    c.base_seed = s.seed("train.base_seed");
    c.validate();
    ComparisonResult r = run_comparison(c, threads);
    const bool log_x = c.t_axis.scale == AxisScale::log;
    add("compare_theory", std::move(r.theory), SvgKind::lines, titled("theory L_G(t)", {"L_G"}, log_x));
    add("compare_sim_mean", std::move(r.sim_mean), SvgKind::lines,
        titled("simulation mean and exact dynamics", {"L_G", "exact_L_G"}, log_x));
    add("compare_sim_std", std::move(r.sim_std), SvgKind::lines,
        titled("simulation std of L_G", {"L_G"}, log_x));
  } else if (command == "heatmap") {
    HeatmapConfig h;
    h.dims = dims_of(s);
    h.kappa = kappa_of(s);
    h.sigma1 = s.real("modulation.sigma1");
    h.eta = s.real("train.eta");
    h.sigma_eps = s.real("model.sigma_eps");
    h.lambda_axis = s.axis("sweep.lambda_grid");
    h.include_infinite_lambda = s.flag("sweep.include_infinite_lambda");
    h.t_axis = s.axis("sweep.t_grid");
    h.validate();
    SvgOptions o;
    o.title = "L_G over (t, 1/lambda)";
    add("heatmap", run_heatmap(h, threads), SvgKind::heatmap, o);
  } else if (command == "phase") {
    PhaseConfig p;
    p.dims = dims_of(s);
    p.kappas = s.reals("sweep.kappas");
    p.sigma1 = s.real("modulation.sigma1");
    p.eta = s.real("train.eta");
    p.lambda = s.real("train.lambda");
    p.sigma_eps = s.real("model.sigma_eps");
    p.t_axis = s.axis("sweep.t_grid");
    p.grid_R = s.integer("phase.grid_R");
    p.grid_Q = s.integer("phase.grid_Q");
    p.validate();
    PhaseResult r = run_phase(p, threads);
    out.phase_background = r.background;
    add("phase_background", std::move(r.background), std::nullopt);
    SvgOptions o;
    o.title = "(R, Q) trajectories over L_G";
    add("phase_trajectories", std::move(r.trajectories), SvgKind::phase, o);
  } else if (command == "rdecomp") {
    RDecompositionConfig r;
    r.dims = dims_of(s);
    r.sigma1 = s.real("modulation.sigma1");
    r.sigma2 = s.real("modulation.sigma2");
    r.eta = s.real("train.eta");
    r.lambda = s.real("train.lambda");
    r.sigma_eps = s.real("model.sigma_eps");
    r.t_axis = s.axis("sweep.t_grid");
    r.validate();
    SvgOptions o = titled("R = R1 + R2", {"R1", "R2", "R"}, r.t_axis.scale == AxisScale::log);
    add("rdecomp", run_R_decomposition(r), SvgKind::lines, o);
  }
  return out;
}

int resolve_threads(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw InvalidArgument("--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("DDLAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096)
      throw InvalidArgument("DDLAB_THREADS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Everything is rendered before the first file is opened; if a write fails,
// files already written by this run are removed.
std::vector<std::string> write_outputs(const Outputs& outputs, const Settings& s, const fs::path& dir) {
  const std::string format = s.word("output.format", {"csv", "json"});
  const bool svg = s.flag("output.svg");
  std::vector<std::pair<fs::path, std::string>> files;
  for (const Product& p : outputs.products) {
    files.emplace_back(dir / (p.table.name + "." + format),
                       format == "csv" ? write_csv(p.table) : write_json(p.table));
    if (svg && p.svg) {
      SvgOptions o = p.svg_options;
      if (*p.svg == SvgKind::phase) o.background = &outputs.phase_background;
      files.emplace_back(dir / (p.table.name + ".svg"), render_svg(p.table.data, *p.svg, o));
    }
  }

  std::vector<std::string> written;
  try {
    fs::create_directories(dir);
    for (const auto& [path, content] : files) {
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      written.push_back(path.string());
      if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
      f << content;
      f.close();
      if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& w : written) fs::remove(w, ec);
    throw;
  }
  return written;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ddlab: epoch-wise double descent in a linear teacher-student model"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", format;
  bool svg = false;
  std::optional<int> threads;
  std::map<std::string, std::string> overrides;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"theory-curve", "replica-theory L_G(t) for a bipartite modulation"},
      {"exact-curve", "closed-form GD trajectory of one instance"},
      {"simulate", "seed-averaged gradient descent"},
      {"compare", "theory vs simulation vs exact dynamics over kappa"},
      {"heatmap", "theory L_G over (t, 1/lambda)"},
      {"phase", "(R, Q) trajectories over the L_G plane"},
      {"rdecomp", "R = R1 + R2 block decomposition"},
      {"selfcheck", "oracle-equivalence checks"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "selfcheck") continue;
    sub->add_option("--config", config_path, "experiment file (key = value)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv or json");
    sub->add_flag("--svg", svg, "also write SVG plots");
    sub->add_option_function<int>("--threads", [&](const int& v) { threads = v; }, "thread budget");
    for (const auto& [flag, key] : kFlagKeys)
      sub->add_option_function<std::string>(
          flag, [&, f = flag](const std::string& v) { overrides[f] = v; }, "sets " + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (command == "selfcheck") {
    bool all = true;
    for (const CheckResult& c : run_selfchecks()) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
      all = all && c.pass;
    }
    return all ? kExitOk : kExitNumerical;
  }

  try {
    Settings settings = declare_for(command);
    if (!config_path.empty()) settings.load_file(config_path);
    for (const auto& [flag, key] : kFlagKeys) {
      const auto it = overrides.find(flag);
      if (it == overrides.end()) continue;
      std::string target = key;
      if (flag == "--kappa" && settings.declared("sweep.kappas")) target = "sweep.kappas";
      if (!settings.declared(target))
        throw InvalidArgument(target + ": " + flag + " does not apply to " + command);
      settings.set(target, it->second, flag);
    }
    if (!format.empty()) settings.set("output.format", format, "--format");
    if (svg) settings.set("output.svg", "true", "--svg");
    settings.word("output.format", {"csv", "json"});
    settings.flag("output.svg");
    const int budget = resolve_threads(threads);

    const Outputs outputs = compute(command, settings, budget);
    for (const auto& path : write_outputs(outputs, settings, out_dir)) out << path << "\n";
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "ddlab " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "ddlab " << command << ": " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace ddlab
