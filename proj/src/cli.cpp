#include "treesvm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "treesvm/bench.hpp"
#include "treesvm/dataset.hpp"
#include "treesvm/kernel.hpp"
#include "treesvm/multiclass.hpp"
#include "treesvm/tuning.hpp"

namespace treesvm {

namespace {

namespace fs = std::filesystem;

/// Input problems the user can fix: exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-convergence under --strict: exit 3.
struct StrictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string strategy = "cbts";
  std::string kernel = "rbf";
  int gamma_exp = 0;
  int cost_exp = 0;
  bool grid = false;
  int grid_step = 2;
  std::uint64_t seed = 0;
  std::string test_file;
  double train_fraction = 2.0 / 3.0;
  std::string out;
  bool strict = false;
  std::size_t max_iter = 0;
};

Dataset load_or_usage(const std::string& path) {
  try {
    return load_libsvm(path);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

Strategy strategy_or_usage(const std::string& s) {
  try {
    return strategy_from_string(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SolverConfig solver_config(const CommonOptions& o) {
  SolverConfig s;
  s.cache_bytes = cache_budget_from_env();
  s.max_iter = o.max_iter;
  return s;
}

std::string percent(double acc) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * acc << '%';
  return os.str();
}

std::string dataset_name(const std::string& path) { return fs::path(path).stem().string(); }

PreparedData prepare(const std::string& data_path, const CommonOptions& o) {
  Dataset full = load_or_usage(data_path);
  std::optional<Dataset> test;
  if (!o.test_file.empty()) test = load_or_usage(o.test_file);
  try {
    return prepare_data(full, test, SplitConfig{o.train_fraction, o.seed});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

GridConfig grid_config(const CommonOptions& o, bool fixed_gamma, bool fixed_cost) {
  GridConfig g;
  g.exponent_step = o.grid_step;
  g.seed = o.seed;
  g.strategy = strategy_or_usage(o.strategy);
  if (fixed_gamma) g.gamma_exponents = {o.gamma_exp, o.gamma_exp};
  if (fixed_cost) g.cost_exponents = {o.cost_exp, o.cost_exp};
  return g;
}

void add_data_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Seed for the split shuffle and k-means");
  cmd->add_option("--test-file", o.test_file, "Separate LIBSVM test file instead of a random split");
  cmd->add_option("--train-fraction", o.train_fraction, "Training share of a random split")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--kernel", o.kernel, "Kernel: rbf or linear")->check(CLI::IsMember({"rbf", "linear"}));
  cmd->add_flag("--strict", o.strict, "Exit 3 when any solver fails to converge");
  cmd->add_option("--max-iter", o.max_iter, "SMO iteration cap per binary SVM (0 = automatic)");
}

void warn_all(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// --- train ---

int cmd_train(const std::string& data_path, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Strategy strategy = strategy_or_usage(o.strategy);
  auto data = prepare(data_path, o);
  warn_all(err, data.warnings);

  KernelParams k{kernel_kind_from_string(o.kernel), std::ldexp(1.0, o.gamma_exp)};
  SolverConfig solver = solver_config(o);
  solver.C = std::ldexp(1.0, o.cost_exp);

  if (o.grid) {
    auto report = grid_search(data.train, data.test, grid_config(o, false, false), k.kind, solver);
    if (!report.best) throw UsageError("every grid cell failed: " + report.failed.front().error);
    const auto& b = report.best_record();
    out << "grid: " << report.records.size() << " cells, best gamma=2^" << b.gamma_exp << " C=2^" << b.cost_exp
        << " accuracy=" << percent(b.accuracy) << '\n';
    k.gamma = b.gamma;
    solver.C = b.C;
  }

  auto trial = run_trial(data.train, data.test, strategy, k, solver, o.seed);
  const auto& r = trial.record;
  if (!trial.model.converged()) {
    if (o.strict) throw StrictError("solver did not converge");
    err << "warning: at least one binary SVM did not converge\n";
  }
  out << "dataset=" << dataset_name(data_path) << " strategy=" << to_string(strategy) << " gamma=2^"
      << std::ilogb(k.gamma) << " C=2^" << std::ilogb(solver.C) << " train=" << data.train.size()
      << " test=" << data.test.size() << " classifiers=" << r.n_classifiers << " worst_path=" << r.worst_path_evals
      << " train_s=" << r.train_seconds << " test_s=" << r.test_seconds << '\n'
      << "accuracy " << percent(r.accuracy) << '\n';

  if (!o.out.empty()) {
    save_multiclass(o.out, trial.model);
    std::ofstream sc(fs::path(o.out) / "scaler.csv");
    write_scaler(sc, data.scaler);
    out << "model written to " << o.out << '\n';
  }
  return kExitOk;
}

// --- evaluate ---

int cmd_evaluate(const std::string& model_dir, const std::string& data_path, std::ostream& out) {
  MulticlassModel model;
  Scaler scaler;
  try {
    model = load_multiclass(model_dir);
    std::ifstream sc(fs::path(model_dir) / "scaler.csv");
    if (!sc) throw std::runtime_error("cannot open '" + (fs::path(model_dir) / "scaler.csv").string() + "'");
    scaler = read_scaler(sc);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  Dataset raw = load_or_usage(data_path);
  if (raw.dim() > model.dim)
    throw UsageError("dimension mismatch: data has " + std::to_string(raw.dim()) + " features, model expects " +
                     std::to_string(model.dim));
  if (raw.dim() < model.dim) {
    std::vector<double> vals(raw.size() * model.dim, 0.0);
    for (std::size_t i = 0; i < raw.size(); ++i)
      std::copy(raw.row(i).begin(), raw.row(i).end(), vals.begin() + i * model.dim);
    raw = Dataset(model.dim, std::move(vals), raw.labels(), raw.label_names());
  }
  if (scaler.dim() != model.dim) throw UsageError("scaler dimension does not match model");

  const Dataset ds = align_labels(apply_scaler(scaler, raw), model.label_names);
  const std::size_t k = ds.num_classes();
  std::vector<std::size_t> confusion(k * k, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int pred = model.predict(ds.row(i));
    ++confusion[ds.label(i) * k + pred];
    correct += pred == ds.label(i);
  }
  const double acc = double(correct) / double(ds.size());
  out << "accuracy " << percent(acc) << " (" << correct << "/" << ds.size() << ")\n";
  out << "confusion (rows: true, columns: predicted)\n";
  out << "true\\pred";
  for (std::size_t c = 0; c < model.label_names.size(); ++c) out << ',' << ds.label_names()[c];
  out << '\n';
  for (std::size_t t = 0; t < k; ++t) {
    out << ds.label_names()[t];
    for (std::size_t p = 0; p < model.label_names.size(); ++p) out << ',' << confusion[t * k + p];
    out << '\n';
  }
  return kExitOk;
}

// --- grid ---

int cmd_grid(const std::string& data_path, const CommonOptions& o, bool gamma_set, bool cost_set,
             std::ostream& out, std::ostream& err) {
  auto data = prepare(data_path, o);
  warn_all(err, data.warnings);
  SolverConfig solver = solver_config(o);
  auto report = grid_search(data.train, data.test, grid_config(o, gamma_set, cost_set),
                            kernel_kind_from_string(o.kernel), solver);
  for (const auto& f : report.failed)
    err << "cell gamma=2^" << f.gamma_exp << " C=2^" << f.cost_exp << " failed: " << f.error << '\n';
  if (o.strict)
    for (const auto& r : report.records)
      if (!r.converged) throw StrictError("solver did not converge at a grid cell");

  if (o.out.empty()) {
    write_grid_csv(out, report);
  } else {
    std::ofstream f(o.out);
    if (!f) throw UsageError("cannot write '" + o.out + "'");
    write_grid_csv(f, report);
  }
  if (report.best) {
    const auto& b = report.best_record();
    err << "best gamma=2^" << b.gamma_exp << " C=2^" << b.cost_exp << " accuracy " << percent(b.accuracy) << '\n';
  }
  return kExitOk;
}

// --- bench ---

int cmd_bench(const std::vector<std::string>& paths, const std::vector<std::string>& strategies,
              const CommonOptions& o, bool gamma_set, bool cost_set, std::ostream& out, std::ostream& err) {
  BenchConfig cfg;
  if (!strategies.empty()) {
    cfg.strategies.clear();
    for (const auto& s : strategies) cfg.strategies.push_back(strategy_or_usage(s));
  }
  cfg.grid = grid_config(o, gamma_set, cost_set);
  cfg.kernel = kernel_kind_from_string(o.kernel);
  cfg.solver = solver_config(o);

  std::vector<BenchDataset> inputs;
  std::vector<BenchmarkRow> failed_inputs;
  for (const auto& p : paths) {
    try {
      auto data = prepare(p, o);
      warn_all(err, data.warnings);
      inputs.push_back({dataset_name(p), std::move(data)});
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      for (Strategy s : cfg.strategies) {
        BenchmarkRow row;
        row.dataset = dataset_name(p);
        row.strategy = s;
        row.status = "error: input";
        failed_inputs.push_back(row);
      }
    }
  }

  auto rows = run_bench(inputs, cfg);
  rows.insert(rows.end(), failed_inputs.begin(), failed_inputs.end());

  for (const auto& r : rows) {
    err << std::left << std::setw(14) << r.dataset << std::setw(6) << to_string(r.strategy);
    if (r.status.rfind("error", 0) == 0) {
      err << r.status << '\n';
      continue;
    }
    err << "gamma=2^" << r.gamma_exp << " C=2^" << r.cost_exp << " acc=" << percent(r.accuracy)
        << " train_s=" << r.train_seconds << " test_s=" << r.test_seconds << " classifiers=" << r.classifiers_trained
        << " worst_path=" << r.worst_path_evals << '\n';
    if (o.strict && r.status == "not-converged") throw StrictError("solver did not converge for " + r.dataset);
  }

  if (o.out.empty()) {
    write_bench_csv(out, rows, inputs);
  } else {
    std::ofstream f(o.out);
    if (!f) throw UsageError("cannot write '" + o.out + "'");
    write_bench_csv(f, rows, inputs);
  }
  return kExitOk;
}

// --- synth ---

struct SynthOptions {
  int classes = 6;
  int per_class = 100;
  int dim = 5;
  double spread = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthOptions& s, std::ostream& out) {
  Dataset ds;
  try {
    ds = synth_blobs(s.classes, s.per_class, s.dim, s.spread, s.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (s.out.empty()) {
    write_libsvm(out, ds);
  } else {
    std::ofstream f(s.out);
    if (!f) throw UsageError("cannot write '" + s.out + "'");
    write_libsvm(f, ds);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiclass kernel SVMs: centroid-based binary tree (CBTS), one-vs-one and one-vs-all", "treesvm"};
  app.require_subcommand(1);

  CommonOptions o;
  std::string data_path, model_dir;
  std::vector<std::string> bench_paths, bench_strategies;
  SynthOptions synth;

  auto* train = app.add_subcommand("train", "Train a multiclass model and report hold-out accuracy");
  train->add_option("data", data_path, "LIBSVM training file")->required();
  train->add_option("--strategy", o.strategy, "cbts, ovo or ova");
  train->add_option("--gamma-exp", o.gamma_exp, "RBF gamma = 2^EXP");
  train->add_option("--cost-exp", o.cost_exp, "C = 2^EXP");
  train->add_flag("--grid", o.grid, "Pick gamma and C by grid search on the hold-out split first");
  train->add_option("--grid-step", o.grid_step, "Exponent step of the grid")->check(CLI::PositiveNumber);
  train->add_option("--out", o.out, "Directory to write the model to");
  add_data_options(train, o);

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a LIBSVM file");
  evaluate->add_option("model", model_dir, "Model directory written by train --out")->required();
  evaluate->add_option("data", data_path, "LIBSVM file")->required();

  auto* grid = app.add_subcommand("grid", "Grid search over gamma and C, CSV report");
  grid->add_option("data", data_path, "LIBSVM file")->required();
  grid->add_option("--strategy", o.strategy, "cbts, ovo or ova");
  auto* grid_gamma = grid->add_option("--gamma-exp", o.gamma_exp, "Fix gamma = 2^EXP instead of sweeping it");
  auto* grid_cost = grid->add_option("--cost-exp", o.cost_exp, "Fix C = 2^EXP instead of sweeping it");
  grid->add_flag("--grid", o.grid, "Accepted for symmetry with train; grid is always on here");
  grid->add_option("--grid-step", o.grid_step, "Exponent step of the grid")->check(CLI::PositiveNumber);
  grid->add_option("--out", o.out, "CSV output path (default stdout)");
  add_data_options(grid, o);

  auto* bench = app.add_subcommand("bench", "Compare strategies at their grid-best cells");
  bench->add_option("data", bench_paths, "LIBSVM files")->required();
  bench->add_option("--strategy", bench_strategies, "Strategies to run (repeatable; default all three)");
  auto* bench_gamma = bench->add_option("--gamma-exp", o.gamma_exp, "Fix gamma = 2^EXP instead of sweeping it");
  auto* bench_cost = bench->add_option("--cost-exp", o.cost_exp, "Fix C = 2^EXP instead of sweeping it");
  bench->add_flag("--grid", o.grid, "Accepted for symmetry with train; grid is always on here");
  bench->add_option("--grid-step", o.grid_step, "Exponent step of the grid")->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out, "CSV output path (default stdout)");
  add_data_options(bench, o);

  auto* synth_cmd = app.add_subcommand("synth", "Write Gaussian blobs as a LIBSVM file");
  synth_cmd->add_option("--classes", synth.classes)->check(CLI::Range(2, 1 << 20));
  synth_cmd->add_option("--per-class", synth.per_class)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--dim", synth.dim)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--spread", synth.spread)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(data_path, o, out, err);
    if (*evaluate) return cmd_evaluate(model_dir, data_path, out);
    if (*grid) return cmd_grid(data_path, o, grid_gamma->count() > 0, grid_cost->count() > 0, out, err);
    if (*bench)
      return cmd_bench(bench_paths, bench_strategies, o, bench_gamma->count() > 0, bench_cost->count() > 0, out, err);
    if (*synth_cmd) return cmd_synth(synth, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StrictError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace treesvm
