#include "treesvm/tuning.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "treesvm/numfmt.hpp"

namespace treesvm {

std::vector<int> ExponentRange::values(int step) const {
  if (step <= 0) throw std::invalid_argument("exponent step must be positive");
  if (lo > hi) throw std::invalid_argument("empty exponent range");
  std::vector<int> out;
  for (int e = lo; e <= hi; e += step) out.push_back(e);
  return out;
}

const GridRecord& GridReport::best_record() const {
  if (!best) throw std::logic_error("grid report has no successful cell");
  return records[*best];
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

TrialResult run_trial(const Dataset& train, const Dataset& test, Strategy strategy, KernelParams k,
                      SolverConfig solver, std::uint64_t seed) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  auto t0 = Clock::now();
  auto model = train_multiclass(strategy, train, k, solver, seed);
  const double train_s = seconds_since(t0);

  t0 = Clock::now();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) correct += model.predict(test.row(i)) == test.label(i);
  const double test_s = seconds_since(t0);

  GridRecord r;
  r.gamma = k.gamma;
  r.C = solver.C;
  r.accuracy = double(correct) / double(test.size());
  r.train_seconds = train_s;
  r.test_seconds = test_s;
  r.n_classifiers = model.num_classifiers();
  r.worst_path_evals = model.worst_path_evals();
  r.converged = model.converged();
  return {r, std::move(model)};
}

std::optional<std::size_t> select_best(const std::vector<GridRecord>& records) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!best) {
      best = i;
      continue;
    }
    const auto& r = records[i];
    const auto& b = records[*best];
    if (r.accuracy > b.accuracy ||
        (r.accuracy == b.accuracy && r.train_seconds + r.test_seconds < b.train_seconds + b.test_seconds))
      best = i;
  }
  return best;
}

GridReport grid_search(const Dataset& train, const Dataset& test, const GridConfig& cfg, KernelKind kernel_kind,
                       const SolverConfig& solver_defaults) {
  if (train.dim() != test.dim()) throw std::invalid_argument("grid_search: train and test dimensions differ");
  const auto gammas = cfg.gamma_exponents.values(cfg.exponent_step);
  const auto costs = cfg.cost_exponents.values(cfg.exponent_step);

  GridReport report;
  for (int ge : gammas) {
    for (int ce : costs) {
      KernelParams k{kernel_kind, std::ldexp(1.0, ge)};
      SolverConfig s = solver_defaults;
      s.C = std::ldexp(1.0, ce);
      try {
        auto trial = run_trial(train, test, cfg.strategy, k, s, cfg.seed);
        trial.record.gamma_exp = ge;
        trial.record.cost_exp = ce;
        report.records.push_back(trial.record);
      } catch (const std::exception& e) {
        report.failed.push_back({ge, ce, e.what()});
      }
    }
  }
  report.best = select_best(report.records);
  return report;
}

void write_grid_csv(std::ostream& out, const GridReport& report) {
  out << "gamma_exp,cost_exp,accuracy,train_s,test_s,n_classifiers\n";
  for (const auto& r : report.records)
    out << r.gamma_exp << ',' << r.cost_exp << ',' << format_double(r.accuracy) << ','
        << format_double(r.train_seconds) << ',' << format_double(r.test_seconds) << ',' << r.n_classifiers
        << '\n';
}

}  // namespace treesvm
