#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "treesvm/dataset.hpp"
#include "treesvm/kernel.hpp"
#include "treesvm/multiclass.hpp"
#include "treesvm/svm_binary.hpp"

namespace treesvm {

struct ExponentRange {
  int lo;
  int hi;

  /// lo, lo+step, ... up to hi inclusive.
  std::vector<int> values(int step) const;
};

struct GridConfig {
  ExponentRange gamma_exponents{-10, 4};
  ExponentRange cost_exponents{-2, 12};
  int exponent_step = 2;
  Strategy strategy = Strategy::cbts;
  std::uint64_t seed = 0;
};

struct GridRecord {
  int gamma_exp = 0;
  int cost_exp = 0;
  double gamma = 0.0;
  double C = 0.0;
  double accuracy = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  std::size_t n_classifiers = 0;
  std::size_t worst_path_evals = 0;
  bool converged = true;
};

struct FailedCell {
  int gamma_exp;
  int cost_exp;
  std::string error;
};

struct GridReport {
  std::vector<GridRecord> records;
  std::vector<FailedCell> failed;
  std::optional<std::size_t> best;

  const GridRecord& best_record() const;
};

/// Outcome of training one strategy at one (gamma, C) and scoring it.
struct TrialResult {
  GridRecord record;
  MulticlassModel model;
};

TrialResult run_trial(const Dataset& train, const Dataset& test, Strategy strategy, KernelParams k,
                      SolverConfig solver, std::uint64_t seed);

/// Highest accuracy; ties go to the smaller train + test time, then the
/// earlier record.
std::optional<std::size_t> select_best(const std::vector<GridRecord>& records);

/// Trains on `train` and scores on `test` at every grid cell. The kernel kind
/// comes from `kernel_kind`; C and gamma are overwritten per cell.
GridReport grid_search(const Dataset& train, const Dataset& test, const GridConfig& cfg,
                       KernelKind kernel_kind = KernelKind::rbf, const SolverConfig& solver_defaults = {});

/// Header: gamma_exp,cost_exp,accuracy,train_s,test_s,n_classifiers
void write_grid_csv(std::ostream& out, const GridReport& report);

}  // namespace treesvm
