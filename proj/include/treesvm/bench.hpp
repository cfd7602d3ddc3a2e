#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "treesvm/dataset.hpp"
#include "treesvm/multiclass.hpp"
#include "treesvm/tuning.hpp"

namespace treesvm {

/// Relabels `ds` against an existing alphabet. Names not in `alphabet` are
/// appended after it, so they can never match a prediction.
Dataset align_labels(const Dataset& ds, const std::vector<std::string>& alphabet);

/// Scaled train/test pair ready for training.
struct PreparedData {
  Dataset train;
  Dataset test;
  Scaler scaler;
  std::vector<std::string> warnings;
};

/// Splits `full` per `split` unless `separate_test` is given, then fits the
/// scaler on the training part and applies it to both.
PreparedData prepare_data(const Dataset& full, const std::optional<Dataset>& separate_test,
                          const SplitConfig& split);

struct BenchmarkRow {
  std::string dataset;
  Strategy strategy = Strategy::cbts;
  int gamma_exp = 0;
  int cost_exp = 0;
  double gamma = 0.0;
  double C = 0.0;
  double accuracy = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  std::size_t classifiers_trained = 0;
  std::size_t worst_path_evals = 0;
  std::string status = "ok";

  bool operator==(const BenchmarkRow&) const = default;
};

struct BenchDataset {
  std::string name;
  PreparedData data;
};

struct BenchConfig {
  std::vector<Strategy> strategies{Strategy::cbts, Strategy::ovo, Strategy::ova};
  GridConfig grid;  ///< strategy field ignored; one search per entry of `strategies`
  KernelKind kernel = KernelKind::rbf;
  SolverConfig solver;
};

/// One row per (dataset, strategy) at the strategy's grid-best cell. A cell
/// grid with no successful trial yields a row whose status holds the error.
std::vector<BenchmarkRow> run_bench(const std::vector<BenchDataset>& inputs, const BenchConfig& cfg);

/// Rows, a blank line, then a per-dataset table of formula classifier counts.
void write_bench_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows,
                     const std::vector<BenchDataset>& inputs);
/// Reads the row section written by write_bench_csv.
std::vector<BenchmarkRow> read_bench_csv(std::istream& in);

}  // namespace treesvm
