#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treesvm {

/// Raised for malformed input files. what() names the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Labeled dense feature vectors.
///
/// Features are stored row-major in one buffer. Labels are small integer ids
/// (0..num_classes()-1) indexing into label_names, which keeps the original
/// file labels in first-appearance order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::vector<double> values, std::vector<int> labels,
          std::vector<std::string> label_names);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  int label(std::size_t i) const { return labels_[i]; }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }
  std::size_t num_classes() const noexcept { return label_names_.size(); }

  /// Distinct label ids actually present, ascending.
  std::vector<int> present_labels() const;

  /// Rows at the given indices, same label alphabet.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Append a row. Dimension must match (or set it when the dataset is empty).
  void push_back(std::span<const double> x, int label);

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<std::string> label_names_;
};

Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm_string(const std::string& text);
Dataset load_libsvm(const std::string& path);

/// Writes `label idx:val ...` lines, skipping zeros, full round-trip precision.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// Per-feature min/max fitted on training data.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dim() const noexcept { return min.size(); }
};

Scaler fit_scaler(const Dataset& train);

/// Maps each feature to [0,1] by the fitted range and clamps. Constant
/// features map to 0.
Dataset apply_scaler(const Scaler& s, const Dataset& ds);

/// Two-row CSV: min line, then max line.
void write_scaler(std::ostream& out, const Scaler& s);
Scaler read_scaler(std::istream& in);

struct SplitConfig {
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

/// Seeded shuffle, then the first ceil(train_fraction * n) rows train.
Split shuffle_split(const Dataset& ds, const SplitConfig& cfg);

/// Gaussian blobs around distinct lattice corners (spacing 1), one per class.
Dataset synth_blobs(int n_classes, int per_class, int dim, double spread, std::uint64_t seed);

}  // namespace treesvm
