#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "treesvm/dataset.hpp"
#include "treesvm/kernel.hpp"
#include "treesvm/svm_binary.hpp"

namespace treesvm {

enum class Strategy { cbts, ovo, ova };

std::string to_string(Strategy s);
/// Throws std::invalid_argument("unknown strategy ...").
Strategy strategy_from_string(const std::string& s);

/// Node of a centroid-based binary tree. Leaves carry a label; internal nodes
/// carry the SVM that routes to `left` (decision >= 0) or `right`.
struct CbtsNode {
  int label = -1;
  int left = -1;
  int right = -1;
  std::vector<int> left_labels;
  std::vector<int> right_labels;
  BinarySvmModel model;

  bool is_leaf() const noexcept { return left < 0; }
};

/// Flat node storage; nodes[0] is the root and internal nodes precede their
/// children (pre-order).
struct CbtsTree {
  std::vector<CbtsNode> nodes;

  std::size_t num_internal() const;
  /// Leaf labels in left-to-right order.
  std::vector<int> leaf_labels() const;
  /// Longest root-to-leaf path, counted in SVM evaluations.
  std::size_t height() const;
};

struct OvoEnsemble {
  std::map<std::pair<int, int>, BinarySvmModel> models;  ///< key (a, b), a < b; +1 means a
};

struct OvaEnsemble {
  std::map<int, BinarySvmModel> models;  ///< +1 means the key label
};

struct MulticlassModel {
  std::variant<CbtsTree, OvoEnsemble, OvaEnsemble> body;
  KernelParams kernel;
  double C = 1.0;
  std::size_t dim = 0;
  std::vector<std::string> label_names;

  Strategy strategy() const;
  int predict(std::span<const double> z) const;
  std::size_t num_classifiers() const;
  /// Worst-case SVM evaluations for one prediction.
  std::size_t worst_path_evals() const;
  bool converged() const;
};

struct CbtsPrediction {
  int label;
  std::size_t evaluations;
};

/// Root labels split by 2-means and majority vote, later levels split at the
/// midpoint of the SSE-ordered label sequence (extra label goes left).
MulticlassModel build_cbts(const Dataset& train, const KernelParams& k, const SolverConfig& cfg,
                           std::uint64_t seed);
MulticlassModel train_ovo(const Dataset& train, const KernelParams& k, const SolverConfig& cfg);
MulticlassModel train_ova(const Dataset& train, const KernelParams& k, const SolverConfig& cfg);
MulticlassModel train_multiclass(Strategy s, const Dataset& train, const KernelParams& k,
                                 const SolverConfig& cfg, std::uint64_t seed);

/// Builds the tree below a given root split, skipping clustering.
CbtsTree build_cbts_tree(const Dataset& train, const std::vector<int>& left_labels,
                         const std::vector<int>& right_labels, const KernelParams& k,
                         const SolverConfig& cfg);

CbtsPrediction predict_cbts(const CbtsTree& tree, std::span<const double> z);
/// Majority vote; ties go to the larger sum of winning margins, then the smaller id.
int predict_ovo(const OvoEnsemble& ovo, std::span<const double> z);
/// Largest decision value; ties go to the smaller id.
int predict_ova(const OvaEnsemble& ova, std::span<const double> z);

struct ClassifierCount {
  std::size_t train_count;
  std::size_t worst_case_evals;
};

/// Formula counts for N classes. The CBTS evaluation bound assumes an even
/// root split; MulticlassModel::worst_path_evals() reports the actual tree.
ClassifierCount classifier_count(Strategy s, std::size_t n_classes);

double accuracy(const MulticlassModel& m, const Dataset& ds);

/// Directory layout: manifest.txt plus one binary model file per classifier.
void save_multiclass(const std::filesystem::path& dir, const MulticlassModel& m);
MulticlassModel load_multiclass(const std::filesystem::path& dir);

/// Nested parenthesized label ids, e.g. "((0 2) 1)".
std::string cbts_topology(const CbtsTree& tree);

}  // namespace treesvm
