#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "treesvm/dataset.hpp"

namespace treesvm {

struct ClusterResult {
  std::vector<double> centroids[2];
  std::vector<int> assignment;  ///< 0 or 1 per instance
  double total_sse = 0.0;
  /// SSE after each Lloyd iteration, non-increasing.
  std::vector<double> sse_history;
  std::size_t iterations = 0;
};

struct KMeansConfig {
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double tol = 1e-6;
  /// Lloyd runs; the first starts from the farthest pair, the rest from
  /// random point pairs. The lowest final SSE wins.
  std::size_t restarts = 10;
};

/// 2-means by Lloyd iterations, first seeded with a random point and the point
/// farthest from it, then restarted from random pairs. Throws std::invalid_argument when all points coincide.
ClusterResult kmeans2(const Dataset& points, const KMeansConfig& cfg = {});

/// Labels split across the two clusters, each side ordered by ascending
/// per-class SSE (ties by label id).
struct LabelPartition {
  std::vector<int> left_labels;
  std::vector<int> right_labels;
  std::map<int, double> sse;
};

/// Which cluster (0 = left, 1 = right) each present label goes to: the one
/// holding the strict majority of its instances, 50/50 going left. If every
/// label lands on one side, the label with the weakest majority moves over.
std::map<int, int> assign_labels_by_majority(const Dataset& ds, const ClusterResult& cr);

/// Sum over instances of `label` in `labels_in_node` of |x - centroid|^2.
std::map<int, double> per_class_sse(const Dataset& ds, std::span<const int> labels_in_node,
                                    std::span<const double> centroid);

LabelPartition majority_partition(const Dataset& ds, const ClusterResult& cr);

}  // namespace treesvm
