#include "treesvm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace treesvm {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

std::size_t farthest_from(const Dataset& pts, std::span<const double> c) {
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = sq_dist(pts.row(i), c);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

namespace {

ClusterResult lloyd(const Dataset& pts, std::size_t a, std::size_t b, const KMeansConfig& cfg) {
  const std::size_t n = pts.size(), d = pts.dim();
  ClusterResult cr;
  cr.centroids[0].assign(pts.row(a).begin(), pts.row(a).end());
  cr.centroids[1].assign(pts.row(b).begin(), pts.row(b).end());
  cr.assignment.assign(n, 0);

  std::vector<double> sums[2] = {std::vector<double>(d), std::vector<double>(d)};
  std::size_t counts[2];
  for (std::size_t iter = 0; iter < std::max<std::size_t>(1, cfg.max_iter); ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      auto x = pts.row(i);
      cr.assignment[i] = sq_dist(x, cr.centroids[1]) < sq_dist(x, cr.centroids[0]) ? 1 : 0;
    }
    for (int c = 0; c < 2; ++c) {
      const int other = 1 - c;
      if (std::count(cr.assignment.begin(), cr.assignment.end(), c) == 0) {
        // Reseed the empty cluster with the point farthest from the survivor.
        cr.assignment[farthest_from(pts, cr.centroids[other])] = c;
      }
    }

    for (int c = 0; c < 2; ++c) {
      std::fill(sums[c].begin(), sums[c].end(), 0.0);
      counts[c] = 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto x = pts.row(i);
      auto& s = sums[cr.assignment[i]];
      for (std::size_t j = 0; j < d; ++j) s[j] += x[j];
      ++counts[cr.assignment[i]];
    }
    double shift = 0.0;
    for (int c = 0; c < 2; ++c) {
      for (std::size_t j = 0; j < d; ++j) sums[c][j] /= double(counts[c]);
      shift = std::max(shift, std::sqrt(sq_dist(sums[c], cr.centroids[c])));
      cr.centroids[c] = sums[c];
    }

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += sq_dist(pts.row(i), cr.centroids[cr.assignment[i]]);
    cr.sse_history.push_back(sse);
    cr.total_sse = sse;
    cr.iterations = iter + 1;
    if (shift < cfg.tol) break;
  }
  return cr;
}

}  // namespace

ClusterResult kmeans2(const Dataset& pts, const KMeansConfig& cfg) {
  const std::size_t n = pts.size();
  if (n < 2) throw std::invalid_argument("kmeans2: need at least 2 points");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t a = pick(rng);
  const std::size_t b = farthest_from(pts, pts.row(a));
  if (sq_dist(pts.row(a), pts.row(b)) == 0.0)
    throw std::invalid_argument("kmeans2: all points are identical");

  ClusterResult best = lloyd(pts, a, b, cfg);
  for (std::size_t r = 1; r < cfg.restarts; ++r) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (sq_dist(pts.row(i), pts.row(j)) == 0.0) continue;
    auto cr = lloyd(pts, i, j, cfg);
    if (cr.total_sse < best.total_sse) best = std::move(cr);
  }
  return best;
}

std::map<int, int> assign_labels_by_majority(const Dataset& ds, const ClusterResult& cr) {
  if (cr.assignment.size() != ds.size())
    throw std::invalid_argument("majority_partition: assignment does not match dataset");
  std::map<int, std::size_t> in_cluster[2];
  for (std::size_t i = 0; i < ds.size(); ++i) ++in_cluster[cr.assignment[i]][ds.label(i)];

  std::map<int, int> side;
  std::map<int, double> ratio;  // share of the label's instances on its side
  for (int label : ds.present_labels()) {
    const std::size_t c0 = in_cluster[0][label], c1 = in_cluster[1][label];
    side[label] = c1 > c0 ? 1 : 0;
    ratio[label] = double(std::max(c0, c1)) / double(c0 + c1);
  }

  if (side.size() >= 2) {
    for (int s = 0; s < 2; ++s) {
      bool any = std::any_of(side.begin(), side.end(), [&](const auto& kv) { return kv.second == s; });
      if (any) continue;
      int weakest = side.begin()->first;
      for (const auto& [label, r] : ratio)
        if (r < ratio[weakest]) weakest = label;
      side[weakest] = s;
    }
  }
  return side;
}

std::map<int, double> per_class_sse(const Dataset& ds, std::span<const int> labels_in_node,
                                    std::span<const double> centroid) {
  if (centroid.size() != ds.dim()) throw std::invalid_argument("per_class_sse: centroid dimension mismatch");
  std::map<int, double> sse;
  std::map<int, std::size_t> count;
  for (int label : labels_in_node) {
    sse[label] = 0.0;
    count[label] = 0;
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto it = sse.find(ds.label(i));
    if (it == sse.end()) continue;
    it->second += sq_dist(ds.row(i), centroid);
    ++count[ds.label(i)];
  }
  for (const auto& [label, c] : count)
    if (c == 0) throw std::invalid_argument("per_class_sse: label " + std::to_string(label) + " has no instances");
  return sse;
}

LabelPartition majority_partition(const Dataset& ds, const ClusterResult& cr) {
  const auto side = assign_labels_by_majority(ds, cr);
  LabelPartition part;
  for (const auto& [label, s] : side) (s == 0 ? part.left_labels : part.right_labels).push_back(label);

  for (int s = 0; s < 2; ++s) {
    auto& labels = s == 0 ? part.left_labels : part.right_labels;
    if (labels.empty()) continue;
    auto sse = per_class_sse(ds, labels, cr.centroids[s]);
    part.sse.insert(sse.begin(), sse.end());
    // Labels arrive ascending from the map, so a stable sort keeps id order on ties.
    std::stable_sort(labels.begin(), labels.end(), [&](int a, int b) { return sse[a] < sse[b]; });
  }
  return part;
}

}  // namespace treesvm
