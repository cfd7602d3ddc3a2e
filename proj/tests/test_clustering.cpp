#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "support/helpers.hpp"
#include "treesvm/clustering.hpp"

using namespace treesvm;

namespace {

double sse_of(const std::vector<std::vector<double>>& pts, const std::vector<int>& side) {
  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    std::vector<double> c(pts[0].size(), 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (side[i] == s) {
        for (std::size_t j = 0; j < c.size(); ++j) c[j] += pts[i][j];
        ++n;
      }
    if (n == 0) return std::numeric_limits<double>::infinity();
    for (auto& v : c) v /= double(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (side[i] == s)
        for (std::size_t j = 0; j < c.size(); ++j) total += (pts[i][j] - c[j]) * (pts[i][j] - c[j]);
  }
  return total;
}

/// Exact optimum of 2-means in the plane: the optimal clusters are separated
/// by a line, and some optimal separator passes through two input points.
double best_two_means_2d(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> side(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = pts[b][0] - pts[a][0], dy = pts[b][1] - pts[a][1];
      for (std::size_t i = 0; i < n; ++i) {
        const double cross = dx * (pts[i][1] - pts[a][1]) - dy * (pts[i][0] - pts[a][0]);
        side[i] = cross > 0.0 ? 1 : 0;
      }
      for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb) {
          side[a] = sa;
          side[b] = sb;
          best = std::min(best, sse_of(pts, side));
        }
    }
  return best;
}

}  // namespace

TEST_CASE("kmeans2 separates two obvious blobs") {
  auto ds = testing::from_rows({{0.0}, {0.1}, {10.0}, {10.1}}, {0, 0, 0, 0}, 1);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto cr = kmeans2(ds, {.seed = seed});
    CHECK(cr.assignment[0] == cr.assignment[1]);
    CHECK(cr.assignment[2] == cr.assignment[3]);
    CHECK(cr.assignment[0] != cr.assignment[2]);
    const int lo = cr.assignment[0];
    CHECK(cr.centroids[lo][0] == doctest::Approx(0.05));
    CHECK(cr.centroids[1 - lo][0] == doctest::Approx(10.05));
    CHECK(cr.total_sse == doctest::Approx(4 * 0.05 * 0.05));
  }
}

TEST_CASE("Lloyd SSE never increases and matches the assignment") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 40; ++t) {
    auto ds = testing::random_dataset(rng, 20 + t * 5, 1 + t % 5, 1);
    auto cr = kmeans2(ds, {.seed = std::uint64_t(t)});
    for (std::size_t k = 1; k < cr.sse_history.size(); ++k)
      CHECK(cr.sse_history[k] <= cr.sse_history[k - 1] + 1e-12);
    CHECK(std::count(cr.assignment.begin(), cr.assignment.end(), 0) > 0);
    CHECK(std::count(cr.assignment.begin(), cr.assignment.end(), 1) > 0);
    double sse = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = 0; j < ds.dim(); ++j) {
        const double d = ds.row(i)[j] - cr.centroids[cr.assignment[i]][j];
        sse += d * d;
      }
    CHECK(cr.total_sse == doctest::Approx(sse).epsilon(1e-12));
  }
}

TEST_CASE("kmeans2 lands within 5% of the exact 2-D optimum") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 10; ++t) {
    auto ds = testing::random_dataset(rng, 50, 2, 1);
    const double opt = best_two_means_2d(testing::rows_of(ds));
    auto cr = kmeans2(ds, {.seed = std::uint64_t(t)});
    CHECK(cr.total_sse <= 1.05 * opt + 1e-12);
    CHECK(cr.total_sse >= opt - 1e-9);
  }
}

TEST_CASE("kmeans2 determinism and errors") {
  std::mt19937_64 rng(47);
  auto ds = testing::random_dataset(rng, 60, 3, 1);
  auto a = kmeans2(ds, {.seed = 5});
  auto b = kmeans2(ds, {.seed = 5});
  CHECK(a.assignment == b.assignment);
  CHECK(a.centroids[0] == b.centroids[0]);
  CHECK(a.total_sse == b.total_sse);

  CHECK_THROWS_AS(kmeans2(testing::from_rows({{1, 2}, {1, 2}, {1, 2}}, {0, 0, 0}, 1)), std::invalid_argument);
  CHECK_THROWS_AS(kmeans2(testing::from_rows({{1, 2}}, {0}, 1)), std::invalid_argument);
}

TEST_CASE("majority rule and 50/50 ties") {
  // Label 0: 8 of 10 in cluster 0. Label 1: 5 and 5. Label 2: all in cluster 1.
  std::vector<std::vector<double>> rows;
  std::vector<int> labels, assignment;
  auto add = [&](int label, int cluster, int count) {
    for (int i = 0; i < count; ++i) {
      rows.push_back({double(rows.size())});
      labels.push_back(label);
      assignment.push_back(cluster);
    }
  };
  add(0, 0, 8);
  add(0, 1, 2);
  add(1, 0, 5);
  add(1, 1, 5);
  add(2, 1, 6);
  auto ds = testing::from_rows(rows, labels, 3);
  ClusterResult cr;
  cr.assignment = assignment;
  cr.centroids[0] = {0.0};
  cr.centroids[1] = {20.0};
  auto side = assign_labels_by_majority(ds, cr);
  CHECK(side[0] == 0);
  CHECK(side[1] == 0);
  CHECK(side[2] == 1);
  auto part = majority_partition(ds, cr);
  CHECK(part.right_labels == std::vector<int>{2});
  CHECK(part.left_labels.size() == 2);
}

TEST_CASE("all labels on one side: the weakest majority moves over") {
  // Both labels lean to cluster 0; label 1 leans less (6/10 vs 9/10).
  std::vector<std::vector<double>> rows;
  std::vector<int> labels, assignment;
  for (int i = 0; i < 20; ++i) {
    rows.push_back({double(i)});
    labels.push_back(i < 10 ? 0 : 1);
    const int k = i % 10;
    assignment.push_back(i < 10 ? (k < 9 ? 0 : 1) : (k < 6 ? 0 : 1));
  }
  auto ds = testing::from_rows(rows, labels, 2);
  ClusterResult cr;
  cr.assignment = assignment;
  cr.centroids[0] = {5.0};
  cr.centroids[1] = {15.0};
  auto part = majority_partition(ds, cr);
  CHECK(part.left_labels == std::vector<int>{0});
  CHECK(part.right_labels == std::vector<int>{1});
}

TEST_CASE("k-means isolating one label puts it alone on one side") {
  // Labels 0 and 1 close together, label 2 far away.
  std::mt19937_64 rng(53);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  const double centers[3][2] = {{0, 0}, {0.5, 0}, {10, 10}};
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 15; ++i) {
      rows.push_back({centers[l][0] + noise(rng), centers[l][1] + noise(rng)});
      labels.push_back(l);
    }
  auto ds = testing::from_rows(rows, labels, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto part = majority_partition(ds, kmeans2(ds, {.seed = seed}));
    const auto& alone = part.left_labels.size() == 1 ? part.left_labels : part.right_labels;
    const auto& pair = part.left_labels.size() == 1 ? part.right_labels : part.left_labels;
    CHECK(alone == std::vector<int>{2});
    CHECK(std::set<int>(pair.begin(), pair.end()) == std::set<int>{0, 1});
  }
}

TEST_CASE("per_class_sse examples") {
  auto at_center = testing::from_rows({{1.0, 1.0}}, {0}, 1);
  std::vector<int> only0{0};
  CHECK(per_class_sse(at_center, only0, std::vector<double>{1.0, 1.0}).at(0) == 0.0);

  auto two = testing::from_rows({{1.0, 0.0}, {0.0, -2.0}}, {0, 0}, 1);
  CHECK(per_class_sse(two, only0, std::vector<double>{0.0, 0.0}).at(0) == doctest::Approx(5.0));

  std::vector<int> missing{0, 1};
  auto ds = testing::from_rows({{1.0}}, {0}, 2);
  CHECK_THROWS_AS(per_class_sse(ds, missing, std::vector<double>{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(per_class_sse(ds, only0, std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("per-class SSEs sum to the cluster SSE when labels follow their clusters") {
  auto ds = synth_blobs(4, 20, 2, 0.05, 61);
  auto cr = kmeans2(ds, {.seed = 3});
  auto part = majority_partition(ds, cr);
  // Each blob sits wholly in one cluster, so label sides mirror the clustering.
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& side = cr.assignment[i] == 0 ? part.left_labels : part.right_labels;
    REQUIRE(std::find(side.begin(), side.end(), ds.label(i)) != side.end());
  }
  double total = 0.0;
  for (const auto& [label, s] : part.sse) total += s;
  CHECK(total == doctest::Approx(cr.total_sse).epsilon(1e-12));
}

TEST_CASE("majority_partition is an ordered disjoint cover") {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 30; ++t) {
    const int n_labels = 2 + t % 9;
    auto ds = testing::random_dataset(rng, 10 * n_labels, 2, n_labels);
    auto cr = kmeans2(ds, {.seed = std::uint64_t(t)});
    auto part = majority_partition(ds, cr);
    CHECK(!part.left_labels.empty());
    CHECK(!part.right_labels.empty());
    std::set<int> all(part.left_labels.begin(), part.left_labels.end());
    all.insert(part.right_labels.begin(), part.right_labels.end());
    CHECK(all.size() == std::size_t(n_labels));
    CHECK(part.left_labels.size() + part.right_labels.size() == std::size_t(n_labels));
    for (const auto* side : {&part.left_labels, &part.right_labels})
      for (std::size_t k = 1; k < side->size(); ++k) {
        const double a = part.sse.at((*side)[k - 1]), b = part.sse.at((*side)[k]);
        CHECK((a < b || (a == b && (*side)[k - 1] < (*side)[k])));
      }
  }
}
