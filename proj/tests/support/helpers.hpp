#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treesvm/dataset.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(TREESVM_DATA_DIR) + "/" + name; }

/// n points uniform in [-1,1]^d with labels drawn from `n_labels` classes,
/// every class guaranteed at least one row when n >= n_labels.
inline treesvm::Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d, int n_labels) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> lab(0, n_labels - 1);
  std::vector<double> vals(n * d);
  for (auto& v : vals) v = u(rng);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i < std::size_t(n_labels) ? int(i) : lab(rng);
  std::vector<std::string> names;
  for (int c = 0; c < n_labels; ++c) names.push_back("c" + std::to_string(c));
  return treesvm::Dataset(d, std::move(vals), std::move(labels), std::move(names));
}

/// Random +1/-1 vector with both signs present.
inline std::vector<int> random_signs(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> y(n);
  for (auto& s : y) s = coin(rng) ? 1 : -1;
  y[0] = 1;
  y[1] = -1;
  return y;
}

inline std::vector<std::vector<double>> rows_of(const treesvm::Dataset& ds) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < ds.size(); ++i) out.emplace_back(ds.row(i).begin(), ds.row(i).end());
  return out;
}

inline treesvm::Dataset from_rows(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                                  int n_labels) {
  std::vector<double> vals;
  for (const auto& r : rows) vals.insert(vals.end(), r.begin(), r.end());
  std::vector<std::string> names;
  for (int c = 0; c < n_labels; ++c) names.push_back(std::to_string(c + 1));
  return treesvm::Dataset(rows.empty() ? 0 : rows[0].size(), std::move(vals), std::move(labels), std::move(names));
}

}  // namespace testing
