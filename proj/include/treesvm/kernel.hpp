#pragma once

#include <cmath>
#include <cstddef>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "treesvm/dataset.hpp"

namespace treesvm {

enum class KernelKind { rbf, linear };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

struct KernelParams {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;

  /// Throws std::invalid_argument when gamma <= 0 for an RBF kernel.
  void validate() const;
};

double dot(std::span<const double> x, std::span<const double> y);

/// rbf: exp(-gamma * |x-y|^2), with |x-y|^2 = |x|^2 + |y|^2 - 2 x.y clamped at 0.
/// linear: x.y
double kernel_eval(const KernelParams& p, std::span<const double> x, std::span<const double> y);

/// Same value as kernel_eval, given precomputed squared norms.
inline double kernel_eval(const KernelParams& p, std::span<const double> x, double x_sq,
                          std::span<const double> y, double y_sq);

constexpr std::size_t kDefaultCacheBytes = std::size_t{100} << 20;

/// LRU cache of kernel matrix rows for one dataset.
///
/// Not thread-safe: give each solver its own cache. Evicted rows are
/// recomputed, so a hit and a miss return identical values.
class KernelCache {
 public:
  KernelCache(const KernelParams& p, const Dataset& ds, std::size_t budget_bytes = kDefaultCacheBytes);

  /// Row i of the Gram matrix. The two most recently returned rows stay valid.
  std::span<const double> row(std::size_t i);

  double diag(std::size_t i) const { return diag_[i]; }
  std::size_t size() const noexcept { return n_; }
  std::size_t capacity_rows() const noexcept { return capacity_; }
  std::size_t cached_rows() const noexcept { return index_.size(); }
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  struct Slot {
    std::size_t key;
    std::vector<double> values;
  };

  void compute(std::size_t i, std::vector<double>& out) const;

  KernelParams params_;
  const Dataset* ds_;
  std::size_t n_;
  std::size_t capacity_;
  std::vector<double> sq_norms_;
  std::vector<double> diag_;
  std::list<Slot> lru_;  // front = most recent
  std::unordered_map<std::size_t, std::list<Slot>::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// One Gram-matrix row without a cache.
std::vector<double> kernel_row(const KernelParams& p, const Dataset& ds, std::size_t i);

/// Budget from TREESVM_CACHE_MB when set and valid, else the 100 MB default.
std::size_t cache_budget_from_env();

// --- inline ---

inline double kernel_eval(const KernelParams& p, std::span<const double> x, double x_sq,
                          std::span<const double> y, double y_sq) {
  double xy = dot(x, y);
  if (p.kind == KernelKind::linear) return xy;
  double d2 = x_sq + y_sq - 2.0 * xy;
  if (d2 < 0.0) d2 = 0.0;
  return std::exp(-p.gamma * d2);
}

}  // namespace treesvm
