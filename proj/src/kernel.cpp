#include "treesvm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace treesvm {

std::string to_string(KernelKind k) { return k == KernelKind::rbf ? "rbf" : "linear"; }

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "rbf") return KernelKind::rbf;
  if (s == "linear") return KernelKind::linear;
  throw std::invalid_argument("unknown kernel '" + s + "'");
}

void KernelParams::validate() const {
  if (kind == KernelKind::rbf && !(gamma > 0.0))
    throw std::invalid_argument("RBF kernel needs gamma > 0");
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * y[j];
  return s;
}

double kernel_eval(const KernelParams& p, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  return kernel_eval(p, x, dot(x, x), y, dot(y, y));
}

KernelCache::KernelCache(const KernelParams& p, const Dataset& ds, std::size_t budget_bytes)
    : params_(p), ds_(&ds), n_(ds.size()) {
  p.validate();
  std::size_t row_bytes = std::max<std::size_t>(1, n_) * sizeof(double);
  capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  sq_norms_.resize(n_);
  diag_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto x = ds.row(i);
    sq_norms_[i] = dot(x, x);
    diag_[i] = kernel_eval(params_, x, sq_norms_[i], x, sq_norms_[i]);
  }
}

void KernelCache::compute(std::size_t i, std::vector<double>& out) const {
  out.resize(n_);
  auto xi = ds_->row(i);
  for (std::size_t j = 0; j < n_; ++j)
    out[j] = kernel_eval(params_, xi, sq_norms_[i], ds_->row(j), sq_norms_[j]);
}

std::span<const double> KernelCache::row(std::size_t i) {
  if (auto it = index_.find(i); it != index_.end()) {
    ++hits_;
    lru_.splice(lru_.begin(), lru_, it->second);
    return lru_.front().values;
  }
  ++misses_;
  if (index_.size() >= capacity_) {
    // Reuse the evicted row's storage.
    lru_.splice(lru_.begin(), lru_, std::prev(lru_.end()));
    index_.erase(lru_.front().key);
    lru_.front().key = i;
  } else {
    lru_.push_front(Slot{i, {}});
  }
  compute(i, lru_.front().values);
  index_[i] = lru_.begin();
  return lru_.front().values;
}

std::vector<double> kernel_row(const KernelParams& p, const Dataset& ds, std::size_t i) {
  if (i >= ds.size()) throw std::out_of_range("kernel_row: index out of range");
  std::vector<double> out(ds.size());
  for (std::size_t j = 0; j < ds.size(); ++j) out[j] = kernel_eval(p, ds.row(i), ds.row(j));
  return out;
}

std::size_t cache_budget_from_env() {
  if (const char* v = std::getenv("TREESVM_CACHE_MB")) {
    char* end = nullptr;
    long mb = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && mb > 0) return static_cast<std::size_t>(mb) << 20;
  }
  return kDefaultCacheBytes;
}

}  // namespace treesvm
