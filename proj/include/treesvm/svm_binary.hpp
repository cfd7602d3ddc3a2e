#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "treesvm/dataset.hpp"
#include "treesvm/kernel.hpp"

namespace treesvm {

struct SolverConfig {
  double C = 1.0;
  double kkt_tol = 1e-3;
  /// Halt after this many consecutive iterations without objective gain.
  /// 0 means 10 * n.
  std::size_t max_passes = 0;
  /// Hard iteration cap. 0 means max(10'000'000, 100 * n).
  std::size_t max_iter = 0;
  std::size_t cache_bytes = kDefaultCacheBytes;

  void validate() const;
};

/// Multipliers and bias of a solved soft-margin dual.
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double objective = 0.0;  ///< sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
  double final_gap = 0.0;  ///< max KKT violation of the last working pair
  std::size_t iterations = 0;
  bool converged = false;
};

/// Maximizes the C-SVC dual by SMO with maximal-violating-pair selection.
/// `y` holds +1/-1 per row of `x`; both signs must be present.
DualSolution solve_dual(const Dataset& x, std::span<const int> y, const KernelParams& k,
                        const SolverConfig& cfg);

/// A trained binary classifier: f(z) = sum_i coeff_i K(sv_i, z) + bias.
class BinarySvmModel {
 public:
  BinarySvmModel() = default;
  BinarySvmModel(KernelParams k, double C, std::size_t dim, std::vector<double> sv_values,
                 std::vector<double> coeffs, double bias, bool converged);

  double decision_value(std::span<const double> z) const;
  /// +1 when decision_value(z) >= 0.
  int predict_sign(std::span<const double> z) const {
    return decision_value(z) >= 0.0 ? 1 : -1;
  }

  std::size_t num_sv() const noexcept { return coeffs_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> support_vector(std::size_t i) const {
    return {sv_values_.data() + i * dim_, dim_};
  }
  /// alpha_i * y_i per support vector.
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double bias() const noexcept { return bias_; }
  double C() const noexcept { return C_; }
  const KernelParams& kernel() const noexcept { return kernel_; }
  bool converged() const noexcept { return converged_; }

 private:
  KernelParams kernel_;
  double C_ = 0.0;
  std::size_t dim_ = 0;
  std::vector<double> sv_values_;
  std::vector<double> sv_sq_norms_;
  std::vector<double> coeffs_;
  double bias_ = 0.0;
  bool converged_ = true;
};

/// Builds a model from a solved dual, keeping rows with alpha > 0.
BinarySvmModel make_model(const Dataset& x, std::span<const int> y, const KernelParams& k,
                          double C, const DualSolution& sol);

BinarySvmModel train_binary(const Dataset& x, std::span<const int> y, const KernelParams& k,
                            const SolverConfig& cfg);

/// Versioned text format: header lines then `coeff idx:val ...` per SV.
void write_model(std::ostream& out, const BinarySvmModel& m);
BinarySvmModel read_model(std::istream& in);

}  // namespace treesvm
