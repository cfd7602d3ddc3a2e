#include "treesvm/svm_binary.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "treesvm/numfmt.hpp"

namespace treesvm {

namespace {

// Curvature floor for pairs with K_ii + K_jj - 2 K_ij <= 0 (duplicate points
// with opposite labels). The step then runs to the box bound.
constexpr double kTau = 1e-12;

bool in_up(int y, double a, double C) { return y > 0 ? a < C : a > 0.0; }
bool in_low(int y, double a, double C) { return y > 0 ? a > 0.0 : a < C; }

}  // namespace

void SolverConfig::validate() const {
  if (!(C > 0.0)) throw std::invalid_argument("solver: C must be positive");
  if (!(kkt_tol > 0.0)) throw std::invalid_argument("solver: kkt_tol must be positive");
}

DualSolution solve_dual(const Dataset& x, std::span<const int> y, const KernelParams& k,
                        const SolverConfig& cfg) {
  cfg.validate();
  k.validate();
  const std::size_t n = x.size();
  if (y.size() != n) throw std::invalid_argument("solve_dual: label count does not match rows");
  bool has_pos = false, has_neg = false;
  for (int s : y) {
    if (s == 1)
      has_pos = true;
    else if (s == -1)
      has_neg = true;
    else
      throw std::invalid_argument("solve_dual: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("solve_dual: both classes must be present");

  const double C = cfg.C;
  const std::size_t max_stall = cfg.max_passes ? cfg.max_passes : 10 * n;
  const std::size_t max_iter = cfg.max_iter ? cfg.max_iter : std::max<std::size_t>(10'000'000, 100 * n);

  KernelCache cache(k, x, cfg.cache_bytes);
  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  auto& alpha = sol.alpha;
  // v_k = y_k - sum_l alpha_l y_l K_kl; the gradient of the dual is y_k v_k.
  std::vector<double> v(y.begin(), y.end());

  std::size_t stall = 0;
  while (true) {
    std::size_t i = n, j = n;
    double v_up = -std::numeric_limits<double>::infinity();
    double v_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(y[t], alpha[t], C) && v[t] > v_up) {
        v_up = v[t];
        i = t;
      }
      if (in_low(y[t], alpha[t], C) && v[t] < v_low) {
        v_low = v[t];
        j = t;
      }
    }
    sol.final_gap = (i < n && j < n) ? v_up - v_low : 0.0;
    if (sol.final_gap <= cfg.kkt_tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iter || stall >= max_stall) break;
    ++sol.iterations;

    auto Ki = cache.row(i);
    auto Kj = cache.row(j);
    const double gap = sol.final_gap;
    const double eta = Ki[i] + Kj[j] - 2.0 * Ki[j];

    // Move alpha_i by +y_i t and alpha_j by -y_j t, t >= 0.
    const double room_i = y[i] > 0 ? C - alpha[i] : alpha[i];
    const double room_j = y[j] > 0 ? alpha[j] : C - alpha[j];
    double t = gap / std::max(eta, kTau);
    bool clip_i = false, clip_j = false;
    if (t >= room_i) {
      t = room_i;
      clip_i = true;
    }
    if (t >= room_j) {
      t = room_j;
      clip_j = true;
      clip_i = room_i == room_j;
    }

    const double gain = t * gap - 0.5 * t * t * eta;
    stall = gain > 0.0 ? 0 : stall + 1;

    if (clip_i)
      alpha[i] = y[i] > 0 ? C : 0.0;
    else
      alpha[i] += y[i] * t;
    if (clip_j)
      alpha[j] = y[j] > 0 ? 0.0 : C;
    else
      alpha[j] -= y[j] * t;

    for (std::size_t r = 0; r < n; ++r) v[r] -= t * (Ki[r] - Kj[r]);
  }

  double free_sum = 0.0;
  std::size_t n_free = 0;
  double up_max = -std::numeric_limits<double>::infinity();
  double low_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += v[t];
      ++n_free;
    }
    if (in_up(y[t], alpha[t], C)) up_max = std::max(up_max, v[t]);
    if (in_low(y[t], alpha[t], C)) low_min = std::min(low_min, v[t]);
  }
  if (n_free > 0)
    sol.bias = free_sum / double(n_free);
  else if (std::isfinite(up_max) && std::isfinite(low_min))
    sol.bias = 0.5 * (up_max + low_min);
  else
    sol.bias = std::isfinite(up_max) ? up_max : low_min;

  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (1.0 + y[t] * v[t]);
  sol.objective = 0.5 * obj;
  return sol;
}

BinarySvmModel::BinarySvmModel(KernelParams k, double C, std::size_t dim, std::vector<double> sv_values,
                               std::vector<double> coeffs, double bias, bool converged)
    : kernel_(k),
      C_(C),
      dim_(dim),
      sv_values_(std::move(sv_values)),
      coeffs_(std::move(coeffs)),
      bias_(bias),
      converged_(converged) {
  if (sv_values_.size() != dim_ * coeffs_.size())
    throw std::invalid_argument("BinarySvmModel: support vector buffer does not match count * dim");
  sv_sq_norms_.resize(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    auto s = support_vector(i);
    sv_sq_norms_[i] = dot(s, s);
  }
}

double BinarySvmModel::decision_value(std::span<const double> z) const {
  if (z.size() != dim_)
    throw std::invalid_argument("decision_value: input has dimension " + std::to_string(z.size()) +
                                ", model expects " + std::to_string(dim_));
  const double z_sq = dot(z, z);
  double f = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    f += coeffs_[i] * kernel_eval(kernel_, support_vector(i), sv_sq_norms_[i], z, z_sq);
  return f + bias_;
}

BinarySvmModel make_model(const Dataset& x, std::span<const int> y, const KernelParams& k, double C,
                          const DualSolution& sol) {
  std::vector<double> sv;
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sol.alpha[i] <= 0.0) continue;
    auto r = x.row(i);
    sv.insert(sv.end(), r.begin(), r.end());
    coeffs.push_back(sol.alpha[i] * y[i]);
  }
  return BinarySvmModel(k, C, x.dim(), std::move(sv), std::move(coeffs), sol.bias, sol.converged);
}

BinarySvmModel train_binary(const Dataset& x, std::span<const int> y, const KernelParams& k,
                            const SolverConfig& cfg) {
  return make_model(x, y, k, cfg.C, solve_dual(x, y, k, cfg));
}

namespace {

constexpr const char* kModelMagic = "treesvm-binary-model";
constexpr int kModelVersion = 1;

std::string expect_field(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("model truncated before '" + key + "'", 0);
  std::istringstream ls(line);
  std::string k, v;
  ls >> k >> v;
  if (k != key) throw ParseError("expected '" + key + "', got '" + k + "'", 0);
  return v;
}

double expect_double(std::istream& in, const std::string& key) {
  auto v = parse_double(expect_field(in, key));
  if (!v) throw ParseError("bad value for '" + key + "'", 0);
  return *v;
}

long long expect_int(std::istream& in, const std::string& key) {
  auto v = parse_int(expect_field(in, key));
  if (!v || *v < 0) throw ParseError("bad value for '" + key + "'", 0);
  return *v;
}

}  // namespace

void write_model(std::ostream& out, const BinarySvmModel& m) {
  out << kModelMagic << ' ' << kModelVersion << '\n'
      << "kernel " << to_string(m.kernel().kind) << '\n'
      << "gamma " << format_double(m.kernel().gamma) << '\n'
      << "C " << format_double(m.C()) << '\n'
      << "bias " << format_double(m.bias()) << '\n'
      << "dim " << m.dim() << '\n'
      << "converged " << (m.converged() ? 1 : 0) << '\n'
      << "n_sv " << m.num_sv() << '\n';
  for (std::size_t i = 0; i < m.num_sv(); ++i) {
    out << format_double(m.coeffs()[i]);
    auto s = m.support_vector(i);
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j] != 0.0) out << ' ' << j + 1 << ':' << format_double(s[j]);
    out << '\n';
  }
}

BinarySvmModel read_model(std::istream& in) {
  std::string magic;
  int version = 0;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty model", 0);
  std::istringstream(line) >> magic >> version;
  if (magic != kModelMagic) throw ParseError("not a treesvm binary model", 1);
  if (version != kModelVersion) throw ParseError("unsupported model version " + std::to_string(version), 1);

  KernelParams k;
  k.kind = kernel_kind_from_string(expect_field(in, "kernel"));
  k.gamma = expect_double(in, "gamma");
  const double C = expect_double(in, "C");
  const double bias = expect_double(in, "bias");
  const auto dim = static_cast<std::size_t>(expect_int(in, "dim"));
  const bool converged = expect_int(in, "converged") != 0;
  const auto n_sv = static_cast<std::size_t>(expect_int(in, "n_sv"));

  std::vector<double> sv(n_sv * dim, 0.0);
  std::vector<double> coeffs(n_sv);
  for (std::size_t i = 0; i < n_sv; ++i) {
    if (!std::getline(in, line)) throw ParseError("model truncated in support vectors", 0);
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    auto c = parse_double(tok);
    if (!c) throw ParseError("bad coefficient '" + tok + "'", 0);
    coeffs[i] = *c;
    while (ls >> tok) {
      auto colon = tok.find(':');
      auto idx = colon == std::string::npos ? std::nullopt : parse_int(std::string_view(tok).substr(0, colon));
      auto val = colon == std::string::npos ? std::nullopt : parse_double(std::string_view(tok).substr(colon + 1));
      if (!idx || !val || *idx < 1 || static_cast<std::size_t>(*idx) > dim)
        throw ParseError("bad support vector entry '" + tok + "'", 0);
      sv[i * dim + static_cast<std::size_t>(*idx) - 1] = *val;
    }
  }
  return BinarySvmModel(k, C, dim, std::move(sv), std::move(coeffs), bias, converged);
}

}  // namespace treesvm
