#include "treesvm/dataset.hpp"

#include "treesvm/numfmt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace treesvm {

Dataset::Dataset(std::size_t dim, std::vector<double> values, std::vector<int> labels,
                 std::vector<std::string> label_names)
    : dim_(dim),
      values_(std::move(values)),
      labels_(std::move(labels)),
      label_names_(std::move(label_names)) {
  if (values_.size() != dim_ * labels_.size())
    throw std::invalid_argument("Dataset: feature buffer does not match n * dim");
  for (int y : labels_)
    if (y < 0 || static_cast<std::size_t>(y) >= label_names_.size())
      throw std::invalid_argument("Dataset: label id outside the alphabet");
}

std::vector<int> Dataset::present_labels() const {
  std::vector<char> seen(label_names_.size(), 0);
  for (int y : labels_) seen[y] = 1;
  std::vector<int> out;
  for (std::size_t c = 0; c < seen.size(); ++c)
    if (seen[c]) out.push_back(static_cast<int>(c));
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> vals;
  vals.reserve(indices.size() * dim_);
  std::vector<int> labs;
  labs.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = row(i);
    vals.insert(vals.end(), r.begin(), r.end());
    labs.push_back(labels_[i]);
  }
  return Dataset(dim_, std::move(vals), std::move(labs), label_names_);
}

void Dataset::push_back(std::span<const double> x, int label) {
  if (labels_.empty() && values_.empty()) dim_ = x.size();
  if (x.size() != dim_) throw std::invalid_argument("Dataset::push_back: dimension mismatch");
  if (label < 0 || static_cast<std::size_t>(label) >= label_names_.size())
    throw std::invalid_argument("Dataset::push_back: label id outside the alphabet");
  values_.insert(values_.end(), x.begin(), x.end());
  labels_.push_back(label);
}

Dataset parse_libsvm(std::istream& in) {
  struct Entry {
    std::size_t index;
    double value;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<int> labels;
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  std::size_t dim = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;

    auto [it, inserted] = ids.try_emplace(tok, static_cast<int>(names.size()));
    if (inserted) names.push_back(tok);
    labels.push_back(it->second);

    std::vector<Entry> entries;
    std::size_t prev = 0;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError("expected idx:val, got '" + tok + "'", lineno);
      std::string_view idx_s(tok.data(), colon);
      std::string_view val_s(tok.data() + colon + 1, tok.size() - colon - 1);
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), idx);
      if (ec != std::errc() || p != idx_s.data() + idx_s.size() || idx == 0)
        throw ParseError("bad feature index '" + std::string(idx_s) + "'", lineno);
      if (idx <= prev) throw ParseError("feature indices must be strictly increasing", lineno);
      auto v = parse_double(val_s);
      if (!v || !std::isfinite(*v))
        throw ParseError("bad feature value '" + std::string(val_s) + "'", lineno);
      entries.push_back({idx, *v});
      prev = idx;
    }
    dim = std::max(dim, prev);
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw ParseError("empty input", 0);
  if (dim == 0) throw ParseError("no features in input", 0);

  std::vector<double> values(rows.size() * dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& e : rows[i]) values[i * dim + e.index - 1] = e.value;
  return Dataset(dim, std::move(values), std::move(labels), std::move(names));
}

Dataset parse_libsvm_string(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.label_names()[ds.label(i)];
    auto r = ds.row(i);
    for (std::size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) out << ' ' << j + 1 << ':' << format_double(r[j]);
    out << '\n';
  }
}

Scaler fit_scaler(const Dataset& train) {
  if (train.empty()) throw std::invalid_argument("fit_scaler: empty dataset");
  Scaler s;
  auto first = train.row(0);
  s.min.assign(first.begin(), first.end());
  s.max.assign(first.begin(), first.end());
  for (std::size_t i = 1; i < train.size(); ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      s.min[j] = std::min(s.min[j], r[j]);
      s.max[j] = std::max(s.max[j], r[j]);
    }
  }
  return s;
}

Dataset apply_scaler(const Scaler& s, const Dataset& ds) {
  if (ds.dim() != s.dim())
    throw std::invalid_argument("apply_scaler: dataset has dimension " + std::to_string(ds.dim()) +
                                ", scaler has " + std::to_string(s.dim()));
  Dataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      double range = s.max[j] - s.min[j];
      double v = range > 0.0 ? (r[j] - s.min[j]) / range : 0.0;
      r[j] = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

void write_scaler(std::ostream& out, const Scaler& s) {
  for (const auto* v : {&s.min, &s.max}) {
    for (std::size_t j = 0; j < v->size(); ++j) out << (j ? "," : "") << format_double((*v)[j]);
    out << '\n';
  }
}

Scaler read_scaler(std::istream& in) {
  auto read_row = [&](std::size_t lineno) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("scaler file truncated", lineno);
    std::vector<double> row;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      auto v = parse_double(tok);
      if (!v) throw ParseError("bad scaler value '" + tok + "'", lineno);
      row.push_back(*v);
    }
    return row;
  };
  Scaler s;
  s.min = read_row(1);
  s.max = read_row(2);
  if (s.min.size() != s.max.size()) throw ParseError("scaler rows differ in length", 2);
  for (std::size_t j = 0; j < s.min.size(); ++j)
    if (s.min[j] > s.max[j]) throw ParseError("scaler min exceeds max", 2);
  return s;
}

Split shuffle_split(const Dataset& ds, const SplitConfig& cfg) {
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw std::invalid_argument("shuffle_split: train_fraction must lie in (0,1)");
  const std::size_t n = ds.size();
  if (n < 2) throw std::invalid_argument("shuffle_split: need at least 2 instances");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  // Guard against 2/3 * 150 landing on 100.00000000000001.
  auto n_train = static_cast<std::size_t>(std::ceil(cfg.train_fraction * double(n) - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  Split out;
  out.train = ds.subset(std::span(perm).first(n_train));
  out.test = ds.subset(std::span(perm).subspan(n_train));
  if (out.train.present_labels().size() < 2)
    out.warnings.push_back("training partition has fewer than 2 distinct labels");
  if (out.test.present_labels().size() < 2)
    out.warnings.push_back("test partition has fewer than 2 distinct labels");
  return out;
}

Dataset synth_blobs(int n_classes, int per_class, int dim, double spread, std::uint64_t seed) {
  if (n_classes < 2 || per_class < 1 || dim < 1 || !(spread > 0.0))
    throw std::invalid_argument("synth_blobs: need n_classes >= 2, per_class >= 1, dim >= 1, spread > 0");

  // Smallest lattice side whose side^dim corners cover every class.
  int side = 2;
  while (std::pow(double(side), dim) < n_classes) ++side;

  std::vector<std::string> names;
  for (int c = 0; c < n_classes; ++c) names.push_back(std::to_string(c + 1));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spread);
  std::vector<double> values;
  values.reserve(std::size_t(n_classes) * per_class * dim);
  std::vector<int> labels;
  labels.reserve(std::size_t(n_classes) * per_class);
  std::vector<double> center(dim);
  for (int c = 0; c < n_classes; ++c) {
    int code = c;
    for (int j = 0; j < dim; ++j) {
      center[j] = code % side;
      code /= side;
    }
    for (int k = 0; k < per_class; ++k) {
      for (int j = 0; j < dim; ++j) values.push_back(center[j] + noise(rng));
      labels.push_back(c);
    }
  }
  return Dataset(dim, std::move(values), std::move(labels), std::move(names));
}

}  // namespace treesvm
