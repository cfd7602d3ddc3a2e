#include "treesvm/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "treesvm/clustering.hpp"
#include "treesvm/numfmt.hpp"

namespace treesvm {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::cbts: return "cbts";
    case Strategy::ovo: return "ovo";
    case Strategy::ova: return "ova";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "cbts") return Strategy::cbts;
  if (s == "ovo") return Strategy::ovo;
  if (s == "ova") return Strategy::ova;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

// --- tree helpers ---

std::size_t CbtsTree::num_internal() const {
  return std::count_if(nodes.begin(), nodes.end(), [](const CbtsNode& n) { return !n.is_leaf(); });
}

std::vector<int> CbtsTree::leaf_labels() const {
  std::vector<int> out;
  if (nodes.empty()) return out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const auto& n = nodes[stack.back()];
    stack.pop_back();
    if (n.is_leaf()) {
      out.push_back(n.label);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

std::size_t CbtsTree::height() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> depth(nodes.size(), 0);
  std::size_t best = 0;
  // Children always follow their parent in storage.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) {
      best = std::max(best, depth[i]);
    } else {
      depth[n.left] = depth[i] + 1;
      depth[n.right] = depth[i] + 1;
    }
  }
  return best;
}

namespace {

struct BinaryTask {
  Dataset x;
  std::vector<int> y;
};

/// Rows whose label is in `pos` (+1) or `neg` (-1); other rows dropped.
BinaryTask make_task(const Dataset& train, const std::vector<int>& pos, const std::vector<int>& neg) {
  std::vector<int> sign(train.num_classes(), 0);
  for (int l : pos) sign[l] = 1;
  for (int l : neg) sign[l] = -1;
  std::vector<std::size_t> idx;
  BinaryTask t;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (int s = sign[train.label(i)]; s != 0) {
      idx.push_back(i);
      t.y.push_back(s);
    }
  }
  t.x = train.subset(idx);
  return t;
}

BinarySvmModel train_split(const Dataset& train, const std::vector<int>& pos, const std::vector<int>& neg,
                           const KernelParams& k, const SolverConfig& cfg) {
  auto task = make_task(train, pos, neg);
  return train_binary(task.x, task.y, k, cfg);
}

int add_subtree(CbtsTree& tree, const Dataset& train, const std::vector<int>& labels, const KernelParams& k,
                const SolverConfig& cfg) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (labels.size() == 1) {
    tree.nodes[id].label = labels.front();
    return id;
  }
  const std::size_t mid = (labels.size() + 1) / 2;
  std::vector<int> left(labels.begin(), labels.begin() + mid);
  std::vector<int> right(labels.begin() + mid, labels.end());
  auto model = train_split(train, left, right, k, cfg);
  const int l = add_subtree(tree, train, left, k, cfg);
  const int r = add_subtree(tree, train, right, k, cfg);
  auto& node = tree.nodes[id];
  node.left = l;
  node.right = r;
  node.left_labels = std::move(left);
  node.right_labels = std::move(right);
  node.model = std::move(model);
  return id;
}

MulticlassModel make_shell(const Dataset& train, const KernelParams& k, const SolverConfig& cfg) {
  k.validate();
  cfg.validate();
  if (train.present_labels().size() < 2)
    throw std::invalid_argument("multiclass training needs at least 2 distinct labels");
  MulticlassModel m;
  m.kernel = k;
  m.C = cfg.C;
  m.dim = train.dim();
  m.label_names = train.label_names();
  return m;
}

void check_dim(std::size_t got, std::size_t want) {
  if (got != want)
    throw std::invalid_argument("input has dimension " + std::to_string(got) + ", model expects " +
                                std::to_string(want));
}

}  // namespace

CbtsTree build_cbts_tree(const Dataset& train, const std::vector<int>& left_labels,
                         const std::vector<int>& right_labels, const KernelParams& k,
                         const SolverConfig& cfg) {
  if (left_labels.empty() || right_labels.empty())
    throw std::invalid_argument("build_cbts_tree: both root sides need labels");
  CbtsTree tree;
  tree.nodes.emplace_back();
  auto model = train_split(train, left_labels, right_labels, k, cfg);
  const int l = add_subtree(tree, train, left_labels, k, cfg);
  const int r = add_subtree(tree, train, right_labels, k, cfg);
  auto& root = tree.nodes[0];
  root.left = l;
  root.right = r;
  root.left_labels = left_labels;
  root.right_labels = right_labels;
  root.model = std::move(model);
  return tree;
}

MulticlassModel build_cbts(const Dataset& train, const KernelParams& k, const SolverConfig& cfg,
                           std::uint64_t seed) {
  auto m = make_shell(train, k, cfg);
  const auto clusters = kmeans2(train, KMeansConfig{.seed = seed});
  const auto part = majority_partition(train, clusters);
  m.body = build_cbts_tree(train, part.left_labels, part.right_labels, k, cfg);
  return m;
}

MulticlassModel train_ovo(const Dataset& train, const KernelParams& k, const SolverConfig& cfg) {
  auto m = make_shell(train, k, cfg);
  const auto labels = train.present_labels();
  OvoEnsemble ovo;
  for (std::size_t a = 0; a < labels.size(); ++a)
    for (std::size_t b = a + 1; b < labels.size(); ++b)
      ovo.models.emplace(std::pair{labels[a], labels[b]}, train_split(train, {labels[a]}, {labels[b]}, k, cfg));
  m.body = std::move(ovo);
  return m;
}

MulticlassModel train_ova(const Dataset& train, const KernelParams& k, const SolverConfig& cfg) {
  auto m = make_shell(train, k, cfg);
  const auto labels = train.present_labels();
  OvaEnsemble ova;
  for (int l : labels) {
    std::vector<int> rest;
    std::copy_if(labels.begin(), labels.end(), std::back_inserter(rest), [&](int o) { return o != l; });
    ova.models.emplace(l, train_split(train, {l}, rest, k, cfg));
  }
  m.body = std::move(ova);
  return m;
}

MulticlassModel train_multiclass(Strategy s, const Dataset& train, const KernelParams& k,
                                 const SolverConfig& cfg, std::uint64_t seed) {
  switch (s) {
    case Strategy::cbts: return build_cbts(train, k, cfg, seed);
    case Strategy::ovo: return train_ovo(train, k, cfg);
    case Strategy::ova: return train_ova(train, k, cfg);
  }
  throw std::invalid_argument("unknown strategy");
}

CbtsPrediction predict_cbts(const CbtsTree& tree, std::span<const double> z) {
  if (tree.nodes.empty()) throw std::invalid_argument("predict_cbts: empty tree");
  std::size_t evals = 0;
  const CbtsNode* n = &tree.nodes[0];
  while (!n->is_leaf()) {
    ++evals;
    n = &tree.nodes[n->model.decision_value(z) >= 0.0 ? n->left : n->right];
  }
  return {n->label, evals};
}

int predict_ovo(const OvoEnsemble& ovo, std::span<const double> z) {
  std::map<int, std::size_t> votes;
  std::map<int, double> margin;
  for (const auto& [pair, model] : ovo.models) {
    votes.try_emplace(pair.first, 0);
    votes.try_emplace(pair.second, 0);
    const double dv = model.decision_value(z);
    const int winner = dv >= 0.0 ? pair.first : pair.second;
    ++votes[winner];
    margin[winner] += std::abs(dv);
  }
  int best = -1;
  for (const auto& [label, v] : votes) {
    if (best < 0 || v > votes[best] || (v == votes[best] && margin[label] > margin[best])) best = label;
  }
  return best;
}

int predict_ova(const OvaEnsemble& ova, std::span<const double> z) {
  int best = -1;
  double best_v = 0.0;
  for (const auto& [label, model] : ova.models) {
    const double dv = model.decision_value(z);
    if (best < 0 || dv > best_v) {
      best = label;
      best_v = dv;
    }
  }
  return best;
}

Strategy MulticlassModel::strategy() const {
  return std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CbtsTree>) return Strategy::cbts;
        else if constexpr (std::is_same_v<T, OvoEnsemble>) return Strategy::ovo;
        else return Strategy::ova;
      },
      body);
}

int MulticlassModel::predict(std::span<const double> z) const {
  check_dim(z.size(), dim);
  return std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CbtsTree>) return predict_cbts(b, z).label;
        else if constexpr (std::is_same_v<T, OvoEnsemble>) return predict_ovo(b, z);
        else return predict_ova(b, z);
      },
      body);
}

std::size_t MulticlassModel::num_classifiers() const {
  return std::visit(
      [](const auto& b) -> std::size_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CbtsTree>) return b.num_internal();
        else return b.models.size();
      },
      body);
}

std::size_t MulticlassModel::worst_path_evals() const {
  if (const auto* t = std::get_if<CbtsTree>(&body)) return t->height();
  return num_classifiers();
}

bool MulticlassModel::converged() const {
  return std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CbtsTree>) {
          return std::all_of(b.nodes.begin(), b.nodes.end(),
                             [](const CbtsNode& n) { return n.is_leaf() || n.model.converged(); });
        } else {
          return std::all_of(b.models.begin(), b.models.end(),
                             [](const auto& kv) { return kv.second.converged(); });
        }
      },
      body);
}

ClassifierCount classifier_count(Strategy s, std::size_t n) {
  if (n < 2) throw std::invalid_argument("classifier_count: need at least 2 classes");
  switch (s) {
    case Strategy::cbts: {
      // Root evaluation, then a midpoint-split subtree over ceil(n/2) labels.
      std::size_t side = (n + 1) / 2, depth = 0;
      while ((std::size_t{1} << depth) < side) ++depth;
      return {n - 1, 1 + depth};
    }
    case Strategy::ovo: return {n * (n - 1) / 2, n * (n - 1) / 2};
    case Strategy::ova: return {n, n};
  }
  throw std::invalid_argument("unknown strategy");
}

double accuracy(const MulticlassModel& m, const Dataset& ds) {
  if (ds.empty()) throw std::invalid_argument("accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) correct += m.predict(ds.row(i)) == ds.label(i);
  return double(correct) / double(ds.size());
}

// --- persistence ---

namespace {

constexpr const char* kManifestMagic = "treesvm-multiclass-model";
constexpr int kManifestVersion = 1;

void topology_rec(const CbtsTree& t, int id, std::ostream& out) {
  const auto& n = t.nodes[id];
  if (n.is_leaf()) {
    out << n.label;
    return;
  }
  out << '(';
  topology_rec(t, n.left, out);
  out << ' ';
  topology_rec(t, n.right, out);
  out << ')';
}

/// Recursive-descent parser for the topology string; internal nodes take
/// models from `models` in pre-order.
class TopologyParser {
 public:
  TopologyParser(std::string_view text, std::vector<BinarySvmModel>& models) : s_(text), models_(models) {}

  CbtsTree parse() {
    CbtsTree t;
    parse_node(t);
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    if (next_model_ != models_.size()) fail("model count does not match internal nodes");
    return t;
  }

 private:
  int parse_node(CbtsTree& t) {
    skip_ws();
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      if (next_model_ >= models_.size()) fail("more internal nodes than models");
      t.nodes[id].model = std::move(models_[next_model_++]);
      const int l = parse_node(t);
      const int r = parse_node(t);
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      t.nodes[id].left = l;
      t.nodes[id].right = r;
      t.nodes[id].left_labels = collect(t, l);
      t.nodes[id].right_labels = collect(t, r);
    } else {
      std::size_t end = pos_;
      while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
      auto v = parse_int(s_.substr(pos_, end - pos_));
      if (!v) fail("expected label id");
      t.nodes[id].label = static_cast<int>(*v);
      pos_ = end;
    }
    return id;
  }

  static std::vector<int> collect(const CbtsTree& t, int id) {
    const auto& n = t.nodes[id];
    if (n.is_leaf()) return {n.label};
    auto out = n.left_labels;
    out.insert(out.end(), n.right_labels.begin(), n.right_labels.end());
    return out;
  }

  void skip_ws() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("topology: " + msg + " at offset " + std::to_string(pos_), 0);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<BinarySvmModel>& models_;
  std::size_t next_model_ = 0;
};

void write_model_file(const std::filesystem::path& p, const BinarySvmModel& m) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  write_model(out, m);
}

BinarySvmModel read_model_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
  return read_model(in);
}

}  // namespace

std::string cbts_topology(const CbtsTree& tree) {
  std::ostringstream out;
  if (!tree.nodes.empty()) topology_rec(tree, 0, out);
  return out.str();
}

void save_multiclass(const std::filesystem::path& dir, const MulticlassModel& m) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt");
  if (!out) throw std::runtime_error("cannot write '" + (dir / "manifest.txt").string() + "'");
  out << kManifestMagic << ' ' << kManifestVersion << '\n'
      << "strategy " << to_string(m.strategy()) << '\n'
      << "kernel " << to_string(m.kernel.kind) << '\n'
      << "gamma " << format_double(m.kernel.gamma) << '\n'
      << "C " << format_double(m.C) << '\n'
      << "dim " << m.dim << '\n'
      << "labels " << m.label_names.size() << '\n';
  for (std::size_t i = 0; i < m.label_names.size(); ++i) out << "label " << i << ' ' << m.label_names[i] << '\n';

  std::size_t k = 0;
  auto file_for = [&] { return "model_" + std::to_string(k++) + ".svm"; };
  if (const auto* t = std::get_if<CbtsTree>(&m.body)) {
    out << "topology " << cbts_topology(*t) << '\n' << "models " << t->num_internal() << '\n';
    for (const auto& n : t->nodes) {
      if (n.is_leaf()) continue;
      auto f = file_for();
      write_model_file(dir / f, n.model);
      out << "model " << f << '\n';
    }
  } else if (const auto* o = std::get_if<OvoEnsemble>(&m.body)) {
    out << "models " << o->models.size() << '\n';
    for (const auto& [pair, model] : o->models) {
      auto f = file_for();
      write_model_file(dir / f, model);
      out << "model " << f << ' ' << pair.first << ' ' << pair.second << '\n';
    }
  } else {
    const auto& a = std::get<OvaEnsemble>(m.body);
    out << "models " << a.models.size() << '\n';
    for (const auto& [label, model] : a.models) {
      auto f = file_for();
      write_model_file(dir / f, model);
      out << "model " << f << ' ' << label << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing manifest");
}

MulticlassModel load_multiclass(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw std::runtime_error("cannot open '" + (dir / "manifest.txt").string() + "'");

  std::size_t lineno = 0;
  std::string line;
  auto next = [&](const std::string& key) {
    if (!std::getline(in, line)) throw ParseError("manifest truncated before '" + key + "'", lineno);
    ++lineno;
    if (line.rfind(key + ' ', 0) != 0) throw ParseError("expected '" + key + "'", lineno);
    return line.substr(key.size() + 1);
  };
  auto next_int = [&](const std::string& key) {
    auto v = parse_int(next(key));
    if (!v || *v < 0) throw ParseError("bad value for '" + key + "'", lineno);
    return static_cast<std::size_t>(*v);
  };
  auto next_double = [&](const std::string& key) {
    auto v = parse_double(next(key));
    if (!v) throw ParseError("bad value for '" + key + "'", lineno);
    return *v;
  };

  if (!std::getline(in, line)) throw ParseError("empty manifest", 0);
  ++lineno;
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kManifestMagic || version != kManifestVersion)
      throw ParseError("not a treesvm multiclass manifest (version " + std::to_string(kManifestVersion) + ")", 1);
  }

  MulticlassModel m;
  const Strategy strategy = strategy_from_string(next("strategy"));
  m.kernel.kind = kernel_kind_from_string(next("kernel"));
  m.kernel.gamma = next_double("gamma");
  m.C = next_double("C");
  m.dim = next_int("dim");
  const std::size_t n_labels = next_int("labels");
  for (std::size_t i = 0; i < n_labels; ++i) {
    std::istringstream ls(next("label"));
    std::size_t id = 0;
    std::string name;
    if (!(ls >> id >> name) || id != i) throw ParseError("bad label line", lineno);
    m.label_names.push_back(name);
  }

  auto check_label = [&](long long l) {
    if (l < 0 || static_cast<std::size_t>(l) >= n_labels) throw ParseError("label id out of range", lineno);
    return static_cast<int>(l);
  };

  if (strategy == Strategy::cbts) {
    const std::string topo = next("topology");
    const std::size_t n_models = next_int("models");
    std::vector<BinarySvmModel> models;
    for (std::size_t i = 0; i < n_models; ++i) models.push_back(read_model_file(dir / next("model")));
    auto tree = TopologyParser(topo, models).parse();
    for (const auto& n : tree.nodes)
      if (n.is_leaf()) check_label(n.label);
    m.body = std::move(tree);
  } else {
    const std::size_t n_models = next_int("models");
    OvoEnsemble ovo;
    OvaEnsemble ova;
    for (std::size_t i = 0; i < n_models; ++i) {
      std::istringstream ls(next("model"));
      std::string file;
      long long a = -1, b = -1;
      ls >> file >> a;
      if (strategy == Strategy::ovo) {
        ls >> b;
        ovo.models.emplace(std::pair{check_label(a), check_label(b)}, read_model_file(dir / file));
      } else {
        ova.models.emplace(check_label(a), read_model_file(dir / file));
      }
    }
    if (strategy == Strategy::ovo)
      m.body = std::move(ovo);
    else
      m.body = std::move(ova);
  }
  return m;
}

}  // namespace treesvm
