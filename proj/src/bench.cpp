#include "treesvm/bench.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "treesvm/numfmt.hpp"

namespace treesvm {

Dataset align_labels(const Dataset& ds, const std::vector<std::string>& alphabet) {
  std::vector<std::string> names = alphabet;
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < names.size(); ++i) ids.emplace(names[i], static_cast<int>(i));
  std::vector<int> remap(ds.num_classes());
  for (std::size_t c = 0; c < ds.num_classes(); ++c) {
    const auto& name = ds.label_names()[c];
    auto [it, inserted] = ids.try_emplace(name, static_cast<int>(names.size()));
    if (inserted) names.push_back(name);
    remap[c] = it->second;
  }
  std::vector<int> labels(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) labels[i] = remap[ds.label(i)];
  return Dataset(ds.dim(), ds.values(), std::move(labels), std::move(names));
}

PreparedData prepare_data(const Dataset& full, const std::optional<Dataset>& separate_test,
                          const SplitConfig& split) {
  PreparedData out;
  Dataset train, test;
  if (separate_test) {
    if (separate_test->dim() > full.dim())
      throw std::invalid_argument("test file has more features than the training file");
    train = full;
    // LIBSVM files may omit trailing zero features, so pad the test side.
    Dataset padded = *separate_test;
    if (padded.dim() < full.dim()) {
      std::vector<double> vals(padded.size() * full.dim(), 0.0);
      for (std::size_t i = 0; i < padded.size(); ++i)
        std::copy(padded.row(i).begin(), padded.row(i).end(), vals.begin() + i * full.dim());
      padded = Dataset(full.dim(), std::move(vals), padded.labels(), padded.label_names());
    }
    test = align_labels(padded, full.label_names());
  } else {
    auto s = shuffle_split(full, split);
    train = std::move(s.train);
    test = std::move(s.test);
    out.warnings = std::move(s.warnings);
  }
  out.scaler = fit_scaler(train);
  out.train = apply_scaler(out.scaler, train);
  out.test = apply_scaler(out.scaler, test);
  return out;
}

std::vector<BenchmarkRow> run_bench(const std::vector<BenchDataset>& inputs, const BenchConfig& cfg) {
  std::vector<BenchmarkRow> rows;
  for (const auto& in : inputs) {
    for (Strategy s : cfg.strategies) {
      BenchmarkRow row;
      row.dataset = in.name;
      row.strategy = s;
      GridConfig g = cfg.grid;
      g.strategy = s;
      try {
        auto report = grid_search(in.data.train, in.data.test, g, cfg.kernel, cfg.solver);
        if (report.best) {
          const auto& r = report.best_record();
          row.gamma_exp = r.gamma_exp;
          row.cost_exp = r.cost_exp;
          row.gamma = r.gamma;
          row.C = r.C;
          row.accuracy = r.accuracy;
          row.train_seconds = r.train_seconds;
          row.test_seconds = r.test_seconds;
          row.classifiers_trained = r.n_classifiers;
          row.worst_path_evals = r.worst_path_evals;
          if (!r.converged) row.status = "not-converged";
        } else {
          row.status = "error: " + (report.failed.empty() ? std::string("empty grid") : report.failed.front().error);
        }
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      std::replace(row.status.begin(), row.status.end(), ',', ';');
      std::replace(row.status.begin(), row.status.end(), '\n', ' ');
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

constexpr const char* kBenchHeader =
    "dataset,strategy,gamma_exp,cost_exp,gamma,C,accuracy,train_s,test_s,classifiers_trained,worst_path_evals,"
    "status";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ls(line);
  std::string tok;
  while (std::getline(ls, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_bench_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows,
                     const std::vector<BenchDataset>& inputs) {
  out << kBenchHeader << '\n';
  for (const auto& r : rows)
    out << r.dataset << ',' << to_string(r.strategy) << ',' << r.gamma_exp << ',' << r.cost_exp << ','
        << format_double(r.gamma) << ',' << format_double(r.C) << ',' << format_double(r.accuracy) << ','
        << format_double(r.train_seconds) << ',' << format_double(r.test_seconds) << ',' << r.classifiers_trained
        << ',' << r.worst_path_evals << ',' << r.status << '\n';

  out << "\n# binary classifiers trained per strategy: OVO N(N-1)/2, OVA N, CBTS N-1\n"
      << "dataset,n_classes,ovo,ova,cbts\n";
  for (const auto& in : inputs) {
    const std::size_t n = in.data.train.present_labels().size();
    if (n < 2) continue;
    out << in.name << ',' << n << ',' << classifier_count(Strategy::ovo, n).train_count << ','
        << classifier_count(Strategy::ova, n).train_count << ',' << classifier_count(Strategy::cbts, n).train_count
        << '\n';
  }
}

std::vector<BenchmarkRow> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBenchHeader) throw ParseError("missing benchmark CSV header", 1);
  std::vector<BenchmarkRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) break;
    auto f = split_csv(line);
    if (f.size() != 12) throw ParseError("expected 12 fields", lineno);
    auto num = [&](const std::string& s) {
      auto v = parse_double(s);
      if (!v) throw ParseError("bad number '" + s + "'", lineno);
      return *v;
    };
    auto integer = [&](const std::string& s) {
      auto v = parse_int(s);
      if (!v) throw ParseError("bad integer '" + s + "'", lineno);
      return *v;
    };
    BenchmarkRow r;
    r.dataset = f[0];
    r.strategy = strategy_from_string(f[1]);
    r.gamma_exp = static_cast<int>(integer(f[2]));
    r.cost_exp = static_cast<int>(integer(f[3]));
    r.gamma = num(f[4]);
    r.C = num(f[5]);
    r.accuracy = num(f[6]);
    r.train_seconds = num(f[7]);
    r.test_seconds = num(f[8]);
    r.classifiers_trained = static_cast<std::size_t>(integer(f[9]));
    r.worst_path_evals = static_cast<std::size_t>(integer(f[10]));
    r.status = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace treesvm
