#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "treesvm/bench.hpp"
#include "treesvm/cli.hpp"
#include "treesvm/clustering.hpp"
#include "treesvm/dataset.hpp"
#include "treesvm/multiclass.hpp"
#include "treesvm/svm_binary.hpp"
#include "treesvm/tuning.hpp"

namespace py = pybind11;
using namespace treesvm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset from_arrays(const Array& x, const std::vector<std::string>& y) {
  if (x.ndim() != 2) throw std::invalid_argument("X must be 2-dimensional");
  const auto n = static_cast<std::size_t>(x.shape(0)), d = static_cast<std::size_t>(x.shape(1));
  if (y.size() != n) throw std::invalid_argument("X and y lengths differ");
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  std::vector<int> labels;
  for (const auto& s : y) {
    auto [it, inserted] = ids.try_emplace(s, static_cast<int>(names.size()));
    if (inserted) names.push_back(s);
    labels.push_back(it->second);
  }
  std::vector<double> vals(x.data(), x.data() + n * d);
  return Dataset(d, std::move(vals), std::move(labels), std::move(names));
}

py::array_t<double> values_of(const Dataset& ds) {
  py::array_t<double> out({ds.size(), ds.dim()});
  std::copy(ds.values().begin(), ds.values().end(), out.mutable_data());
  return out;
}

std::vector<double> as_vector(const Array& z) {
  if (z.ndim() != 1) throw std::invalid_argument("expected a 1-dimensional vector");
  return {z.data(), z.data() + z.size()};
}

KernelParams kernel_of(const std::string& kind, double gamma) {
  KernelParams k{kernel_kind_from_string(kind), gamma};
  k.validate();
  return k;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiclass kernel SVMs: centroid-based binary tree (CBTS), one-vs-one and one-vs-all";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def_static("from_arrays", &from_arrays, py::arg("X"), py::arg("y"))
      .def("__len__", &Dataset::size)
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("num_classes", &Dataset::num_classes)
      .def_property_readonly("label_names", &Dataset::label_names)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("X", &values_of)
      .def("subset", [](const Dataset& ds, const std::vector<std::size_t>& idx) { return ds.subset(idx); })
      .def("to_libsvm", [](const Dataset& ds) {
        std::ostringstream out;
        write_libsvm(out, ds);
        return out.str();
      });

  m.def("load_libsvm", &load_libsvm, py::arg("path"));
  m.def("parse_libsvm", &parse_libsvm_string, py::arg("text"));

  py::class_<Scaler>(m, "Scaler")
      .def_readonly("min", &Scaler::min)
      .def_readonly("max", &Scaler::max);
  m.def("fit_scaler", &fit_scaler, py::arg("ds"));
  m.def("apply_scaler", &apply_scaler, py::arg("scaler"), py::arg("ds"));

  m.def(
      "shuffle_split",
      [](const Dataset& ds, double train_fraction, std::uint64_t seed) {
        auto s = shuffle_split(ds, {train_fraction, seed});
        return py::make_tuple(s.train, s.test, s.warnings);
      },
      py::arg("ds"), py::arg("train_fraction") = 2.0 / 3.0, py::arg("seed") = 0);
  m.def("synth_blobs", &synth_blobs, py::arg("n_classes"), py::arg("per_class"), py::arg("dim"), py::arg("spread"),
        py::arg("seed") = 0);

  py::class_<BinarySvmModel>(m, "BinaryModel")
      .def("decision_value", [](const BinarySvmModel& b, const Array& z) { return b.decision_value(as_vector(z)); })
      .def("predict_sign", [](const BinarySvmModel& b, const Array& z) { return b.predict_sign(as_vector(z)); })
      .def_property_readonly("num_sv", &BinarySvmModel::num_sv)
      .def_property_readonly("coeffs", &BinarySvmModel::coeffs)
      .def_property_readonly("bias", &BinarySvmModel::bias)
      .def_property_readonly("converged", &BinarySvmModel::converged);
  m.def(
      "train_binary",
      [](const Dataset& ds, const std::vector<int>& y, const std::string& kernel, double gamma, double C,
         double kkt_tol) {
        const auto k = kernel_of(kernel, gamma);
        py::gil_scoped_release release;
        return train_binary(ds, y, k, SolverConfig{.C = C, .kkt_tol = kkt_tol});
      },
      py::arg("ds"), py::arg("y"), py::arg("kernel") = "rbf", py::arg("gamma") = 1.0, py::arg("C") = 1.0,
      py::arg("kkt_tol") = 1e-3);

  py::class_<ClusterResult>(m, "ClusterResult")
      .def_property_readonly("centroids",
                             [](const ClusterResult& c) { return py::make_tuple(c.centroids[0], c.centroids[1]); })
      .def_readonly("assignment", &ClusterResult::assignment)
      .def_readonly("total_sse", &ClusterResult::total_sse)
      .def_readonly("sse_history", &ClusterResult::sse_history);
  m.def(
      "kmeans2", [](const Dataset& ds, std::uint64_t seed) { return kmeans2(ds, {.seed = seed}); }, py::arg("ds"),
      py::arg("seed") = 0);
  m.def(
      "majority_partition",
      [](const Dataset& ds, const ClusterResult& cr) {
        auto p = majority_partition(ds, cr);
        return py::make_tuple(p.left_labels, p.right_labels, p.sse);
      },
      py::arg("ds"), py::arg("clusters"));

  py::class_<MulticlassModel>(m, "MulticlassModel")
      .def_property_readonly("strategy", [](const MulticlassModel& mm) { return to_string(mm.strategy()); })
      .def_readonly("label_names", &MulticlassModel::label_names)
      .def_readonly("dim", &MulticlassModel::dim)
      .def_property_readonly("num_classifiers", &MulticlassModel::num_classifiers)
      .def_property_readonly("worst_path_evals", &MulticlassModel::worst_path_evals)
      .def_property_readonly("converged", &MulticlassModel::converged)
      .def_property_readonly("topology",
                             [](const MulticlassModel& mm) -> py::object {
                               if (const auto* t = std::get_if<CbtsTree>(&mm.body)) return py::str(cbts_topology(*t));
                               return py::none();
                             })
      .def("predict", [](const MulticlassModel& mm, const Array& z) { return mm.predict(as_vector(z)); })
      .def("predict_many",
           [](const MulticlassModel& mm, const Array& x) {
             if (x.ndim() != 2) throw std::invalid_argument("X must be 2-dimensional");
             const auto n = static_cast<std::size_t>(x.shape(0)), d = static_cast<std::size_t>(x.shape(1));
             std::vector<int> out(n);
             for (std::size_t i = 0; i < n; ++i) out[i] = mm.predict(std::span<const double>(x.data() + i * d, d));
             return out;
           })
      .def("accuracy", [](const MulticlassModel& mm, const Dataset& ds) { return accuracy(mm, ds); })
      .def("save", [](const MulticlassModel& mm, const std::filesystem::path& dir) { save_multiclass(dir, mm); })
      .def_static("load", &load_multiclass, py::arg("dir"));

  m.def(
      "train_multiclass",
      [](const Dataset& ds, const std::string& strategy, const std::string& kernel, double gamma, double C,
         std::uint64_t seed) {
        const auto s = strategy_from_string(strategy);
        const auto k = kernel_of(kernel, gamma);
        py::gil_scoped_release release;
        return train_multiclass(s, ds, k, SolverConfig{.C = C}, seed);
      },
      py::arg("ds"), py::arg("strategy") = "cbts", py::arg("kernel") = "rbf", py::arg("gamma") = 1.0,
      py::arg("C") = 1.0, py::arg("seed") = 0);

  m.def(
      "classifier_count",
      [](const std::string& strategy, std::size_t n) {
        auto c = classifier_count(strategy_from_string(strategy), n);
        return py::make_tuple(c.train_count, c.worst_case_evals);
      },
      py::arg("strategy"), py::arg("n_classes"));

  m.def(
      "grid_search",
      [](const Dataset& train, const Dataset& test, const std::string& strategy, std::pair<int, int> gamma_exponents,
         std::pair<int, int> cost_exponents, int step, std::uint64_t seed) {
        GridConfig g;
        g.strategy = strategy_from_string(strategy);
        g.gamma_exponents = {gamma_exponents.first, gamma_exponents.second};
        g.cost_exponents = {cost_exponents.first, cost_exponents.second};
        g.exponent_step = step;
        g.seed = seed;
        GridReport report;
        {
          py::gil_scoped_release release;
          report = grid_search(train, test, g);
        }
        py::list records;
        for (const auto& r : report.records) {
          py::dict d;
          d["gamma_exp"] = r.gamma_exp;
          d["cost_exp"] = r.cost_exp;
          d["accuracy"] = r.accuracy;
          d["train_s"] = r.train_seconds;
          d["test_s"] = r.test_seconds;
          d["n_classifiers"] = r.n_classifiers;
          d["converged"] = r.converged;
          records.append(d);
        }
        py::object best = report.best ? py::int_(*report.best) : py::object(py::none());
        return py::make_tuple(records, best);
      },
      py::arg("train"), py::arg("test"), py::arg("strategy") = "cbts", py::arg("gamma_exponents") = std::pair{-10, 4},
      py::arg("cost_exponents") = std::pair{-2, 12}, py::arg("step") = 2, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"treesvm"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
