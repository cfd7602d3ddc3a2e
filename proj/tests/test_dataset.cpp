#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "support/helpers.hpp"
#include "treesvm/dataset.hpp"

using namespace treesvm;

TEST_CASE("parse_libsvm densifies sparse rows") {
  auto ds = parse_libsvm_string("1 1:0.5 3:2.0\n2 2:1.0");
  CHECK(ds.dim() == 3);
  REQUIRE(ds.size() == 2);
  CHECK(std::vector<double>(ds.row(0).begin(), ds.row(0).end()) == std::vector<double>{0.5, 0.0, 2.0});
  CHECK(std::vector<double>(ds.row(1).begin(), ds.row(1).end()) == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(ds.label_names() == std::vector<std::string>{"1", "2"});
  CHECK(ds.labels() == std::vector<int>{0, 1});
}

TEST_CASE("parse_libsvm maps labels by first appearance") {
  auto ds = parse_libsvm_string("7 1:1\n-1 1:2\n7 1:3\n\n# comment only\n3 1:4\n");
  CHECK(ds.label_names() == std::vector<std::string>{"7", "-1", "3"});
  CHECK(ds.labels() == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("parse_libsvm errors") {
  CHECK_THROWS_AS(parse_libsvm_string(""), ParseError);
  CHECK_THROWS_AS(parse_libsvm_string("\n\n"), ParseError);

  try {
    parse_libsvm_string("1 1:0.5\n2 2:abc\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_libsvm_string("1 1:0.5\n1 1:1\n2 3:1 2:1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_libsvm_string("1 0:1\n"), ParseError);
  CHECK_THROWS_AS(parse_libsvm_string("1 1:1 1:2\n"), ParseError);
  CHECK_THROWS_AS(parse_libsvm_string("1 x:1\n"), ParseError);
  CHECK_THROWS_AS(parse_libsvm_string("1 1\n"), ParseError);
}

TEST_CASE("bundled Iris file has the UCI shape") {
  auto ds = load_libsvm(testing::data_path("iris.libsvm"));
  CHECK(ds.size() == 150);
  CHECK(ds.dim() == 4);
  CHECK(ds.num_classes() == 3);
}

TEST_CASE("bundled Glass and Pendigits shapes") {
  auto glass = load_libsvm(testing::data_path("glass.libsvm"));
  CHECK(glass.size() == 214);
  CHECK(glass.dim() == 9);
  CHECK(glass.num_classes() == 6);
  auto pen = load_libsvm(testing::data_path("pendigits.libsvm"));
  CHECK(pen.size() == 10992);
  CHECK(pen.dim() == 16);
  CHECK(pen.num_classes() == 10);
}

TEST_CASE("load_libsvm reports missing files") {
  CHECK_THROWS_WITH_AS(load_libsvm("/nonexistent/file.libsvm"), doctest::Contains("cannot open"),
                       std::runtime_error);
}

TEST_CASE("write_libsvm then parse_libsvm is the identity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto ds = testing::random_dataset(rng, 1 + trial * 3, 1 + trial % 5, 1 + trial % 4);
    // Exact zeros vanish on write; keep one nonzero in the last column so d survives.
    for (std::size_t i = 0; i < ds.size(); ++i) {
      ds.row(i)[ds.dim() - 1] = 0.25 + i;
      if (i % 3 == 0 && ds.dim() > 1) ds.row(i)[0] = 0.0;
    }
    std::stringstream ss;
    write_libsvm(ss, ds);
    auto back = parse_libsvm(ss);
    CHECK(back.values() == ds.values());
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
      CHECK(back.label_names()[back.label(i)] == ds.label_names()[ds.label(i)]);
  }
}

TEST_CASE("fit_scaler examples") {
  auto ds = testing::from_rows({{0, 10}, {4, 10}}, {0, 0}, 1);
  auto s = fit_scaler(ds);
  CHECK(s.min == std::vector<double>{0, 10});
  CHECK(s.max == std::vector<double>{4, 10});

  auto single = fit_scaler(testing::from_rows({{3}}, {0}, 1));
  CHECK(single.min == std::vector<double>{3});
  CHECK(single.max == std::vector<double>{3});

  CHECK_THROWS_AS(fit_scaler(Dataset{}), std::invalid_argument);
}

TEST_CASE("apply_scaler maps, zeroes constant features, clamps") {
  Scaler s{{0, 10}, {4, 10}};
  auto out = apply_scaler(s, testing::from_rows({{2, 10}, {5, 10}, {-1, 3}}, {0, 0, 0}, 1));
  CHECK(out.row(0)[0] == 0.5);
  CHECK(out.row(0)[1] == 0.0);
  CHECK(out.row(1)[0] == 1.0);
  CHECK(out.row(2)[0] == 0.0);
  CHECK_THROWS_AS(apply_scaler(s, testing::from_rows({{1}}, {0}, 1)), std::invalid_argument);
}

TEST_CASE("scaling the fitting set lands in [0,1]") {
  auto glass = load_libsvm(testing::data_path("glass.libsvm"));
  auto split = shuffle_split(glass, {2.0 / 3.0, 5});
  auto scaled = apply_scaler(fit_scaler(split.train), split.train);
  CHECK(std::all_of(scaled.values().begin(), scaled.values().end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
  // Every non-constant feature reaches both ends.
  for (std::size_t j = 0; j < scaled.dim(); ++j) {
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      lo = std::min(lo, scaled.row(i)[j]);
      hi = std::max(hi, scaled.row(i)[j]);
    }
    CHECK(lo == 0.0);
    if (hi != 0.0) CHECK(hi == 1.0);
  }

  std::mt19937_64 rng(3);
  for (int t = 0; t < 25; ++t) {
    auto ds = testing::random_dataset(rng, 2 + t, 1 + t % 6, 2);
    auto sc = apply_scaler(fit_scaler(ds), ds);
    CHECK(std::all_of(sc.values().begin(), sc.values().end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
  }
}

TEST_CASE("scaler CSV round trip") {
  Scaler s{{0.1, -3, 1e-300}, {0.7, 2.5, 1e300}};
  std::stringstream ss;
  write_scaler(ss, s);
  auto back = read_scaler(ss);
  CHECK(back.min == s.min);
  CHECK(back.max == s.max);

  std::stringstream bad("1,2\n0,3\n");
  CHECK_THROWS_AS(read_scaler(bad), ParseError);
}

TEST_CASE("shuffle_split sizes follow the 2/3 rule") {
  auto iris = load_libsvm(testing::data_path("iris.libsvm"));
  auto s = shuffle_split(iris, {2.0 / 3.0, 1});
  CHECK(s.train.size() == 100);
  CHECK(s.test.size() == 50);
  CHECK(s.warnings.empty());
}

TEST_CASE("shuffle_split is deterministic under seed and varies across seeds") {
  auto iris = load_libsvm(testing::data_path("iris.libsvm"));
  auto a = shuffle_split(iris, {2.0 / 3.0, 42});
  auto b = shuffle_split(iris, {2.0 / 3.0, 42});
  auto c = shuffle_split(iris, {2.0 / 3.0, 43});
  CHECK(a.train.values() == b.train.values());
  CHECK(a.test.labels() == b.test.labels());
  CHECK(a.train.values() != c.train.values());
}

TEST_CASE("shuffle_split preserves the multiset of rows") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto ds = testing::random_dataset(rng, 2 + 7 * t, 3, 3);
    auto s = shuffle_split(ds, {0.3 + 0.02 * t, std::uint64_t(t)});
    CHECK(!s.train.empty());
    CHECK(!s.test.empty());
    std::multiset<std::pair<std::vector<double>, int>> before, after;
    for (std::size_t i = 0; i < ds.size(); ++i) before.insert({{ds.row(i).begin(), ds.row(i).end()}, ds.label(i)});
    for (const auto* part : {&s.train, &s.test})
      for (std::size_t i = 0; i < part->size(); ++i)
        after.insert({{part->row(i).begin(), part->row(i).end()}, part->label(i)});
    CHECK(before == after);
  }
}

TEST_CASE("shuffle_split warns when a side loses label diversity") {
  auto ds = testing::from_rows({{0}, {1}, {2}}, {0, 0, 1}, 2);
  auto s = shuffle_split(ds, {0.5, 0});
  CHECK(!s.warnings.empty());
  CHECK_THROWS_AS(shuffle_split(testing::from_rows({{0}}, {0}, 1), {}), std::invalid_argument);
  CHECK_THROWS_AS(shuffle_split(ds, {1.0, 0}), std::invalid_argument);
}

TEST_CASE("synth_blobs shapes and determinism") {
  auto small = synth_blobs(2, 5, 2, 0.01, 9);
  CHECK(small.size() == 10);
  CHECK(small.dim() == 2);
  CHECK(small.num_classes() == 2);
  // Tight blobs at distinct lattice corners: every point within 0.1 of its center.
  for (std::size_t i = 0; i < small.size(); ++i) {
    double cx = small.label(i) == 0 ? 0.0 : 1.0;
    CHECK(std::abs(small.row(i)[0] - cx) < 0.1);
    CHECK(std::abs(small.row(i)[1]) < 0.1);
  }

  auto big = synth_blobs(6, 5000, 5, 0.5, 1);
  CHECK(big.size() == 30000);
  CHECK(big.dim() == 5);
  CHECK(big.present_labels().size() == 6);

  CHECK(synth_blobs(3, 4, 2, 0.2, 77).values() == synth_blobs(3, 4, 2, 0.2, 77).values());
  CHECK(synth_blobs(3, 4, 2, 0.2, 77).values() != synth_blobs(3, 4, 2, 0.2, 78).values());
  CHECK_THROWS_AS(synth_blobs(1, 4, 2, 0.2, 0), std::invalid_argument);
  CHECK_THROWS_AS(synth_blobs(2, 4, 2, 0.0, 0), std::invalid_argument);
}

TEST_CASE("Dataset rejects inconsistent construction") {
  CHECK_THROWS_AS(Dataset(2, {1.0}, {0}, {"a"}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset(1, {1.0}, {3}, {"a"}), std::invalid_argument);
}
