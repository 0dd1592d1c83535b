#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bakeoff/dataset.hpp"
#include "support.hpp"

using namespace bakeoff;
using testing_support::numeric_dataset;

namespace {

Dataset csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "t");
}

Dataset arff(const std::string& text) {
  std::istringstream in(text);
  return parse_arff(in, "t");
}

Dataset balanced(std::size_t n) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back({static_cast<double>(i), static_cast<double>(i % 7)});
    labels.push_back(static_cast<int>(i % 2));
  }
  return numeric_dataset(rows, labels, 2, "balanced");
}

std::vector<std::vector<double>> sorted_rows(const Dataset& d) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    auto r = std::vector<double>(d.row(i).begin(), d.row(i).end());
    r.push_back(d.label(i));
    out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("csv with two numeric features") {
  const Dataset d = csv("f1,f2,class\n1,2,a\n3,4,b\n5,6,a\n");
  CHECK(d.num_rows() == 3);
  CHECK(d.schema().num_attributes() == 2);
  CHECK(d.schema().num_classes() == 2);
  CHECK(d.all_numeric());
  CHECK(d.value(1, 1) == 4.0);
  CHECK(d.label(1) == 1);
}

TEST_CASE("arff nominal attribute keeps its value list") {
  const Dataset d = arff(
      "% comment\n@RELATION x\n@attribute color {r,g,b}\n@Attribute size NUMERIC\n"
      "@attribute class {yes,no}\n@DATA\ng,1.5,no\nb,2,yes\n");
  const auto& f = d.schema().features[0];
  CHECK(f.is_nominal());
  CHECK(f.values == std::vector<std::string>{"r", "g", "b"});
  CHECK(d.value(0, 0) == 1.0);
  CHECK(d.label(0) == 1);
}

TEST_CASE("arity mismatch names the row") {
  try {
    arff("@relation x\n@attribute a numeric\n@attribute b numeric\n@attribute class {p,q}\n@data\n1,2,p\n1,2,3,p\n");
    FAIL("expected a parse error");
  } catch (const DatasetError& e) {
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
  CHECK_THROWS_AS(csv("f1,f2,class\n1,2,a\n1,2,3,a\n"), DatasetError);
}

TEST_CASE("unknown class label and empty data are errors") {
  CHECK_THROWS_AS(arff("@relation x\n@attribute a numeric\n@attribute class {p,q}\n@data\n1,r\n"), DatasetError);
  CHECK_THROWS_AS(arff("@relation x\n@attribute a numeric\n@attribute class {p,q}\n@data\n"), DatasetError);
  CHECK_THROWS_AS(csv("f1,class\n"), DatasetError);
}

TEST_CASE("missing nominal cells take the mode, numeric cells stay missing") {
  const Dataset d = arff(
      "@relation x\n@attribute c {u,v}\n@attribute n numeric\n@attribute class {p,q}\n@data\n"
      "v,1,p\nv,?,q\nu,3,p\n?,4,q\n");
  CHECK(d.value(3, 0) == 1.0);
  CHECK(std::isnan(d.value(1, 1)));
  CHECK(d.has_missing());
  auto [tr, te] = impute_missing(d, d);
  CHECK(tr.value(1, 1) == doctest::Approx(8.0 / 3.0));
  CHECK_FALSE(te.has_missing());
}

TEST_CASE("feature spec rejects bad value lists") {
  CHECK_THROWS(FeatureSpec::nominal("x", {}));
  CHECK_THROWS(FeatureSpec::nominal("x", {"a", "a"}));
}

TEST_CASE("nominal encoding") {
  const Dataset d = arff(
      "@relation x\n@attribute c {a,b,c}\n@attribute y {yes,no}\n@attribute n numeric\n@attribute class {p,q}\n@data\n"
      "b,yes,7,p\nc,no,8,q\na,yes,9,p\n");
  const Dataset e = encode_nominal_to_binary(d);
  REQUIRE(e.num_features() == 5);
  CHECK(e.value(0, 0) == 0.0);
  CHECK(e.value(0, 1) == 1.0);
  CHECK(e.value(0, 2) == 0.0);
  CHECK(e.value(0, 3) == 1.0);
  CHECK(e.value(1, 3) == 0.0);
  CHECK(e.value(2, 4) == 9.0);
  CHECK(e.num_rows() == d.num_rows());
  for (std::size_t i = 0; i < e.num_rows(); ++i) {
    CHECK(e.label(i) == d.label(i));
    CHECK(e.value(i, 0) + e.value(i, 1) + e.value(i, 2) == 1.0);
  }
  const Dataset num = balanced(6);
  const Dataset same = encode_nominal_to_binary(num);
  CHECK(std::equal(num.values().begin(), num.values().end(), same.values().begin(), same.values().end()));
}

TEST_CASE("normalisation uses train statistics only") {
  const Dataset train = numeric_dataset({{0, 3}, {10, 3}}, {0, 1});
  const Dataset test = numeric_dataset({{5, 4}, {12, -1}}, {0, 1});
  const auto n = normalize_fit_apply(train, test);
  CHECK(n.test.value(0, 0) == 0.5);
  CHECK(n.test.value(1, 0) == doctest::Approx(1.2));
  CHECK(n.test.value(0, 1) == 0.0);
  CHECK(n.test.value(1, 1) == 0.0);
  CHECK(n.stats.min[0] == 0.0);
  CHECK(n.stats.max[0] == 10.0);
}

TEST_CASE("normalising normalised data is the identity") {
  const Dataset d = testing_support::blobs(40, 5, 3, 2.0, 11);
  const auto once = normalize_fit_apply(d, d);
  const auto twice = normalize_fit_apply(once.train, once.train);
  for (std::size_t i = 0; i < d.values().size(); ++i) CHECK(twice.train.values()[i] == once.train.values()[i]);
}

TEST_CASE("stratified resample: exact stratification and determinism") {
  const Dataset d = balanced(100);
  const SplitPair a = stratified_resample(d, 3, 42, 0.5);
  const auto counts = a.train.class_counts();
  CHECK(counts[0] == 25);
  CHECK(counts[1] == 25);
  const SplitPair b = stratified_resample(d, 3, 42, 0.5);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.test_rows == b.test_rows);
  CHECK(a.seed == b.seed);
  const SplitPair c = stratified_resample(d, 4, 42, 0.5);
  CHECK(c.train_rows != a.train_rows);
}

TEST_CASE("stratified resample with an emptied class names it") {
  std::vector<std::vector<double>> rows(10, {1.0});
  const Dataset d = numeric_dataset(rows, std::vector<int>(10, 0));
  try {
    stratified_resample(d, 0, 1, 0.05);
    FAIL("expected an error");
  } catch (const DatasetError& e) {
    CHECK(std::string(e.what()).find("c0") != std::string::npos);
  }
}

TEST_CASE("resample halves partition the source rows for many seeds") {
  const Dataset d = testing_support::blobs(37, 2, 3, 1.0, 5);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const SplitPair s = stratified_resample(d, static_cast<int>(seed), seed * 7919, 0.37);
    std::vector<std::size_t> all = s.train_rows;
    all.insert(all.end(), s.test_rows.begin(), s.test_rows.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    auto merged = sorted_rows(s.train);
    auto t = sorted_rows(s.test);
    merged.insert(merged.end(), t.begin(), t.end());
    std::sort(merged.begin(), merged.end());
    CHECK(merged == sorted_rows(d));
    // Within one instance of the per-class target.
    const auto target = stratified_train_counts(d.class_counts(), 0.37);
    const auto got = s.train.class_counts();
    for (std::size_t c = 0; c < got.size(); ++c) CHECK(std::abs(static_cast<long>(got[c]) - static_cast<long>(target[c])) <= 1);
  }
}

TEST_CASE("train counts follow largest remainder") {
  const std::vector<std::size_t> counts{5, 5, 5};
  const auto t = stratified_train_counts(counts, 0.5);
  CHECK(t[0] + t[1] + t[2] == 8);
  CHECK(t == std::vector<std::size_t>{3, 3, 2});
}

TEST_CASE("kfold shapes") {
  const Dataset ten = balanced(10);
  const auto loo = kfold_partition(ten, 10, 3);
  REQUIRE(loo.size() == 10);
  for (const auto& f : loo) CHECK(f.validation_rows.size() == 1);

  const Dataset hundred = balanced(100);
  const auto folds = kfold_partition(hundred, 10, 3);
  std::vector<int> seen(100, 0);
  for (const auto& f : folds) {
    std::size_t c0 = 0;
    for (std::size_t r : f.validation_rows) {
      ++seen[r];
      if (hundred.label(r) == 0) ++c0;
    }
    CHECK(f.validation_rows.size() == 10);
    CHECK(c0 == 5);
    CHECK(f.train_rows.size() + f.validation_rows.size() == 100);
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
  CHECK(kfold_partition(hundred, 10, 3)[4].validation_rows == folds[4].validation_rows);

  CHECK_THROWS(kfold_partition(balanced(2), 3, 1));
}

TEST_CASE("kfold is a partition for uneven sizes") {
  const Dataset d = testing_support::blobs(53, 2, 4, 1.0, 9);
  for (int k : {2, 3, 7, 10, 53}) {
    const auto folds = kfold_partition(d, k, static_cast<std::uint64_t>(k));
    std::vector<int> seen(d.num_rows(), 0);
    std::size_t lo = d.num_rows();
    std::size_t hi = 0;
    for (const auto& f : folds) {
      for (std::size_t r : f.validation_rows) ++seen[r];
      lo = std::min(lo, f.validation_rows.size());
      hi = std::max(hi, f.validation_rows.size());
    }
    CHECK(hi - lo <= 1);
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
  }
}

TEST_CASE("bundled datasets load") {
  for (const char* name : {"ionosphere", "sonar", "monk-2", "pima", "wdbc", "statlog-vehicle", "hill-valley", "iris"}) {
    const Dataset d = load_dataset(testing_support::data_dir() / (std::string(name) + ".arff"));
    CHECK(d.id() == name);
    CHECK(d.num_rows() > 100);
  }
}
