#include "bakeoff/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "bakeoff/baselines.hpp"
#include "bakeoff/forests.hpp"
#include "bakeoff/svm.hpp"

namespace bakeoff {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::svm: return "svm";
    case Family::random_forest: return "random_forest";
    case Family::rotation_forest: return "rotation_forest";
    case Family::logistic: return "logistic";
    case Family::nn1: return "nn1";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::svm, Family::random_forest, Family::rotation_forest, Family::logistic, Family::nn1}) {
    if (family_name(f) == name) return f;
  }
  throw UnknownFamilyError("unknown classifier family '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_params(const ParamMap& p) {
  std::string out;
  for (const auto& [k, v] : p) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

ParamMap parse_params(std::string_view text) {
  ParamMap out;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto item = text.substr(0, semi);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw InvalidParamError("malformed parameter '" + std::string(item) + "'");
    }
    out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return out;
}

const std::vector<std::string>& declared_params(Family f) {
  static const std::vector<std::string> svm{"C", "degree", "gamma", "kernel"};
  static const std::vector<std::string> rf{"n_features", "n_trees"};
  static const std::vector<std::string> rot{"f", "n_trees", "p"};
  static const std::vector<std::string> logistic{"ridge"};
  static const std::vector<std::string> none;
  switch (f) {
    case Family::svm: return svm;
    case Family::random_forest: return rf;
    case Family::rotation_forest: return rot;
    case Family::logistic: return logistic;
    case Family::nn1: return none;
  }
  return none;
}

ParamMap default_params(Family f) {
  switch (f) {
    case Family::svm: return {{"kernel", "linear"}, {"C", "1"}, {"gamma", "0.01"}, {"degree", "2"}};
    case Family::random_forest: return {{"n_trees", "10"}, {"n_features", "log2plus1"}};
    case Family::rotation_forest: return {{"n_trees", "10"}, {"f", "3"}, {"p", "0.5"}};
    case Family::logistic: return {{"ridge", "1e-8"}};
    case Family::nn1: return {};
  }
  return {};
}

namespace {

double get_double(const ParamMap& p, const std::string& key) {
  const std::string& s = p.at(key);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidParamError("parameter " + key + " is not a number: '" + s + "'");
  }
  return v;
}

long get_int(const ParamMap& p, const std::string& key) {
  const std::string& s = p.at(key);
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidParamError("parameter " + key + " is not an integer: '" + s + "'");
  }
  return v;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidParamError(msg);
}

KernelSpec svm_kernel(const ParamMap& p) {
  const std::string& kind = p.at("kernel");
  if (kind == "linear") return KernelSpec::linear();
  if (kind == "polynomial") {
    const long d = get_int(p, "degree");
    require(d >= 1, "degree must be at least 1");
    return KernelSpec::polynomial(static_cast<int>(d));
  }
  if (kind == "rbf") {
    const double g = get_double(p, "gamma");
    require(g > 0, "gamma must be positive");
    return KernelSpec::rbf(g);
  }
  throw InvalidParamError("unknown kernel '" + kind + "'");
}

RandomForestParams rf_params(const ParamMap& p) {
  RandomForestParams out;
  const long n = get_int(p, "n_trees");
  require(n >= 1, "n_trees must be at least 1");
  out.n_trees = static_cast<int>(n);
  const std::string& nf = p.at("n_features");
  if (nf == "sqrt") {
    out.rule = FeatureCountRule::sqrt;
  } else if (nf == "log2plus1") {
    out.rule = FeatureCountRule::log2plus1;
  } else {
    const long k = get_int(p, "n_features");
    require(k >= 1, "n_features must be at least 1");
    out.rule = FeatureCountRule::explicit_count;
    out.explicit_features = static_cast<std::size_t>(k);
  }
  return out;
}

RotationForestParams rot_params(const ParamMap& p) {
  RotationForestParams out;
  const long n = get_int(p, "n_trees");
  require(n >= 1, "n_trees must be at least 1");
  out.n_trees = static_cast<int>(n);
  const long f = get_int(p, "f");
  require(f >= 1, "f must be at least 1");
  out.group_size = static_cast<std::size_t>(f);
  out.sample_proportion = get_double(p, "p");
  require(out.sample_proportion > 0 && out.sample_proportion <= 1, "p must lie in (0, 1]");
  return out;
}

void check_arity(std::span<const double> x, std::size_t m) {
  if (x.size() != m) throw std::invalid_argument("instance arity does not match the model");
}

class SvmClassifier final : public TrainedModel {
 public:
  explicit SvmClassifier(PairwiseSvmModel m) : m_(std::move(m)) {}
  std::vector<double> distribution(std::span<const double> x) const override {
    check_arity(x, m_.num_features());
    const auto v = m_.votes(x);
    const std::size_t k = m_.num_classes();
    const double pairs = static_cast<double>(k * (k - 1) / 2);
    std::vector<double> d(k);
    for (std::size_t c = 0; c < k; ++c) d[c] = static_cast<double>(v[c]) / pairs;
    return d;
  }
  int predict(std::span<const double> x) const override {
    check_arity(x, m_.num_features());
    return m_.predict(x);
  }
  std::size_t num_features() const override { return m_.num_features(); }
  std::size_t num_classes() const override { return m_.num_classes(); }

 private:
  PairwiseSvmModel m_;
};

template <typename Forest>
class ForestClassifier final : public TrainedModel {
 public:
  explicit ForestClassifier(Forest m) : m_(std::move(m)) {}
  std::vector<double> distribution(std::span<const double> x) const override { return m_.distribution(x); }
  std::vector<double> distribution_prefix(std::span<const double> x, std::size_t n) const override {
    return m_.distribution_prefix(x, n);
  }
  std::size_t ensemble_size() const override { return m_.trees().size(); }
  std::size_t num_features() const override { return m_.num_features(); }
  std::size_t num_classes() const override { return m_.num_classes(); }

 private:
  Forest m_;
};

class LogisticClassifier final : public TrainedModel {
 public:
  explicit LogisticClassifier(LogisticModel m) : m_(std::move(m)) {}
  std::vector<double> distribution(std::span<const double> x) const override {
    check_arity(x, m_.num_features());
    return m_.distribution(x);
  }
  std::size_t num_features() const override { return m_.num_features(); }
  std::size_t num_classes() const override { return m_.num_classes(); }

 private:
  LogisticModel m_;
};

class NearestNeighbourClassifier final : public TrainedModel {
 public:
  explicit NearestNeighbourClassifier(Dataset d) : d_(std::move(d)) {}
  std::vector<double> distribution(std::span<const double> x) const override {
    std::vector<double> p(num_classes(), 0.0);
    p[static_cast<std::size_t>(predict(x))] = 1.0;
    return p;
  }
  int predict(std::span<const double> x) const override {
    check_arity(x, num_features());
    return nn1_predict(d_, x);
  }
  std::size_t num_features() const override { return d_.schema().num_attributes(); }
  std::size_t num_classes() const override { return d_.schema().num_classes(); }

 private:
  Dataset d_;
};

}  // namespace

ParamMap ClassifierSpec::resolved() const {
  ParamMap out = default_params(family);
  const auto& keys = declared_params(family);
  for (const auto& [k, v] : params) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw InvalidParamError("parameter '" + k + "' is not defined for " + std::string(family_name(family)));
    }
    out[k] = v;
  }
  return out;
}

void ClassifierSpec::validate() const {
  const ParamMap p = resolved();
  switch (family) {
    case Family::svm:
      svm_kernel(p);
      require(get_double(p, "C") > 0, "C must be positive");
      break;
    case Family::random_forest: rf_params(p); break;
    case Family::rotation_forest: rot_params(p); break;
    case Family::logistic: require(get_double(p, "ridge") >= 0, "ridge must be non-negative"); break;
    case Family::nn1: break;
  }
}

std::string ClassifierSpec::to_string() const {
  return std::string(family_name(family)) + "(" + format_params(params) + ")";
}

std::vector<double> TrainedModel::distribution_prefix(std::span<const double> x, std::size_t) const {
  return distribution(x);
}

int TrainedModel::predict(std::span<const double> x) const { return argmax(distribution(x)); }

int argmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

std::unique_ptr<TrainedModel> train(const ClassifierSpec& spec, const Dataset& d, std::uint64_t seed) {
  spec.validate();
  const ParamMap p = spec.resolved();
  switch (spec.family) {
    case Family::svm: {
      SmoParams sp;
      sp.c = get_double(p, "C");
      return std::make_unique<SvmClassifier>(pairwise_train(d, svm_kernel(p), sp, seed));
    }
    case Family::random_forest: {
      auto rp = rf_params(p);
      if (rp.rule == FeatureCountRule::explicit_count && rp.explicit_features > d.schema().num_attributes()) {
        throw InvalidParamError("n_features exceeds the number of features");
      }
      return std::make_unique<ForestClassifier<RandomForestModel>>(rf_train(d, rp, seed));
    }
    case Family::rotation_forest: {
      auto rp = rot_params(p);
      rp.group_size = std::min(rp.group_size, d.schema().num_attributes());
      return std::make_unique<ForestClassifier<RotationForestModel>>(rot_train(d, rp, C45Params{}, seed));
    }
    case Family::logistic: {
      LogisticParams lp;
      lp.ridge = get_double(p, "ridge");
      return std::make_unique<LogisticClassifier>(logistic_train(d, lp));
    }
    case Family::nn1:
      if (d.num_rows() == 0) throw std::invalid_argument("1-NN needs a non-empty training set");
      return std::make_unique<NearestNeighbourClassifier>(d);
  }
  throw UnknownFamilyError("unknown classifier family");
}

double accuracy(const TrainedModel& m, const Dataset& d) {
  if (d.num_rows() == 0) throw std::invalid_argument("accuracy of an empty dataset");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    if (m.predict(d.row(r)) == d.label(r)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(d.num_rows());
}

double accuracy_prefix(const TrainedModel& m, const Dataset& d, std::size_t n) {
  if (d.num_rows() == 0) throw std::invalid_argument("accuracy of an empty dataset");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    if (argmax(m.distribution_prefix(d.row(r), n)) == d.label(r)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(d.num_rows());
}

}  // namespace bakeoff
