#include "bakeoff/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bakeoff/random.hpp"

namespace bakeoff {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Comma split that respects single and double quotes.
std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      cur += c;
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
      cur += c;
    } else if (c == ',') {
      out.push_back(unquote(trim(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(unquote(trim(cur)));
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last && std::isfinite(v);
}

bool is_missing_token(const std::string& s) { return s == "?" || s.empty(); }

// Replace missing nominal cells with the column mode (lowest index on ties).
void impute_nominal_modes(const DatasetSchema& schema, std::vector<double>& values,
                          std::size_t rows) {
  const std::size_t m = schema.num_attributes();
  for (std::size_t j = 0; j < m; ++j) {
    const auto& f = schema.features[j];
    if (!f.is_nominal()) continue;
    std::vector<std::size_t> counts(f.values.size(), 0);
    bool any_missing = false;
    for (std::size_t i = 0; i < rows; ++i) {
      double v = values[i * m + j];
      if (std::isnan(v)) {
        any_missing = true;
      } else {
        ++counts[static_cast<std::size_t>(v)];
      }
    }
    if (!any_missing) continue;
    const auto mode = static_cast<double>(std::max_element(counts.begin(), counts.end()) -
                                          counts.begin());
    for (std::size_t i = 0; i < rows; ++i) {
      if (std::isnan(values[i * m + j])) values[i * m + j] = mode;
    }
  }
}

}  // namespace

FeatureSpec FeatureSpec::numeric(std::string name) {
  return FeatureSpec{std::move(name), FeatureKind::numeric, {}};
}

FeatureSpec FeatureSpec::nominal(std::string name, std::vector<std::string> values) {
  if (values.empty()) {
    throw std::invalid_argument("nominal feature '" + name + "' has no values");
  }
  std::set<std::string> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) {
      throw std::invalid_argument("nominal feature '" + name + "' repeats value '" + v + "'");
    }
  }
  return FeatureSpec{std::move(name), FeatureKind::nominal, std::move(values)};
}

void DatasetSchema::validate() const {
  if (features.empty()) throw std::invalid_argument("schema has no features");
  if (class_values.size() < 2) throw std::invalid_argument("schema needs at least two classes");
  std::set<std::string> seen(class_values.begin(), class_values.end());
  if (seen.size() != class_values.size()) {
    throw std::invalid_argument("duplicate class value");
  }
}

DatasetError::DatasetError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

Dataset::Dataset(std::string id, DatasetSchema schema, std::vector<double> values,
                 std::vector<int> labels)
    : id_(std::move(id)),
      schema_(std::move(schema)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  schema_.validate();
  if (values_.size() != labels_.size() * schema_.num_attributes()) {
    throw std::invalid_argument("dataset value count does not match rows x attributes");
  }
  const int k = static_cast<int>(schema_.num_classes());
  for (int y : labels_) {
    if (y < 0 || y >= k) throw std::invalid_argument("class index out of range");
  }
  const std::size_t m = schema_.num_attributes();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (std::isinf(v)) throw std::invalid_argument("infinite cell value");
    const auto& f = schema_.features[i % m];
    if (f.is_nominal() && !std::isnan(v)) {
      if (v < 0 || v >= static_cast<double>(f.values.size()) || v != std::floor(v)) {
        throw std::invalid_argument("nominal cell out of range for '" + f.name + "'");
      }
    }
  }
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

bool Dataset::has_missing() const {
  return std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

bool Dataset::all_numeric() const {
  return std::none_of(schema_.features.begin(), schema_.features.end(),
                      [](const FeatureSpec& f) { return f.is_nominal(); });
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  const std::size_t m = num_features();
  std::vector<double> values;
  values.reserve(rows.size() * m);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
  }
  return Dataset(id_, schema_, std::move(values), std::move(labels));
}

Dataset Dataset::with_id(std::string id) const {
  Dataset copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

Dataset parse_arff(std::istream& in, const std::string& id) {
  std::vector<FeatureSpec> attributes;
  bool in_data = false;
  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::unordered_map<std::string, int>> lookup;

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (!in_data) {
      if (t[0] != '@') throw DatasetError("expected a header declaration", line_no);
      std::size_t sp = t.find_first_of(" \t");
      std::string keyword = lower(t.substr(0, sp));
      std::string rest = sp == std::string::npos ? "" : trim(t.substr(sp));
      if (keyword == "@relation") continue;
      if (keyword == "@data") {
        if (attributes.size() < 2) throw DatasetError("need at least one feature and a class", line_no);
        if (!attributes.back().is_nominal()) {
          throw DatasetError("class attribute must be nominal", line_no);
        }
        lookup.resize(attributes.size());
        for (std::size_t j = 0; j < attributes.size(); ++j) {
          for (std::size_t v = 0; v < attributes[j].values.size(); ++v) {
            lookup[j][attributes[j].values[v]] = static_cast<int>(v);
          }
        }
        in_data = true;
        continue;
      }
      if (keyword != "@attribute") throw DatasetError("unknown declaration " + keyword, line_no);
      // Name, possibly quoted.
      std::string name;
      std::size_t pos = 0;
      if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
        std::size_t close = rest.find(rest[0], 1);
        if (close == std::string::npos) throw DatasetError("unterminated attribute name", line_no);
        name = rest.substr(1, close - 1);
        pos = close + 1;
      } else {
        pos = rest.find_first_of(" \t");
        if (pos == std::string::npos) throw DatasetError("attribute without a type", line_no);
        name = rest.substr(0, pos);
      }
      std::string type = trim(rest.substr(pos));
      if (type.empty()) throw DatasetError("attribute without a type", line_no);
      if (type[0] == '{') {
        std::size_t close = type.rfind('}');
        if (close == std::string::npos) throw DatasetError("unterminated value list", line_no);
        try {
          attributes.push_back(FeatureSpec::nominal(name, split_fields(type.substr(1, close - 1))));
        } catch (const std::invalid_argument& e) {
          throw DatasetError(e.what(), line_no);
        }
      } else {
        std::string lt = lower(type);
        if (lt != "numeric" && lt != "real" && lt != "integer") {
          throw DatasetError("unsupported attribute type '" + type + "'", line_no);
        }
        attributes.push_back(FeatureSpec::numeric(name));
      }
      continue;
    }
    if (t[0] == '{') throw DatasetError("sparse ARFF rows are not supported", line_no);
    auto fields = split_fields(t);
    if (fields.size() != attributes.size()) {
      throw DatasetError("row has " + std::to_string(fields.size()) + " values, expected " +
                             std::to_string(attributes.size()),
                         line_no);
    }
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
      const auto& f = fields[j];
      if (is_missing_token(f)) {
        values.push_back(kMissing);
      } else if (attributes[j].is_nominal()) {
        auto it = lookup[j].find(f);
        if (it == lookup[j].end()) {
          throw DatasetError("undeclared value '" + f + "' for " + attributes[j].name, line_no);
        }
        values.push_back(it->second);
      } else {
        double v;
        if (!parse_number(f, v)) throw DatasetError("not a number: '" + f + "'", line_no);
        values.push_back(v);
      }
    }
    const auto& cls = fields.back();
    auto it = lookup.back().find(cls);
    if (it == lookup.back().end()) throw DatasetError("unknown class label '" + cls + "'", line_no);
    labels.push_back(it->second);
  }
  if (!in_data) throw DatasetError("missing @data section");
  if (labels.empty()) throw DatasetError("empty dataset");

  DatasetSchema schema;
  schema.class_values = attributes.back().values;
  attributes.pop_back();
  schema.features = std::move(attributes);
  impute_nominal_modes(schema, values, labels.size());
  try {
    return Dataset(id, std::move(schema), std::move(values), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw DatasetError(e.what());
  }
}

Dataset parse_csv(std::istream& in, const std::string& id) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(trim(line));
      break;
    }
  }
  if (header.size() < 2) throw DatasetError("CSV header needs at least one feature and a class", line_no);
  const std::size_t m = header.size() - 1;

  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    auto fields = split_fields(t);
    if (fields.size() != header.size()) {
      throw DatasetError("row has " + std::to_string(fields.size()) + " values, expected " +
                             std::to_string(header.size()),
                         line_no);
    }
    if (is_missing_token(fields.back())) throw DatasetError("missing class label", line_no);
    cells.push_back(std::move(fields));
    row_lines.push_back(line_no);
  }
  if (cells.empty()) throw DatasetError("empty dataset");

  // A column is numeric when every present cell parses as a number.
  DatasetSchema schema;
  std::vector<std::map<std::string, int>> lookup(m);
  for (std::size_t j = 0; j < m; ++j) {
    bool numeric = true;
    double v;
    for (const auto& r : cells) {
      if (!is_missing_token(r[j]) && !parse_number(r[j], v)) {
        numeric = false;
        break;
      }
    }
    if (numeric) {
      schema.features.push_back(FeatureSpec::numeric(header[j]));
    } else {
      std::vector<std::string> vals;
      for (const auto& r : cells) {
        if (!is_missing_token(r[j]) && lookup[j].emplace(r[j], static_cast<int>(vals.size())).second) {
          vals.push_back(r[j]);
        }
      }
      schema.features.push_back(FeatureSpec::nominal(header[j], std::move(vals)));
    }
  }
  std::map<std::string, int> class_lookup;
  for (const auto& r : cells) {
    if (class_lookup.emplace(r.back(), static_cast<int>(schema.class_values.size())).second) {
      schema.class_values.push_back(r.back());
    }
  }
  if (schema.class_values.size() < 2) throw DatasetError("CSV needs at least two class labels");

  std::vector<double> values;
  values.reserve(cells.size() * m);
  std::vector<int> labels;
  for (const auto& r : cells) {
    for (std::size_t j = 0; j < m; ++j) {
      if (is_missing_token(r[j])) {
        values.push_back(kMissing);
      } else if (schema.features[j].is_nominal()) {
        values.push_back(lookup[j].at(r[j]));
      } else {
        double v;
        parse_number(r[j], v);
        values.push_back(v);
      }
    }
    labels.push_back(class_lookup.at(r.back()));
  }
  impute_nominal_modes(schema, values, labels.size());
  return Dataset(id, std::move(schema), std::move(values), std::move(labels));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::string ext = lower(path.extension().string());
  return load_dataset(path, ext == ".csv" ? DataFormat::csv : DataFormat::arff);
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  const std::string id = path.stem().string();
  return format == DataFormat::csv ? parse_csv(in, id) : parse_arff(in, id);
}

Dataset encode_nominal_to_binary(const Dataset& d) {
  if (d.all_numeric()) return d;
  const auto& in_schema = d.schema();
  DatasetSchema schema;
  schema.class_values = in_schema.class_values;
  for (const auto& f : in_schema.features) {
    if (!f.is_nominal()) {
      schema.features.push_back(f);
    } else if (f.values.size() <= 2) {
      schema.features.push_back(FeatureSpec::numeric(f.name));
    } else {
      for (const auto& v : f.values) schema.features.push_back(FeatureSpec::numeric(f.name + "=" + v));
    }
  }
  const std::size_t m_out = schema.num_attributes();
  std::vector<double> values;
  values.reserve(d.num_rows() * m_out);
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    auto r = d.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const auto& f = in_schema.features[j];
      const double v = r[j];
      if (!f.is_nominal()) {
        values.push_back(v);
      } else if (f.values.size() <= 2) {
        values.push_back(std::isnan(v) ? kMissing : (v == 0.0 ? 1.0 : 0.0));
      } else {
        for (std::size_t c = 0; c < f.values.size(); ++c) {
          values.push_back(std::isnan(v) ? kMissing : (static_cast<std::size_t>(v) == c ? 1.0 : 0.0));
        }
      }
    }
  }
  return Dataset(d.id(), std::move(schema), std::move(values),
                 std::vector<int>(d.labels().begin(), d.labels().end()));
}

NormalizedPair normalize_fit_apply(const Dataset& train, const Dataset& test) {
  const std::size_t m = train.num_features();
  if (test.num_features() != m) throw std::invalid_argument("train/test arity mismatch");
  NormStats stats;
  stats.min.assign(m, std::numeric_limits<double>::infinity());
  stats.max.assign(m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < train.num_rows(); ++i) {
    auto r = train.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      stats.min[j] = std::min(stats.min[j], r[j]);
      stats.max[j] = std::max(stats.max[j], r[j]);
    }
  }
  auto apply = [&](const Dataset& d) {
    std::vector<double> values(d.values().begin(), d.values().end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::size_t j = i % m;
      const double range = stats.max[j] - stats.min[j];
      values[i] = range > 0.0 ? (values[i] - stats.min[j]) / range : 0.0;
    }
    DatasetSchema schema = d.schema();
    for (auto& f : schema.features) f = FeatureSpec::numeric(f.name);
    return Dataset(d.id(), std::move(schema), std::move(values),
                   std::vector<int>(d.labels().begin(), d.labels().end()));
  };
  return NormalizedPair{apply(train), apply(test), std::move(stats)};
}

std::pair<Dataset, Dataset> impute_missing(const Dataset& train, const Dataset& test) {
  if (!train.has_missing() && !test.has_missing()) return {train, test};
  const std::size_t m = train.num_features();
  const auto& schema = train.schema();
  std::vector<double> fill(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& f = schema.features[j];
    if (f.is_nominal()) {
      std::vector<std::size_t> counts(f.values.size(), 0);
      for (std::size_t i = 0; i < train.num_rows(); ++i) {
        double v = train.value(i, j);
        if (!std::isnan(v)) ++counts[static_cast<std::size_t>(v)];
      }
      fill[j] = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    } else {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < train.num_rows(); ++i) {
        double v = train.value(i, j);
        if (!std::isnan(v)) {
          sum += v;
          ++n;
        }
      }
      fill[j] = n ? sum / static_cast<double>(n) : 0.0;
    }
  }
  auto apply = [&](const Dataset& d) {
    std::vector<double> values(d.values().begin(), d.values().end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i])) values[i] = fill[i % m];
    }
    return Dataset(d.id(), d.schema(), std::move(values),
                   std::vector<int>(d.labels().begin(), d.labels().end()));
  };
  return {apply(train), apply(test)};
}

std::pair<Dataset, Dataset> preprocess(const Dataset& train, const Dataset& test) {
  auto [tr, te] = impute_missing(train, test);
  auto norm = normalize_fit_apply(encode_nominal_to_binary(tr), encode_nominal_to_binary(te));
  return {std::move(norm.train), std::move(norm.test)};
}

std::vector<std::size_t> stratified_train_counts(std::span<const std::size_t> class_counts,
                                                 double train_fraction) {
  const std::size_t n = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
  const auto total = static_cast<std::size_t>(std::nearbyint(static_cast<double>(n) * train_fraction));
  std::vector<std::size_t> counts(class_counts.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    const double target = static_cast<double>(class_counts[c]) * train_fraction;
    counts[c] = static_cast<std::size_t>(std::floor(target));
    assigned += counts[c];
    remainders.emplace_back(target - std::floor(target), c);
  }
  // Largest remainder first, lower class index on ties.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    const std::size_t c = remainders[i].second;
    if (counts[c] < class_counts[c]) {
      ++counts[c];
      ++assigned;
    }
  }
  return counts;
}

SplitPair stratified_resample(const Dataset& d, int resample_id, std::uint64_t master_seed,
                              double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  const auto class_counts = d.class_counts();
  const auto train_counts = stratified_train_counts(class_counts, train_fraction);
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 0) continue;
    if (train_counts[c] == 0 || train_counts[c] == class_counts[c]) {
      throw DatasetError("class '" + d.schema().class_values[c] + "' has " +
                         (train_counts[c] == 0 ? "no training" : "no test") +
                         " instances after stratification");
    }
  }

  SplitPair out;
  out.resample_id = resample_id;
  out.seed = derive_seed(master_seed, d.id(), static_cast<std::uint64_t>(resample_id), "resample");
  Rng rng(out.seed);
  std::vector<std::vector<std::size_t>> by_class(class_counts.size());
  for (std::size_t i = 0; i < d.num_rows(); ++i) by_class[static_cast<std::size_t>(d.label(i))].push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    rng.shuffle(std::span<std::size_t>(rows));
    out.train_rows.insert(out.train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(train_counts[c]));
    out.test_rows.insert(out.test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(train_counts[c]), rows.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = d.subset(out.train_rows);
  out.test = d.subset(out.test_rows);
  return out;
}

std::vector<Fold> kfold_partition(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k-fold needs k >= 2");
  if (static_cast<std::size_t>(k) > d.num_rows()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the " +
                                std::to_string(d.num_rows()) + " available rows");
  }
  Rng rng(combine_seed(seed, "kfold"));
  std::vector<std::vector<std::size_t>> by_class(d.num_classes());
  for (std::size_t i = 0; i < d.num_rows(); ++i) by_class[static_cast<std::size_t>(d.label(i))].push_back(i);
  // Dealing the class-ordered list round robin stratifies every class and
  // keeps fold sizes within one of each other.
  std::vector<std::size_t> order;
  order.reserve(d.num_rows());
  for (auto& rows : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    order.insert(order.end(), rows.begin(), rows.end());
  }
  std::vector<int> fold_of(d.num_rows());
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    for (int f = 0; f < k; ++f) {
      auto& fold = folds[static_cast<std::size_t>(f)];
      (fold_of[i] == f ? fold.validation_rows : fold.train_rows).push_back(i);
    }
  }
  return folds;
}

}  // namespace bakeoff
