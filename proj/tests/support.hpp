#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "bakeoff/dataset.hpp"

namespace testing_support {

inline bakeoff::Dataset numeric_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                        std::size_t num_classes = 2, std::string id = "toy") {
  bakeoff::DatasetSchema schema;
  const std::size_t m = rows.empty() ? 1 : rows.front().size();
  for (std::size_t j = 0; j < m; ++j) schema.features.push_back(bakeoff::FeatureSpec::numeric("f" + std::to_string(j)));
  for (std::size_t c = 0; c < num_classes; ++c) schema.class_values.push_back("c" + std::to_string(c));
  std::vector<double> values;
  for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
  return bakeoff::Dataset(std::move(id), std::move(schema), std::move(values), labels);
}

/// Gaussian blobs, one per class, centred at (c, c, ...) * separation.
inline bakeoff::Dataset blobs(std::size_t n, std::size_t m, std::size_t k, double separation, std::uint64_t seed,
                              std::string id = "blobs") {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % k);
    std::vector<double> r(m);
    for (std::size_t j = 0; j < m; ++j) r[j] = separation * c * ((j % 2) ? 1.0 : -1.0) + noise(gen);
    rows.push_back(r);
    labels.push_back(c);
  }
  return numeric_dataset(rows, labels, k, std::move(id));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bakeoff_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::filesystem::path write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

inline std::filesystem::path data_dir() { return BAKEOFF_DATA_DIR; }

}  // namespace testing_support
