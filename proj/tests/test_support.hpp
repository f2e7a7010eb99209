#pragma once

// Shared fixtures and independent oracles for the test suites. Oracle
// implementations here are deliberately plain loops so they cannot share a
// bug with the library kernels they check.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "embeval/bats.hpp"
#include "embeval/embedding_table.hpp"

namespace test_support {

// ---- independent numeric oracles ------------------------------------------

inline double oracle_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double oracle_norm(const std::vector<double>& a) {
  return std::sqrt(oracle_dot(a, a));
}

inline double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return oracle_dot(a, b) / (oracle_norm(a) * oracle_norm(b));
}

inline std::vector<double> widen(std::span<const float> x) {
  return std::vector<double>(x.begin(), x.end());
}

// Brute-force rank AUC by explicit pair counting.
inline double oracle_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0;
  for (double t : pos) {
    for (double s : neg) {
      if (t > s) wins += 1.0;
      else if (t == s) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// ---- table / relation fixtures ---------------------------------------------

using Entry = std::pair<std::string, std::vector<float>>;

inline embeval::EmbeddingTable make_table(const std::vector<Entry>& entries,
                                          bool normalize = false) {
  embeval::EmbeddingTable table(entries.front().second.size(), normalize);
  for (const auto& [word, row] : entries) table.push_row(word, row);
  return table;
}

inline embeval::ResolvedRelation make_resolved(
    const embeval::EmbeddingTable& table,
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const std::string& name = "fixture") {
  embeval::Relation rel;
  rel.name = name;
  for (const auto& [s, e] : pairs) rel.pairs.push_back({s, e});
  return embeval::resolve(rel, table);
}

// ---- randomness for property tests -----------------------------------------

inline std::vector<float> random_f32(std::mt19937& gen, std::size_t dim,
                                     float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(dim);
  for (auto& x : v) x = dist(gen);
  return v;
}

inline std::vector<float> random_unit_f32(std::mt19937& gen, std::size_t dim) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(dim);
  double n2 = 0;
  do {
    n2 = 0;
    for (auto& x : v) {
      x = dist(gen);
      n2 += x * x;
    }
  } while (n2 < 1e-12);
  std::vector<float> out(dim);
  const double inv = 1.0 / std::sqrt(n2);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] * inv);
  return out;
}

// ---- scratch directories ----------------------------------------------------

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("embeval_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

}  // namespace test_support
