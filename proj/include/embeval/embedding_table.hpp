#pragma once

// Vocabulary-indexed dense matrix of word vectors, plus loaders for the two
// dominant on-disk formats:
//
//   binary (word2vec-style): ASCII header "<count> <dim>\n", then per entry
//     the word bytes terminated by a single 0x20, followed by dim
//     little-endian float32 values; a trailing 0x0A after the floats is
//     tolerated.
//   text (GloVe-style): optional "<count> <dim>" header line, then one word
//     plus dim decimal reals per line, single-space separated, UTF-8 words.
//
// Duplicate vocabulary entries keep the first occurrence and are counted.
// Rows are optionally unit-normalized at load; storage stays float32.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embeval/linalg.hpp"

namespace embeval {

struct LookupPolicy {
  bool case_fallback = false;  // retry with ASCII-lowercased word
};

class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, bool normalized);

  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  bool normalized() const { return normalized_; }

  const std::string& word(std::size_t row) const { return words_[row]; }
  std::span<const float> row(std::size_t row) const {
    return {data_.data() + row * dim_, dim_};
  }
  double row_norm(std::size_t row) const { return norms_[row]; }
  std::span<const float> data() const { return data_; }
  std::span<const double> row_norms() const { return norms_; }

  // Row index of `word` under `policy`; absence is a value, not an error.
  std::optional<std::size_t> find(std::string_view word,
                                  const LookupPolicy& policy = {}) const;
  std::optional<std::span<const float>> lookup(std::string_view word,
                                               const LookupPolicy& policy = {}) const;

  // Appends a row. Returns false (and counts) for duplicate words and for
  // zero-norm rows when normalization is requested. Throws on dimension
  // mismatch or non-finite values.
  bool push_row(std::string word, std::span<const float> values);

  std::size_t duplicates_dropped() const { return duplicates_dropped_; }
  std::size_t zero_rows_dropped() const { return zero_rows_dropped_; }

  void reserve(std::size_t rows);

 private:
  std::size_t dim_;
  bool normalized_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;    // size() * dim_, row-major
  std::vector<double> norms_;  // per-row Euclidean norm of stored floats
  std::size_t duplicates_dropped_ = 0;
  std::size_t zero_rows_dropped_ = 0;
};

EmbeddingTable load_binary(const std::string& path,
                           std::optional<std::size_t> limit, bool normalize);
EmbeddingTable load_text(const std::string& path,
                         std::optional<std::size_t> limit, bool normalize);

void save_binary(const EmbeddingTable& table, const std::string& path);
// Values are written with 6 decimal places; round-trip error stays <= 1e-5.
void save_text(const EmbeddingTable& table, const std::string& path,
               bool with_header = true);

std::vector<double> batch_cosine(std::span<const double> query,
                                 const EmbeddingTable& table);
std::vector<double> batch_cosine(std::span<const float> query,
                                 const EmbeddingTable& table);

std::string ascii_lower(std::string_view word);

}  // namespace embeval
