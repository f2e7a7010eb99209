#include "embeval/embedding_table.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace embeval {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

float le_bytes_to_float(const unsigned char* p) {
  std::uint32_t u;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&u, p, 4);
  } else {
    u = (std::uint32_t(p[3]) << 24) | (std::uint32_t(p[2]) << 16) |
        (std::uint32_t(p[1]) << 8) | std::uint32_t(p[0]);
  }
  return std::bit_cast<float>(u);
}

void float_to_le_bytes(float f, unsigned char* p) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(f);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(p, &u, 4);
  } else {
    p[0] = u & 0xff;
    p[1] = (u >> 8) & 0xff;
    p[2] = (u >> 16) & 0xff;
    p[3] = (u >> 24) & 0xff;
  }
}

bool parse_size(std::string_view tok, std::size_t& out) {
  if (tok.empty()) return false;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

}  // namespace

std::string ascii_lower(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

EmbeddingTable::EmbeddingTable(std::size_t dim, bool normalized)
    : dim_(dim), normalized_(normalized) {
  if (dim_ < 1) throw std::invalid_argument("embedding dimension must be >= 1");
}

void EmbeddingTable::reserve(std::size_t rows) {
  words_.reserve(rows);
  data_.reserve(rows * dim_);
  norms_.reserve(rows);
  index_.reserve(rows);
}

bool EmbeddingTable::push_row(std::string word, std::span<const float> values) {
  linalg::check_same_dim(values.size(), dim_);
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite value in row for word \"" + word + "\"");
    }
  }
  if (index_.contains(word)) {
    ++duplicates_dropped_;
    return false;
  }
  double n = linalg::norm(values);
  const std::size_t at = data_.size();
  data_.insert(data_.end(), values.begin(), values.end());
  if (normalized_) {
    if (n == 0.0) {
      data_.resize(at);
      ++zero_rows_dropped_;
      return false;
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      data_[at + i] = static_cast<float>(data_[at + i] / n);
    }
    n = linalg::norm(std::span<const float>(data_.data() + at, dim_));
  }
  norms_.push_back(n);
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  return true;
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word,
                                                const LookupPolicy& policy) const {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  if (policy.case_fallback) {
    it = index_.find(ascii_lower(word));
    if (it != index_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<std::span<const float>> EmbeddingTable::lookup(
    std::string_view word, const LookupPolicy& policy) const {
  auto idx = find(word, policy);
  if (!idx) return std::nullopt;
  return row(*idx);
}

EmbeddingTable load_binary(const std::string& path,
                           std::optional<std::size_t> limit, bool normalize) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail(path, "cannot open file");

  std::string header;
  if (!std::getline(in, header) || header.empty()) {
    parse_fail(path, "empty or headerless file");
  }
  std::istringstream hs(header);
  std::string count_tok, dim_tok, extra;
  hs >> count_tok >> dim_tok;
  std::size_t declared = 0, dim = 0;
  if (!parse_size(count_tok, declared) || !parse_size(dim_tok, dim) ||
      dim == 0 || (hs >> extra)) {
    parse_fail(path, "malformed header \"" + header + "\"");
  }
  std::size_t offset = header.size() + 1;

  const std::size_t want = limit ? std::min(*limit, declared) : declared;
  EmbeddingTable table(dim, normalize);
  table.reserve(want);

  std::vector<unsigned char> payload(dim * 4);
  std::vector<float> row(dim);
  for (std::size_t entry = 0; entry < want; ++entry) {
    std::string word;
    int c;
    while ((c = in.get()) != EOF && c == 0x0A) ++offset;  // tolerated after floats
    if (c == EOF) {
      parse_fail(path, "truncated file: expected entry " + std::to_string(entry) +
                           " at byte offset " + std::to_string(offset));
    }
    while (c != 0x20) {
      word.push_back(static_cast<char>(c));
      ++offset;
      c = in.get();
      if (c == EOF) {
        parse_fail(path, "truncated file inside word at byte offset " +
                             std::to_string(offset));
      }
      if (word.size() > 4096) {
        parse_fail(path, "unterminated word at byte offset " + std::to_string(offset));
      }
    }
    ++offset;  // the 0x20 separator
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
      parse_fail(path, "truncated vector for word \"" + word +
                           "\" at byte offset " + std::to_string(offset));
    }
    for (std::size_t i = 0; i < dim; ++i) {
      row[i] = le_bytes_to_float(payload.data() + i * 4);
      if (!std::isfinite(row[i])) {
        parse_fail(path, "non-finite value for word \"" + word +
                             "\" at byte offset " + std::to_string(offset + i * 4));
      }
    }
    offset += payload.size();
    table.push_row(std::move(word), row);
  }
  return table;
}

EmbeddingTable load_text(const std::string& path,
                         std::optional<std::size_t> limit, bool normalize) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");

  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared;
  std::size_t dim = 0;
  std::vector<EmbeddingTable> holder;  // constructed once dim is known

  auto split_ws = [](const std::string& s) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
      if (j > i) toks.push_back(std::string_view(s).substr(i, j - i));
      i = j;
    }
    return toks;
  };

  std::vector<float> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_ws(line);
    if (line_no == 1) {
      std::size_t a, b;
      if (toks.size() == 2 && parse_size(toks[0], a) && parse_size(toks[1], b) &&
          b > 0) {
        declared = a;
        dim = b;
        continue;
      }
    }
    if (toks.empty()) {
      parse_fail(path, "line " + std::to_string(line_no) + ": empty line");
    }
    if (toks.size() < 2) {
      parse_fail(path, "line " + std::to_string(line_no) + ": no vector values");
    }
    if (dim == 0) {
      dim = toks.size() - 1;
    } else if (toks.size() - 1 != dim) {
      parse_fail(path, "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(dim) + " values, got " +
                           std::to_string(toks.size() - 1));
    }
    if (holder.empty()) {
      holder.emplace_back(dim, normalize);
      if (declared) holder.front().reserve(limit ? std::min(*limit, *declared) : *declared);
    }
    row.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const std::string tok(toks[i + 1]);
      char* end = nullptr;
      const float v = std::strtof(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
        parse_fail(path, "line " + std::to_string(line_no) +
                             ": bad value \"" + tok + "\"");
      }
      row[i] = v;
    }
    holder.front().push_row(std::string(toks[0]), row);
    const std::size_t consumed = holder.front().size() +
                                 holder.front().duplicates_dropped() +
                                 holder.front().zero_rows_dropped();
    if (limit && consumed >= *limit) return std::move(holder.front());
    if (declared && consumed >= *declared) return std::move(holder.front());
  }
  if (holder.empty()) {
    parse_fail(path, declared ? "header present but no vector lines" : "empty file");
  }
  if (declared && !limit) {
    const std::size_t seen = holder.front().size() +
                             holder.front().duplicates_dropped() +
                             holder.front().zero_rows_dropped();
    if (seen < *declared) {
      parse_fail(path, "truncated file: header declares " + std::to_string(*declared) +
                           " entries, found " + std::to_string(seen));
    }
  }
  return std::move(holder.front());
}

void save_binary(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) parse_fail(path, "cannot open file for writing");
  out << table.size() << ' ' << table.dim() << '\n';
  std::vector<unsigned char> payload(table.dim() * 4);
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.word(r) << ' ';
    auto row = table.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      float_to_le_bytes(row[i], payload.data() + i * 4);
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    out.put('\n');
  }
  if (!out) parse_fail(path, "write failed");
}

void save_text(const EmbeddingTable& table, const std::string& path,
               bool with_header) {
  std::ofstream out(path);
  if (!out) parse_fail(path, "cannot open file for writing");
  if (with_header) out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.word(r);
    for (float v : table.row(r)) {
      std::snprintf(buf, sizeof(buf), " %.6f", static_cast<double>(v));
      out << buf;
    }
    out << '\n';
  }
  if (!out) parse_fail(path, "write failed");
}

std::vector<double> batch_cosine(std::span<const double> query,
                                 const EmbeddingTable& table) {
  return linalg::batch_cosine(query, table.data(), table.size(), table.dim(),
                              table.row_norms());
}

std::vector<double> batch_cosine(std::span<const float> query,
                                 const EmbeddingTable& table) {
  return linalg::batch_cosine(query, table.data(), table.size(), table.dim(),
                              table.row_norms());
}

}  // namespace embeval
