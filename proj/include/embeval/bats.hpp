#pragma once

// BATS-layout analogy dataset: forty relations of (start, end) word pairs in
// four broad types, laid out as
//   <root>/<digit>_<TypeName>/<code> [<name>].txt
// with one tab-separated pair per line and slash-separated alternative
// answers (only the first is kept). Relations resolve against an embedding
// vocabulary into vector-bound pairs, from which analogy quadruples are
// enumerated.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "embeval/embedding_table.hpp"

namespace embeval {

enum class BroadType { Inflectional, Derivational, Encyclopedic, Lexicographic };

std::string_view to_string(BroadType type);
std::optional<BroadType> broad_type_from_directory(std::string_view dir_name);

struct WordPair {
  std::string start;
  std::string end;
  bool operator==(const WordPair&) const = default;
};

struct Relation {
  std::string name;
  std::optional<BroadType> broad_type;  // nullopt for synthetic relations
  std::vector<WordPair> pairs;
  bool operator==(const Relation&) const = default;
};

struct ResolvedPair {
  std::string start;  // vocabulary form actually bound
  std::string end;
  std::size_t start_row;
  std::size_t end_row;
};

// Metric eligibility needs at least this many resolved pairs.
inline constexpr std::size_t kMinUsablePairs = 3;

struct ResolvedRelation {
  std::string name;
  std::optional<BroadType> broad_type;
  const EmbeddingTable* table = nullptr;
  std::vector<ResolvedPair> pairs;
  std::size_t dropped_oov = 0;         // a word was out of vocabulary
  std::size_t dropped_degenerate = 0;  // both words bound to one vector

  std::size_t size() const { return pairs.size(); }
  bool usable() const { return pairs.size() >= kMinUsablePairs; }
  std::span<const float> start_vec(std::size_t i) const {
    return table->row(pairs[i].start_row);
  }
  std::span<const float> end_vec(std::size_t i) const {
    return table->row(pairs[i].end_row);
  }
};

// Two distinct pairs (a, a*) and (b, b*) drawn from one resolved relation.
struct AnalogyQuad {
  const ResolvedRelation* relation;
  std::size_t first;   // supplies (a, a*)
  std::size_t second;  // supplies (b, b*)

  const std::string& a() const { return relation->pairs[first].start; }
  const std::string& a_star() const { return relation->pairs[first].end; }
  const std::string& b() const { return relation->pairs[second].start; }
  const std::string& b_star() const { return relation->pairs[second].end; }
  std::span<const float> va() const { return relation->start_vec(first); }
  std::span<const float> va_star() const { return relation->end_vec(first); }
  std::span<const float> vb() const { return relation->start_vec(second); }
  std::span<const float> vb_star() const { return relation->end_vec(second); }
  std::size_t a_row() const { return relation->pairs[first].start_row; }
  std::size_t a_star_row() const { return relation->pairs[first].end_row; }
  std::size_t b_row() const { return relation->pairs[second].start_row; }
  std::size_t b_star_row() const { return relation->pairs[second].end_row; }
};

// Name and broad type come from the file path; multi-answer ends keep the
// first slash segment; duplicate start words keep the first occurrence.
Relation parse_relation_file(const std::filesystem::path& path);

// All relations under a BATS root, in path-sorted order.
std::vector<Relation> load_dataset(const std::filesystem::path& root);

// Keeps pairs with both words in vocabulary and distinct bound vectors.
ResolvedRelation resolve(const Relation& relation, const EmbeddingTable& table,
                         const LookupPolicy& policy = {});

// All N*(N-1) ordered pairs of distinct resolved pairs.
std::vector<AnalogyQuad> enumerate_quads(const ResolvedRelation& resolved);

}  // namespace embeval
