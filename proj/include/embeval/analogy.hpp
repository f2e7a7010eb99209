#pragma once

// The arithmetic analogy test (3CosAdd): predict the nearest neighbour of
// b + a* - a under cosine similarity, in two modes. Normal mode excludes the
// input words a, a*, b from the candidate set; honest mode excludes nothing.
// Also the algebraic breakdowns of the analogy score and of the score's
// margin over sim(b + o_a, b), all terms sharing one normalization
// Z = ||b + o_a|| * ||b*||.

#include <optional>
#include <span>
#include <string>

#include "embeval/bats.hpp"
#include "embeval/embedding_table.hpp"

namespace embeval {

enum class TestMode { Normal, Honest };

struct ScoreDecomposition {
  double within_pair;    // b.b* / Z
  double offset_offset;  // o_a.o_b / Z
  double offset_start;   // o_a.b / Z
  double normalization;  // Z
  double total;          // cosine(b + o_a, b*), computed directly
};

struct DeltaDecomposition {
  double norm_term;      // (||b|| - ||b*||)/||b|| * (b + o_a).b / Z
  double offset_offset;  // o_a.o_b / Z
  double start_offset;   // b.o_b / Z
  double normalization;  // Z
  double delta_sim;      // cosine(b + o_a, b*) - cosine(b + o_a, b), direct
};

ScoreDecomposition decompose_score(std::span<const float> a,
                                   std::span<const float> a_star,
                                   std::span<const float> b,
                                   std::span<const float> b_star);
ScoreDecomposition decompose_score(const AnalogyQuad& quad);

DeltaDecomposition decompose_delta(std::span<const float> a,
                                   std::span<const float> a_star,
                                   std::span<const float> b,
                                   std::span<const float> b_star);
DeltaDecomposition decompose_delta(const AnalogyQuad& quad);

// decompose_score with b* := b + o_a, so the total is 1 by construction.
ScoreDecomposition decompose_self(std::span<const float> a,
                                  std::span<const float> a_star,
                                  std::span<const float> b);

// Argmax over the vocabulary of cosine(b + a* - a, row), with the mode's
// exclusion set removed. Ties break toward the lowest vocabulary index.
std::string predict(const EmbeddingTable& table, const AnalogyQuad& quad,
                    TestMode mode);

// Fraction of enumerated quads whose prediction equals the vocabulary form
// of b*. Requires at least 2 resolved pairs; otherwise absent.
std::optional<double> accuracy(const EmbeddingTable& table,
                               const ResolvedRelation& resolved, TestMode mode);

}  // namespace embeval
