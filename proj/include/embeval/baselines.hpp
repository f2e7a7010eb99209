#pragma once

// Randomized analogy sets that carry, by construction, no pairing
// consistency: within-category end-word permutations, mismatched start/end
// categories (within or across broad types), and pairs with random start,
// end, or both words. Ten instances of each are the baseline against which
// offset-concentration readings are judged.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "embeval/bats.hpp"
#include "embeval/rng.hpp"

namespace embeval {

enum class BaselineKind {
  PermutedWithinCategory,
  MismatchedWithinType,
  MismatchedAcrossType,
  RandomStart,
  RandomEnd,
  RandomBoth,
};

inline constexpr BaselineKind kAllBaselineKinds[] = {
    BaselineKind::PermutedWithinCategory, BaselineKind::MismatchedWithinType,
    BaselineKind::MismatchedAcrossType,   BaselineKind::RandomStart,
    BaselineKind::RandomEnd,              BaselineKind::RandomBoth,
};

std::string_view to_string(BaselineKind kind);

struct BaselineInstance {
  BaselineKind kind;
  std::string source;                  // relation name, or "start->end" pair
  std::optional<BroadType> broad_type; // grouped by start category; none for RandomBoth
  int instance_index = 0;
  ResolvedRelation relation;
};

enum class RandomizeSide { Start, End, Both };

// End words permuted uniformly over the category (fixed points allowed).
BaselineInstance permute_within_category(const ResolvedRelation& resolved, Rng& rng,
                                         int instance_index);

// Starts from `source`'s start category, ends sampled without replacement
// from a different relation's end category; same broad type when
// `across_type` is false, different when true. Capped at min(50, available).
BaselineInstance mismatch_categories(const ResolvedRelation& source,
                                     const std::vector<const ResolvedRelation*>& pool,
                                     bool across_type, Rng& rng, int instance_index);

// The selected side(s) replaced by distinct uniform vocabulary words,
// excluding every word of the source relation.
BaselineInstance randomize(const ResolvedRelation& resolved, RandomizeSide side,
                           const EmbeddingTable& table, Rng& rng, int instance_index);

// n_instances of every kind for every applicable source relation, on seeds
// derived from (master_seed, relation name + kind, instance index). Kinds a
// source cannot support (e.g. no within-type partner) are skipped.
std::vector<BaselineInstance> baseline_suite(
    const std::vector<const ResolvedRelation*>& relations, const EmbeddingTable& table,
    int n_instances, std::uint64_t master_seed);

}  // namespace embeval
