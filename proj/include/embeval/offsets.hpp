#pragma once

// Offset geometry of a relation: unit-normalized difference vectors, their
// pairwise similarities, the offset concentration score (mean pairwise
// similarity), shuffled-pairing baselines, rank-based ROC AUC, and the
// pairing consistency score (mean AUC of true vs. shuffled similarities over
// many shuffles). Also the mean offset direction and its mean similarity to
// the offsets (MSM), which satisfies
//   MSM = sqrt(1/N + (N-1)/N * OCS).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "embeval/bats.hpp"
#include "embeval/linalg.hpp"
#include "embeval/rng.hpp"

namespace embeval {

enum class OffsetKind { True, Shuffled, Baseline };

struct OffsetSet {
  std::vector<linalg::Vec> offsets;  // unit vectors
  std::vector<WordPair> sources;
  OffsetKind kind = OffsetKind::True;
  std::size_t dropped_degenerate = 0;   // shuffled pair collapsed to one point
  bool constraint_downgraded = false;   // shuffle fell back to fixed-point-free

  std::size_t size() const { return offsets.size(); }
};

struct SimilaritySample {
  std::vector<double> values;  // all pairwise o_i . o_j, i < j
  std::size_t count() const { return values.size(); }
};

struct PcsConfig {
  int n_shuffles = 50;
  std::uint64_t seed = 0;
  int max_rejection_tries = 1000;
};

// One unit offset per resolved pair, order preserved. The relation must be
// usable (>= 3 pairs; degenerate pairs were dropped at resolution).
OffsetSet build_offsets(const ResolvedRelation& resolved);

// All N(N-1)/2 unordered similarities; requires N >= 2.
SimilaritySample pairwise_sims(const OffsetSet& offsets);

// Mean pairwise similarity; requires N >= 3.
double ocs(const OffsetSet& offsets);

// unit(sum of offsets); throws if the offsets cancel exactly.
linalg::Vec mean_direction(const OffsetSet& offsets);

// ||mean offset||; equals the mean similarity of the offsets to their mean
// direction.
double msm(const OffsetSet& offsets);

// Permutation of [0, n) with permuted[i] != i for all i, by rejection.
std::vector<std::size_t> sample_derangement(Rng& rng, std::size_t n, int max_tries);

// Offsets unit(end[perm(i)] - start[i]) for a uniformly sampled permutation
// avoiding true pairs at the end-word string level. If no such permutation is
// found within cfg.max_rejection_tries, falls back to the fixed-point-free
// constraint and flags the downgrade. Pairs whose shuffled words bind to one
// vector are dropped and counted.
OffsetSet shuffle_offsets(const ResolvedRelation& resolved, Rng& rng,
                          const PcsConfig& cfg);

// Rank-based AUC: (#{t > s} + 0.5 #{t == s}) / (|true| * |shuffled|).
double auc(const SimilaritySample& true_sims, const SimilaritySample& shuffled_sims);

// Mean AUC of the true similarities against cfg.n_shuffles shuffled sets,
// each on the substream derived from (cfg.seed, relation name, shuffle index).
double pcs(const ResolvedRelation& resolved, const PcsConfig& cfg);

}  // namespace embeval
