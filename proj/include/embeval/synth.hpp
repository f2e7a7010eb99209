#pragma once

// Synthetic embedding tables with analytically known regularity structure:
//
//   ParallelOffset  end_i = start_i + scale * v + noise, one shared direction
//                   v, starts uniform on the unit sphere. The parallel limit:
//                   concentration and consistency both high.
//   Clustered       starts around one center, ends around the opposite
//                   center, index pairing carries no information. Offsets
//                   concentrate (they all cross between the clusters) while
//                   pairing consistency stays at chance.
//   Random          all words uniform on the unit sphere: no concentration,
//                   chance-level consistency.
//
// Extra distractor words give analogy argmax scans nontrivial candidates.

#include <cstdint>
#include <string>

#include "embeval/bats.hpp"
#include "embeval/embedding_table.hpp"

namespace embeval {

enum class SynthModel { ParallelOffset, Clustered, Random };

std::string_view to_string(SynthModel model);
SynthModel synth_model_from_string(std::string_view name);

struct SynthSpec {
  SynthModel model = SynthModel::ParallelOffset;
  int n_pairs = 50;
  int dim = 50;
  double scale = 1.0;       // ParallelOffset: offset length
  double noise = 0.0;       // ParallelOffset: Gaussian sigma per component
  double spread = 1.0;      // Clustered: within-cluster sigma per component
  double separation = 4.0;  // Clustered: cluster center radius
  int distractors = -1;     // -1 = 10 * n_pairs
  std::uint64_t seed = 0;
};

struct SynthResult {
  EmbeddingTable table;
  Relation relation;
  std::size_t resampled = 0;  // pairs regenerated after collapsing
};

SynthResult generate(const SynthSpec& spec);

}  // namespace embeval
