#pragma once

// Full-evaluation orchestration: load embeddings (or generate synthetic
// ones), resolve an analogy dataset, compute the selected metrics per
// relation, aggregate by broad type, attach baseline and histogram sections,
// and serialize. Reports are deterministic given the config and seed; wall
// time lives in a separate "timing" field so byte comparison can exclude it.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "embeval/analogy.hpp"
#include "embeval/bats.hpp"
#include "embeval/embedding_table.hpp"
#include "embeval/offsets.hpp"
#include "embeval/synth.hpp"

namespace embeval {

inline constexpr const char* kToolVersion = "0.1.0";

// Selectable metrics, exactly as spelled on the command line.
const std::set<std::string>& known_metrics();

struct EmbeddingSpecCfg {
  std::string path;
  std::string format = "auto";  // binary | text | auto (by extension)
  bool normalize = true;
  std::optional<std::size_t> limit;
};

struct RunConfig {
  std::vector<EmbeddingSpecCfg> embeddings;
  std::string bats_root;                  // required when embeddings are given
  std::vector<std::string> synth_specs;   // paths to synthetic spec JSON files
  std::set<std::string> metrics = {"ocs", "pcs"};
  int n_shuffles = 50;
  int baseline_instances = 10;
  int max_rejection_tries = 1000;
  LookupPolicy lookup;
  std::uint64_t seed = 0;
  std::string out_path;                   // empty = stdout
  std::string out_format = "json";        // json | csv
};

// Throws std::invalid_argument on an unusable config.
void validate(const RunConfig& config);

struct MetricsReport {
  nlohmann::ordered_json doc;
};

MetricsReport run(const RunConfig& config);

std::string emit_json(const MetricsReport& report);
std::string emit_csv(const MetricsReport& report);
MetricsReport parse_json(const std::string& bytes);

// True when every section loaded and evaluated without an error record.
bool fully_successful(const MetricsReport& report);

// Per-relation mean decomposition terms over all enumerated quads.
struct DecompositionRow {
  std::string name;
  bool eligible = false;
  std::string reason;
  std::size_t quads = 0;
  ScoreDecomposition score_mean{};
  DeltaDecomposition delta_mean{};
  ScoreDecomposition self_mean{};
};

// normalize_rows replaces each vector by its unit form before decomposing,
// independently of how the table was loaded.
std::vector<DecompositionRow> decomposition_table(
    const std::vector<const ResolvedRelation*>& relations, bool normalize_rows = false);

SynthSpec load_synth_spec(const std::string& path, std::uint64_t default_seed);

}  // namespace embeval
