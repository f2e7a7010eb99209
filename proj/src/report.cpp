#include "embeval/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "embeval/baselines.hpp"

namespace embeval {

using nlohmann::ordered_json;

const std::set<std::string>& known_metrics() {
  static const std::set<std::string> metrics = {
      "accuracy-honest", "accuracy-normal", "baselines", "decompositions",
      "hist",            "msm",             "ocs",       "pcs"};
  return metrics;
}

void validate(const RunConfig& config) {
  if (config.metrics.empty()) {
    throw std::invalid_argument("config: at least one metric must be selected");
  }
  for (const auto& m : config.metrics) {
    if (!known_metrics().contains(m)) {
      std::string valid;
      for (const auto& k : known_metrics()) valid += " " + k;
      throw std::invalid_argument("config: unknown metric \"" + m + "\"; known:" + valid);
    }
  }
  if (config.embeddings.empty() && config.synth_specs.empty()) {
    throw std::invalid_argument("config: no embeddings or synthetic specs given");
  }
  if (!config.embeddings.empty() && config.bats_root.empty()) {
    throw std::invalid_argument("config: embeddings need a dataset root (--bats)");
  }
  for (const auto& e : config.embeddings) {
    if (e.format != "auto" && e.format != "binary" && e.format != "text") {
      throw std::invalid_argument("config: format must be binary or text, got \"" +
                                  e.format + "\"");
    }
  }
  if (config.n_shuffles < 1) throw std::invalid_argument("config: shuffles must be >= 1");
  if (config.baseline_instances < 1) {
    throw std::invalid_argument("config: baseline instances must be >= 1");
  }
  if (config.max_rejection_tries < 1) {
    throw std::invalid_argument("config: rejection tries must be >= 1");
  }
  if (config.out_format != "json" && config.out_format != "csv") {
    throw std::invalid_argument("config: output format must be json or csv, got \"" +
                                config.out_format + "\"");
  }
}

namespace {

std::vector<float> unit_f32(std::span<const float> x) {
  const linalg::Vec u = linalg::unit(x);
  std::vector<float> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = static_cast<float>(u[i]);
  return out;
}

ordered_json score_json(const ScoreDecomposition& d) {
  return ordered_json{{"within_pair", d.within_pair},
                      {"offset_offset", d.offset_offset},
                      {"offset_start", d.offset_start},
                      {"total", d.total}};
}

ordered_json delta_json(const DeltaDecomposition& d) {
  return ordered_json{{"norm_term", d.norm_term},
                      {"offset_offset", d.offset_offset},
                      {"start_offset", d.start_offset},
                      {"delta_sim", d.delta_sim}};
}

ordered_json type_json(const std::optional<BroadType>& type) {
  if (!type) return nullptr;
  return std::string(to_string(*type));
}

}  // namespace

std::vector<DecompositionRow> decomposition_table(
    const std::vector<const ResolvedRelation*>& relations, bool normalize_rows) {
  std::vector<DecompositionRow> rows;
  rows.reserve(relations.size());
  for (const ResolvedRelation* rel : relations) {
    DecompositionRow row;
    row.name = rel->name;
    if (!rel->usable()) {
      row.eligible = false;
      row.reason = "needs >= " + std::to_string(kMinUsablePairs) +
                   " resolved pairs, has " + std::to_string(rel->size());
      rows.push_back(std::move(row));
      continue;
    }
    row.eligible = true;
    const auto quads = enumerate_quads(*rel);
    row.quads = quads.size();
    ScoreDecomposition score_sum{};
    DeltaDecomposition delta_sum{};
    ScoreDecomposition self_sum{};
    for (const AnalogyQuad& q : quads) {
      ScoreDecomposition s;
      DeltaDecomposition d;
      ScoreDecomposition f;
      if (normalize_rows) {
        const auto a = unit_f32(q.va());
        const auto a_star = unit_f32(q.va_star());
        const auto b = unit_f32(q.vb());
        const auto b_star = unit_f32(q.vb_star());
        s = decompose_score(a, a_star, b, b_star);
        d = decompose_delta(a, a_star, b, b_star);
        f = decompose_self(a, a_star, b);
      } else {
        s = decompose_score(q);
        d = decompose_delta(q);
        f = decompose_self(q.va(), q.va_star(), q.vb());
      }
      score_sum.within_pair += s.within_pair;
      score_sum.offset_offset += s.offset_offset;
      score_sum.offset_start += s.offset_start;
      score_sum.normalization += s.normalization;
      score_sum.total += s.total;
      delta_sum.norm_term += d.norm_term;
      delta_sum.offset_offset += d.offset_offset;
      delta_sum.start_offset += d.start_offset;
      delta_sum.normalization += d.normalization;
      delta_sum.delta_sim += d.delta_sim;
      self_sum.within_pair += f.within_pair;
      self_sum.offset_offset += f.offset_offset;
      self_sum.offset_start += f.offset_start;
      self_sum.normalization += f.normalization;
      self_sum.total += f.total;
    }
    const double n = static_cast<double>(quads.size());
    row.score_mean = {score_sum.within_pair / n, score_sum.offset_offset / n,
                      score_sum.offset_start / n, score_sum.normalization / n,
                      score_sum.total / n};
    row.delta_mean = {delta_sum.norm_term / n, delta_sum.offset_offset / n,
                      delta_sum.start_offset / n, delta_sum.normalization / n,
                      delta_sum.delta_sim / n};
    row.self_mean = {self_sum.within_pair / n, self_sum.offset_offset / n,
                     self_sum.offset_start / n, self_sum.normalization / n,
                     self_sum.total / n};
    rows.push_back(std::move(row));
  }
  return rows;
}

SynthSpec load_synth_spec(const std::string& path, std::uint64_t default_seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("model")) {
    throw std::runtime_error(path + ": synthetic spec must be an object with a \"model\" key");
  }
  static const std::set<std::string> keys = {"model",  "n_pairs", "dim",
                                             "scale",  "noise",   "spread",
                                             "separation", "distractors", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!keys.contains(key)) {
      throw std::runtime_error(path + ": unknown key \"" + key + "\" in synthetic spec");
    }
  }
  SynthSpec spec;
  spec.model = synth_model_from_string(j.at("model").get<std::string>());
  spec.n_pairs = j.value("n_pairs", spec.n_pairs);
  spec.dim = j.value("dim", spec.dim);
  spec.scale = j.value("scale", spec.scale);
  spec.noise = j.value("noise", spec.noise);
  spec.spread = j.value("spread", spec.spread);
  spec.separation = j.value("separation", spec.separation);
  spec.distractors = j.value("distractors", spec.distractors);
  spec.seed = j.value("seed", default_seed);
  return spec;
}

namespace {

constexpr double kHistBinWidth = 0.02;
constexpr int kHistBins = 100;  // [-1, 1]

int hist_bin(double v) {
  int bin = static_cast<int>(std::floor((v + 1.0) / kHistBinWidth));
  return std::clamp(bin, 0, kHistBins - 1);
}

struct TypeOrder {
  bool operator()(const std::optional<BroadType>& a,
                  const std::optional<BroadType>& b) const {
    const int ia = a ? static_cast<int>(*a) : 4;
    const int ib = b ? static_cast<int>(*b) : 4;
    return ia < ib;
  }
};

ordered_json histograms_json(const std::vector<const ResolvedRelation*>& usable) {
  std::map<std::optional<BroadType>, std::vector<std::uint64_t>, TypeOrder> sims_bins;
  std::map<std::optional<BroadType>, std::vector<std::uint64_t>, TypeOrder> dir_bins;
  std::size_t degenerate_directions = 0;
  for (const ResolvedRelation* rel : usable) {
    const OffsetSet offsets = build_offsets(*rel);
    auto& sb = sims_bins.try_emplace(rel->broad_type,
                                     std::vector<std::uint64_t>(kHistBins, 0))
                   .first->second;
    for (double v : pairwise_sims(offsets).values) ++sb[hist_bin(v)];
    try {
      const linalg::Vec d = mean_direction(offsets);
      auto& db = dir_bins.try_emplace(rel->broad_type,
                                      std::vector<std::uint64_t>(kHistBins, 0))
                     .first->second;
      for (const linalg::Vec& o : offsets.offsets) {
        ++db[hist_bin(linalg::clamp_cosine(
            linalg::dot(std::span<const double>(o), std::span<const double>(d))))];
      }
    } catch (const std::invalid_argument&) {
      ++degenerate_directions;  // offsets cancelled exactly; no direction to bin
    }
  }
  ordered_json out = ordered_json::array();
  auto emit_family = [&](const char* family, const auto& groups) {
    for (const auto& [type, counts] : groups) {
      ordered_json row;
      row["family"] = family;
      row["broad_type"] = type_json(type);
      row["bin_width"] = kHistBinWidth;
      row["lo"] = -1.0;
      row["counts"] = counts;
      out.push_back(std::move(row));
    }
  };
  emit_family("offset-similarity", sims_bins);
  emit_family("similarity-to-mean-direction", dir_bins);
  if (degenerate_directions > 0) {
    ordered_json note;
    note["family"] = "similarity-to-mean-direction";
    note["relations_skipped"] = degenerate_directions;
    out.push_back(std::move(note));
  }
  return out;
}

struct Stats {
  double sum = 0, min = 0, max = 0;
  std::size_t n = 0;
  void add(double v) {
    if (n == 0) {
      min = max = v;
    } else {
      min = std::min(min, v);
      max = std::max(max, v);
    }
    sum += v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
};

ordered_json baselines_json(const std::vector<const ResolvedRelation*>& resolved,
                            const EmbeddingTable& table, const RunConfig& cfg,
                            const PcsConfig& pcs_cfg) {
  const auto suite =
      baseline_suite(resolved, table, cfg.baseline_instances, cfg.seed);

  struct GroupKey {
    BaselineKind kind;
    std::optional<BroadType> type;
    bool operator<(const GroupKey& o) const {
      if (kind != o.kind) return kind < o.kind;
      return TypeOrder{}(type, o.type);
    }
  };
  struct Group {
    std::map<std::string, Stats> per_source_ocs;
    std::map<std::string, Stats> per_source_pcs;
    Stats ocs_all, pcs_all;
    std::size_t skipped = 0;
  };
  std::map<GroupKey, Group> groups;

  for (const BaselineInstance& inst : suite) {
    Group& g = groups[{inst.kind, inst.broad_type}];
    if (!inst.relation.usable()) {
      ++g.skipped;
      continue;
    }
    const double o = ocs(build_offsets(inst.relation));
    const double p = pcs(inst.relation, pcs_cfg);
    g.per_source_ocs[inst.source].add(o);
    g.per_source_pcs[inst.source].add(p);
    g.ocs_all.add(o);
    g.pcs_all.add(p);
  }

  ordered_json out = ordered_json::array();
  for (const auto& [key, g] : groups) {
    // Table-style aggregation: mean over instances per source, then mean
    // across sources.
    double ocs_mean = 0, pcs_mean = 0;
    for (const auto& [_, s] : g.per_source_ocs) ocs_mean += s.mean();
    for (const auto& [_, s] : g.per_source_pcs) pcs_mean += s.mean();
    const double n_src = static_cast<double>(g.per_source_ocs.size());
    ordered_json row;
    row["kind"] = std::string(to_string(key.kind));
    row["broad_type"] = type_json(key.type);
    row["relations"] = g.per_source_ocs.size();
    row["instances"] = g.ocs_all.n;
    if (g.skipped > 0) row["instances_skipped"] = g.skipped;
    row["ocs"] = ordered_json{
        {"mean", ocs_mean / n_src}, {"min", g.ocs_all.min}, {"max", g.ocs_all.max}};
    row["pcs"] = ordered_json{
        {"mean", pcs_mean / n_src}, {"min", g.pcs_all.min}, {"max", g.pcs_all.max}};
    out.push_back(std::move(row));
  }
  return out;
}

// Everything below the per-table header fields of one report section.
void evaluate_section(ordered_json& section, const EmbeddingTable& table,
                      const std::vector<Relation>& dataset, const RunConfig& cfg) {
  section["vocab"] = table.size();
  section["dim"] = table.dim();
  section["normalized"] = table.normalized();
  section["duplicates_dropped"] = table.duplicates_dropped();
  section["zero_rows_dropped"] = table.zero_rows_dropped();

  const PcsConfig pcs_cfg{cfg.n_shuffles, cfg.seed, cfg.max_rejection_tries};

  std::vector<ResolvedRelation> resolved;
  resolved.reserve(dataset.size());
  for (const Relation& rel : dataset) resolved.push_back(resolve(rel, table, cfg.lookup));

  std::size_t with_two_pairs = 0;
  for (const auto& r : resolved) {
    if (r.size() >= 2) ++with_two_pairs;
  }
  if (with_two_pairs == 0) {
    throw std::runtime_error("no usable relations after vocabulary resolution");
  }

  std::vector<const ResolvedRelation*> resolved_ptrs;
  for (const auto& r : resolved) resolved_ptrs.push_back(&r);

  std::vector<DecompositionRow> decomp_rows;
  if (cfg.metrics.contains("decompositions")) {
    decomp_rows = decomposition_table(resolved_ptrs, false);
  }

  // type -> metric -> (sum, count), for relation-level metrics only
  std::map<std::optional<BroadType>, std::map<std::string, Stats>, TypeOrder> by_type;

  ordered_json relations = ordered_json::array();
  for (std::size_t idx = 0; idx < resolved.size(); ++idx) {
    const ResolvedRelation& rel = resolved[idx];
    ordered_json row;
    row["name"] = rel.name;
    row["broad_type"] = type_json(rel.broad_type);
    row["pairs_total"] = dataset[idx].pairs.size();
    row["pairs_resolved"] = rel.size();
    row["dropped_oov"] = rel.dropped_oov;
    row["dropped_degenerate"] = rel.dropped_degenerate;

    ordered_json metrics = ordered_json::object();
    ordered_json skipped = ordered_json::object();
    auto need_pairs = [&](const std::string& metric, std::size_t n) {
      if (rel.size() >= n) return true;
      skipped[metric] = "needs >= " + std::to_string(n) + " resolved pairs, has " +
                        std::to_string(rel.size());
      return false;
    };

    std::optional<OffsetSet> offsets;
    if (rel.usable()) offsets = build_offsets(rel);

    for (const std::string& metric : cfg.metrics) {
      if (metric == "ocs") {
        if (need_pairs(metric, kMinUsablePairs)) metrics[metric] = ocs(*offsets);
      } else if (metric == "msm") {
        if (need_pairs(metric, kMinUsablePairs)) metrics[metric] = msm(*offsets);
      } else if (metric == "pcs") {
        if (need_pairs(metric, kMinUsablePairs)) metrics[metric] = pcs(rel, pcs_cfg);
      } else if (metric == "accuracy-normal") {
        if (need_pairs(metric, 2)) {
          metrics[metric] = *accuracy(table, rel, TestMode::Normal);
        }
      } else if (metric == "accuracy-honest") {
        if (need_pairs(metric, 2)) {
          metrics[metric] = *accuracy(table, rel, TestMode::Honest);
        }
      }
    }
    for (const auto& [metric, value] : metrics.items()) {
      by_type[rel.broad_type][metric].add(value.get<double>());
    }
    row["metrics"] = std::move(metrics);
    if (!skipped.empty()) row["skipped"] = std::move(skipped);

    if (cfg.metrics.contains("decompositions")) {
      const DecompositionRow& d = decomp_rows[idx];
      ordered_json dj;
      if (d.eligible) {
        dj["quads"] = d.quads;
        dj["score"] = score_json(d.score_mean);
        dj["delta"] = delta_json(d.delta_mean);
        dj["self"] = score_json(d.self_mean);
      } else {
        dj["skipped"] = d.reason;
      }
      row["decomposition"] = std::move(dj);
    }
    relations.push_back(std::move(row));
  }
  section["relations"] = std::move(relations);

  ordered_json type_means = ordered_json::array();
  for (const auto& [type, metric_stats] : by_type) {
    if (!type) continue;  // untyped relations are listed, not aggregated
    ordered_json row;
    row["broad_type"] = type_json(type);
    ordered_json means = ordered_json::object();
    ordered_json counts = ordered_json::object();
    for (const auto& [metric, stats] : metric_stats) {
      means[metric] = stats.mean();
      counts[metric] = stats.n;
    }
    row["metrics"] = std::move(means);
    row["relations_used"] = std::move(counts);
    type_means.push_back(std::move(row));
  }
  section["type_means"] = std::move(type_means);

  if (cfg.metrics.contains("baselines")) {
    section["baselines"] = baselines_json(resolved_ptrs, table, cfg, pcs_cfg);
  }
  if (cfg.metrics.contains("hist")) {
    std::vector<const ResolvedRelation*> usable;
    for (const auto* r : resolved_ptrs) {
      if (r->usable()) usable.push_back(r);
    }
    section["histograms"] = histograms_json(usable);
  }
}

std::string resolve_format(const EmbeddingSpecCfg& spec) {
  if (spec.format != "auto") return spec.format;
  const auto dot = spec.path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : spec.path.substr(dot);
  return ext == ".bin" ? "binary" : "text";
}

ordered_json meta_json(const RunConfig& cfg) {
  ordered_json meta;
  meta["tool"] = "embeval";
  meta["version"] = kToolVersion;
  meta["seed"] = cfg.seed;
  meta["metrics"] = cfg.metrics;  // std::set: sorted
  meta["shuffles"] = cfg.n_shuffles;
  meta["baseline_instances"] = cfg.baseline_instances;
  meta["max_rejection_tries"] = cfg.max_rejection_tries;
  meta["case_fallback"] = cfg.lookup.case_fallback;
  meta["bats_root"] = cfg.bats_root.empty() ? ordered_json(nullptr)
                                            : ordered_json(cfg.bats_root);
  ordered_json specs = ordered_json::array();
  for (const auto& e : cfg.embeddings) {
    ordered_json s;
    s["path"] = e.path;
    s["format"] = resolve_format(e);
    s["normalize"] = e.normalize;
    s["limit"] = e.limit ? ordered_json(*e.limit) : ordered_json(nullptr);
    specs.push_back(std::move(s));
  }
  meta["embeddings"] = std::move(specs);
  meta["synth_specs"] = cfg.synth_specs;
  return meta;
}

}  // namespace

MetricsReport run(const RunConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  MetricsReport report;
  report.doc["meta"] = meta_json(cfg);

  std::vector<Relation> dataset;
  if (!cfg.bats_root.empty()) dataset = load_dataset(cfg.bats_root);

  ordered_json sections = ordered_json::array();
  for (const auto& spec : cfg.embeddings) {
    ordered_json section;
    section["name"] = spec.path;
    section["source"] = "embedding";
    try {
      const std::string format = resolve_format(spec);
      const EmbeddingTable table =
          format == "binary" ? load_binary(spec.path, spec.limit, spec.normalize)
                             : load_text(spec.path, spec.limit, spec.normalize);
      evaluate_section(section, table, dataset, cfg);
    } catch (const std::exception& e) {
      section["error"] = e.what();
    }
    sections.push_back(std::move(section));
  }
  for (const auto& path : cfg.synth_specs) {
    ordered_json section;
    section["name"] = "synth:" + path;
    section["source"] = "synthetic";
    try {
      const SynthSpec spec = load_synth_spec(path, cfg.seed);
      ordered_json echo;
      echo["model"] = std::string(to_string(spec.model));
      echo["n_pairs"] = spec.n_pairs;
      echo["dim"] = spec.dim;
      echo["scale"] = spec.scale;
      echo["noise"] = spec.noise;
      echo["spread"] = spec.spread;
      echo["separation"] = spec.separation;
      echo["distractors"] = spec.distractors;
      echo["seed"] = spec.seed;
      section["config"] = std::move(echo);
      SynthResult result = generate(spec);
      if (result.resampled > 0) section["pairs_resampled"] = result.resampled;
      const std::vector<Relation> one{result.relation};
      evaluate_section(section, result.table, one, cfg);
    } catch (const std::exception& e) {
      section["error"] = e.what();
    }
    sections.push_back(std::move(section));
  }
  report.doc["sections"] = std::move(sections);

  const auto t1 = std::chrono::steady_clock::now();
  report.doc["timing"] = ordered_json{
      {"wall_seconds", std::chrono::duration<double>(t1 - t0).count()}};
  return report;
}

std::string emit_json(const MetricsReport& report) {
  return report.doc.dump(2) + "\n";
}

MetricsReport parse_json(const std::string& bytes) {
  return MetricsReport{ordered_json::parse(bytes)};
}

bool fully_successful(const MetricsReport& report) {
  if (!report.doc.contains("sections") || report.doc["sections"].empty()) return false;
  for (const auto& section : report.doc["sections"]) {
    if (section.contains("error")) return false;
  }
  return true;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void csv_row(std::ostringstream& out, const std::string& embedding,
             const std::string& scope, const std::string& name,
             const ordered_json& broad_type, const std::string& pairs_total,
             const std::string& pairs_resolved, const std::string& dropped_oov,
             const std::string& dropped_degenerate, const std::string& metric,
             const std::string& value) {
  out << csv_escape(embedding) << ',' << scope << ',' << csv_escape(name) << ','
      << (broad_type.is_null() ? "" : broad_type.get<std::string>()) << ','
      << pairs_total << ',' << pairs_resolved << ',' << dropped_oov << ','
      << dropped_degenerate << ',' << metric << ',' << value << '\n';
}

}  // namespace

std::string emit_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "embedding,scope,name,broad_type,pairs_total,pairs_resolved,"
         "dropped_oov,dropped_degenerate,metric,value\n";
  if (!report.doc.contains("sections")) return out.str();
  for (const auto& section : report.doc["sections"]) {
    const std::string emb = section.value("name", std::string());
    if (section.contains("error")) {
      csv_row(out, emb, "error", "", nullptr, "", "", "", "", "error",
              csv_escape(section["error"].get<std::string>()));
      continue;
    }
    for (const auto& rel : section.value("relations", ordered_json::array())) {
      const std::string name = rel["name"].get<std::string>();
      const std::string total = rel["pairs_total"].dump();
      const std::string res = rel["pairs_resolved"].dump();
      const std::string oov = rel["dropped_oov"].dump();
      const std::string deg = rel["dropped_degenerate"].dump();
      for (const auto& [metric, value] : rel["metrics"].items()) {
        csv_row(out, emb, "relation", name, rel["broad_type"], total, res, oov, deg,
                metric, fmt_double(value.get<double>()));
      }
      if (rel.contains("decomposition") && rel["decomposition"].contains("score")) {
        const auto& d = rel["decomposition"];
        for (const char* part : {"score", "delta", "self"}) {
          for (const auto& [term, value] : d[part].items()) {
            csv_row(out, emb, "relation", name, rel["broad_type"], total, res, oov,
                    deg, std::string("decomposition.") + part + "." + term,
                    fmt_double(value.get<double>()));
          }
        }
      }
    }
    for (const auto& tm : section.value("type_means", ordered_json::array())) {
      for (const auto& [metric, value] : tm["metrics"].items()) {
        csv_row(out, emb, "type-mean", tm["broad_type"].get<std::string>(),
                tm["broad_type"], "", "", "", "", metric,
                fmt_double(value.get<double>()));
      }
    }
    for (const auto& row : section.value("baselines", ordered_json::array())) {
      for (const char* metric : {"ocs", "pcs"}) {
        for (const char* stat : {"mean", "min", "max"}) {
          csv_row(out, emb, "baseline", row["kind"].get<std::string>(),
                  row["broad_type"], "", row["instances"].dump(), "", "",
                  std::string(metric) + "." + stat,
                  fmt_double(row[metric][stat].get<double>()));
        }
      }
    }
    for (const auto& row : section.value("histograms", ordered_json::array())) {
      if (!row.contains("counts")) continue;
      const auto& counts = row["counts"];
      const double lo = row["lo"].get<double>();
      const double width = row["bin_width"].get<double>();
      for (std::size_t b = 0; b < counts.size(); ++b) {
        char bin[32];
        std::snprintf(bin, sizeof(bin), "bin_%.2f", lo + width * static_cast<double>(b));
        csv_row(out, emb, "histogram", row["family"].get<std::string>(),
                row["broad_type"], "", "", "", "", bin, counts[b].dump());
      }
    }
  }
  return out.str();
}

}  // namespace embeval
