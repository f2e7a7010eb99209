#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "embeval/report.hpp"

namespace {

int write_output(const std::string& bytes, const std::string& path) {
  if (path.empty()) {
    std::cout << bytes;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output path " << path << "\n";
    return 1;
  }
  out << bytes;
  return out ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "embeval: measure how consistently word embeddings encode relations as "
      "vector offsets (offset concentration, pairing consistency, analogy "
      "tests, random baselines, synthetic validation)"};

  embeval::RunConfig cfg;
  std::vector<std::string> embedding_paths;
  std::string format = "auto";
  std::string metrics_csv = "ocs,pcs";
  bool normalize = true;

  app.add_option("--embedding", embedding_paths,
                 "embedding file to evaluate (repeatable)");
  app.add_option("--format", format, "embedding file format")
      ->check(CLI::IsMember({"auto", "binary", "text"}))
      ->capture_default_str();
  app.add_flag("--normalize,!--no-normalize", normalize,
               "unit-normalize rows at load (default on)");
  std::int64_t limit = -1;  // -1 = no limit
  app.add_option("--limit", limit, "vocabulary row limit per embedding (default: all)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--bats", cfg.bats_root, "analogy dataset root directory");
  app.add_option("--metrics", metrics_csv,
                 "comma-separated metric list: accuracy-normal, accuracy-honest, "
                 "ocs, pcs, msm, decompositions, baselines, hist")
      ->capture_default_str();
  app.add_option("--shuffles", cfg.n_shuffles, "shuffled sets per relation")
      ->capture_default_str();
  app.add_option("--baseline-instances", cfg.baseline_instances,
                 "instances per baseline kind and relation")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  app.add_flag("--case-fallback", cfg.lookup.case_fallback,
               "retry lowercased words on vocabulary misses");
  app.add_option("--out", cfg.out_path, "output path (default: stdout)");
  app.add_option("--out-format", cfg.out_format, "output serialization")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--synth", cfg.synth_specs,
                 "synthetic table spec file (JSON; repeatable)");

  CLI11_PARSE(app, argc, argv);

  cfg.embeddings.clear();
  for (const auto& path : embedding_paths) {
    embeval::EmbeddingSpecCfg spec;
    spec.path = path;
    spec.format = format;
    spec.normalize = normalize;
    if (limit >= 0) spec.limit = static_cast<std::size_t>(limit);
    cfg.embeddings.push_back(std::move(spec));
  }
  cfg.metrics.clear();
  std::string token;
  for (char c : metrics_csv + ",") {
    if (c == ',') {
      if (!token.empty()) cfg.metrics.insert(token);
      token.clear();
    } else {
      token += c;
    }
  }

  try {
    const embeval::MetricsReport report = embeval::run(cfg);
    const std::string bytes = cfg.out_format == "csv" ? embeval::emit_csv(report)
                                                      : embeval::emit_json(report);
    const int rc = write_output(bytes, cfg.out_path);
    if (rc != 0) return rc;
    if (!embeval::fully_successful(report)) {
      std::cerr << "error: one or more sections failed; see the report's error "
                   "records\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = e.what();
    const std::string bytes = err.dump(2) + "\n";
    if (write_output(bytes, cfg.out_path) != 0) std::cerr << bytes;
    return 1;
  }
}
