#include "embeval/bats.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace embeval {

namespace fs = std::filesystem;

std::string_view to_string(BroadType type) {
  switch (type) {
    case BroadType::Inflectional: return "Inflectional";
    case BroadType::Derivational: return "Derivational";
    case BroadType::Encyclopedic: return "Encyclopedic";
    case BroadType::Lexicographic: return "Lexicographic";
  }
  return "?";
}

std::optional<BroadType> broad_type_from_directory(std::string_view dir_name) {
  if (dir_name.empty()) return std::nullopt;
  switch (dir_name.front()) {
    case '1': return BroadType::Inflectional;
    case '2': return BroadType::Derivational;
    case '3': return BroadType::Encyclopedic;
    case '4': return BroadType::Lexicographic;
    default: return std::nullopt;
  }
}

Relation parse_relation_file(const fs::path& path) {
  const auto type = broad_type_from_directory(path.parent_path().filename().string());
  if (!type) {
    throw std::runtime_error(path.string() +
                             ": cannot infer broad type from directory \"" +
                             path.parent_path().filename().string() + "\"");
  }

  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");

  Relation relation;
  relation.name = path.stem().string();
  relation.broad_type = *type;

  std::unordered_set<std::string> seen_starts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": no tab separator");
    }
    std::string start = line.substr(0, tab);
    std::string end = line.substr(tab + 1);
    // multi-answer targets: keep the first slash segment
    if (const auto slash = end.find('/'); slash != std::string::npos) {
      end.resize(slash);
    }
    if (start.empty() || end.empty()) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                               ": empty field");
    }
    if (!seen_starts.insert(start).second) continue;  // keep first per start word
    relation.pairs.push_back({std::move(start), std::move(end)});
  }
  return relation;
}

std::vector<Relation> load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw std::runtime_error(root.string() + ": not a directory");
  }
  std::vector<fs::path> type_dirs;
  std::vector<std::string> found;
  for (const auto& entry : fs::directory_iterator(root)) {
    found.push_back(entry.path().filename().string());
    if (!entry.is_directory()) continue;
    if (!broad_type_from_directory(found.back())) {
      std::string listing;
      for (const auto& f : found) listing += " \"" + f + "\"";
      throw std::runtime_error(root.string() + ": unrecognized type directory \"" +
                               found.back() + "\"; found:" + listing);
    }
    type_dirs.push_back(entry.path());
  }
  if (type_dirs.empty()) {
    std::string listing;
    for (const auto& f : found) listing += " \"" + f + "\"";
    throw std::runtime_error(root.string() + ": no type directories found" +
                             (found.empty() ? "" : "; found:" + listing));
  }
  std::sort(type_dirs.begin(), type_dirs.end());

  std::vector<Relation> relations;
  for (const auto& dir : type_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) relations.push_back(parse_relation_file(file));
  }
  return relations;
}

ResolvedRelation resolve(const Relation& relation, const EmbeddingTable& table,
                         const LookupPolicy& policy) {
  ResolvedRelation out;
  out.name = relation.name;
  out.broad_type = relation.broad_type;
  out.table = &table;
  for (const auto& pair : relation.pairs) {
    const auto s = table.find(pair.start, policy);
    const auto e = table.find(pair.end, policy);
    if (!s || !e) {
      ++out.dropped_oov;
      continue;
    }
    const auto vs = table.row(*s);
    const auto ve = table.row(*e);
    if (*s == *e || std::equal(vs.begin(), vs.end(), ve.begin())) {
      ++out.dropped_degenerate;
      continue;
    }
    out.pairs.push_back({table.word(*s), table.word(*e), *s, *e});
  }
  return out;
}

std::vector<AnalogyQuad> enumerate_quads(const ResolvedRelation& resolved) {
  const std::size_t n = resolved.size();
  std::vector<AnalogyQuad> quads;
  if (n < 2) return quads;
  quads.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      quads.push_back({&resolved, i, j});
    }
  }
  return quads;
}

}  // namespace embeval
