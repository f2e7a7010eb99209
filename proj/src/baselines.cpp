#include "embeval/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace embeval {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::PermutedWithinCategory: return "permuted-within-category";
    case BaselineKind::MismatchedWithinType: return "mismatched-within-type";
    case BaselineKind::MismatchedAcrossType: return "mismatched-across-type";
    case BaselineKind::RandomStart: return "random-start";
    case BaselineKind::RandomEnd: return "random-end";
    case BaselineKind::RandomBoth: return "random-both";
  }
  return "?";
}

namespace {

constexpr std::size_t kMaxPairs = 50;

// Rebuild a resolved relation from explicit (start_row, end_row) pairs,
// dropping identical-vector pairs like resolve() does.
ResolvedRelation assemble(const ResolvedRelation& like, std::string name,
                          const std::vector<std::pair<std::size_t, std::size_t>>& rows) {
  ResolvedRelation out;
  out.name = std::move(name);
  out.broad_type = like.broad_type;
  out.table = like.table;
  const EmbeddingTable& table = *like.table;
  for (const auto& [s, e] : rows) {
    const auto vs = table.row(s);
    const auto ve = table.row(e);
    if (s == e || std::equal(vs.begin(), vs.end(), ve.begin())) {
      ++out.dropped_degenerate;
      continue;
    }
    out.pairs.push_back({table.word(s), table.word(e), s, e});
  }
  return out;
}

void require_usable(const ResolvedRelation& resolved, BaselineKind kind) {
  if (!resolved.usable()) {
    throw std::invalid_argument(std::string(to_string(kind)) + ": relation \"" +
                                resolved.name + "\" has fewer than " +
                                std::to_string(kMinUsablePairs) + " resolved pairs");
  }
}

// k distinct indices from [0, n) \ excluded, order given by the draw.
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k,
                                         const std::unordered_set<std::size_t>& excluded) {
  if (excluded.size() >= n || n - excluded.size() < k) {
    throw std::invalid_argument("vocabulary too small: need " + std::to_string(k) +
                                " distinct words outside an exclusion set of " +
                                std::to_string(excluded.size()) + " from " +
                                std::to_string(n));
  }
  std::vector<std::size_t> picked;
  picked.reserve(k);
  if (k * 4 >= n - excluded.size()) {
    std::vector<std::size_t> candidates;
    candidates.reserve(n - excluded.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!excluded.contains(i)) candidates.push_back(i);
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
      picked.push_back(candidates[i]);
    }
  } else {
    std::unordered_set<std::size_t> used;
    while (picked.size() < k) {
      const std::size_t i = rng.below(n);
      if (excluded.contains(i) || !used.insert(i).second) continue;
      picked.push_back(i);
    }
  }
  return picked;
}

std::unordered_set<std::size_t> own_rows(const ResolvedRelation& resolved) {
  std::unordered_set<std::size_t> rows;
  for (const auto& p : resolved.pairs) {
    rows.insert(p.start_row);
    rows.insert(p.end_row);
  }
  return rows;
}

}  // namespace

BaselineInstance permute_within_category(const ResolvedRelation& resolved, Rng& rng,
                                         int instance_index) {
  require_usable(resolved, BaselineKind::PermutedWithinCategory);
  const std::vector<std::size_t> perm = rng.permutation(resolved.size());
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  rows.reserve(resolved.size());
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    rows.emplace_back(resolved.pairs[i].start_row, resolved.pairs[perm[i]].end_row);
  }
  BaselineInstance inst{BaselineKind::PermutedWithinCategory, resolved.name,
                        resolved.broad_type, instance_index,
                        assemble(resolved, resolved.name + "#permuted#" +
                                               std::to_string(instance_index),
                                 rows)};
  return inst;
}

BaselineInstance mismatch_categories(const ResolvedRelation& source,
                                     const std::vector<const ResolvedRelation*>& pool,
                                     bool across_type, Rng& rng, int instance_index) {
  const auto kind = across_type ? BaselineKind::MismatchedAcrossType
                                : BaselineKind::MismatchedWithinType;
  require_usable(source, kind);
  std::vector<const ResolvedRelation*> partners;
  for (const ResolvedRelation* r : pool) {
    if (r == &source || r->name == source.name || !r->usable()) continue;
    const bool same_type = r->broad_type == source.broad_type;
    if (across_type ? !same_type : same_type) partners.push_back(r);
  }
  if (partners.empty()) {
    throw std::invalid_argument(std::string(to_string(kind)) +
                                ": no eligible partner category for \"" +
                                source.name + "\"");
  }
  const ResolvedRelation& partner = *partners[rng.below(partners.size())];

  const std::size_t n = std::min({kMaxPairs, source.size(), partner.size()});
  const std::unordered_set<std::size_t> none;
  std::vector<std::size_t> start_picks = sample_distinct(rng, source.size(), n, none);
  std::vector<std::size_t> end_picks = sample_distinct(rng, partner.size(), n, none);

  std::vector<std::pair<std::size_t, std::size_t>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows.emplace_back(source.pairs[start_picks[i]].start_row,
                      partner.pairs[end_picks[i]].end_row);
  }
  BaselineInstance inst{kind, source.name + "->" + partner.name, source.broad_type,
                        instance_index,
                        assemble(source, source.name + "#mismatch#" +
                                             std::to_string(instance_index),
                                 rows)};
  return inst;
}

BaselineInstance randomize(const ResolvedRelation& resolved, RandomizeSide side,
                           const EmbeddingTable& table, Rng& rng, int instance_index) {
  const auto kind = side == RandomizeSide::Start  ? BaselineKind::RandomStart
                    : side == RandomizeSide::End ? BaselineKind::RandomEnd
                                                 : BaselineKind::RandomBoth;
  require_usable(resolved, kind);
  const std::size_t n = resolved.size();
  const std::size_t need = side == RandomizeSide::Both ? 2 * n : n;
  const auto excluded = own_rows(resolved);
  const std::vector<std::size_t> draw =
      sample_distinct(rng, table.size(), need, excluded);

  std::vector<std::pair<std::size_t, std::size_t>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (side) {
      case RandomizeSide::Start:
        rows.emplace_back(draw[i], resolved.pairs[i].end_row);
        break;
      case RandomizeSide::End:
        rows.emplace_back(resolved.pairs[i].start_row, draw[i]);
        break;
      case RandomizeSide::Both:
        rows.emplace_back(draw[2 * i], draw[2 * i + 1]);
        break;
    }
  }
  BaselineInstance inst{kind, resolved.name,
                        side == RandomizeSide::Both
                            ? std::nullopt
                            : resolved.broad_type,
                        instance_index,
                        assemble(resolved, resolved.name + "#" +
                                               std::string(to_string(kind)) + "#" +
                                               std::to_string(instance_index),
                                 rows)};
  if (side == RandomizeSide::Both) inst.relation.broad_type = std::nullopt;
  return inst;
}

std::vector<BaselineInstance> baseline_suite(
    const std::vector<const ResolvedRelation*>& relations, const EmbeddingTable& table,
    int n_instances, std::uint64_t master_seed) {
  if (n_instances < 1) {
    throw std::invalid_argument("baseline suite needs n_instances >= 1");
  }
  auto has_partner = [&](const ResolvedRelation& source, bool across) {
    for (const ResolvedRelation* r : relations) {
      if (r == &source || r->name == source.name || !r->usable()) continue;
      const bool same_type = r->broad_type == source.broad_type;
      if (across ? !same_type : same_type) return true;
    }
    return false;
  };

  std::vector<BaselineInstance> out;
  for (const ResolvedRelation* rel : relations) {
    if (!rel->usable()) continue;
    for (BaselineKind kind : kAllBaselineKinds) {
      if (kind == BaselineKind::MismatchedWithinType && !has_partner(*rel, false)) {
        continue;
      }
      if (kind == BaselineKind::MismatchedAcrossType && !has_partner(*rel, true)) {
        continue;
      }
      for (int k = 0; k < n_instances; ++k) {
        const std::string label =
            rel->name + "/" + std::string(to_string(kind));
        Rng rng(derive_seed(master_seed, label, static_cast<std::uint64_t>(k)));
        switch (kind) {
          case BaselineKind::PermutedWithinCategory:
            out.push_back(permute_within_category(*rel, rng, k));
            break;
          case BaselineKind::MismatchedWithinType:
            out.push_back(mismatch_categories(*rel, relations, false, rng, k));
            break;
          case BaselineKind::MismatchedAcrossType:
            out.push_back(mismatch_categories(*rel, relations, true, rng, k));
            break;
          case BaselineKind::RandomStart:
            out.push_back(randomize(*rel, RandomizeSide::Start, table, rng, k));
            break;
          case BaselineKind::RandomEnd:
            out.push_back(randomize(*rel, RandomizeSide::End, table, rng, k));
            break;
          case BaselineKind::RandomBoth:
            out.push_back(randomize(*rel, RandomizeSide::Both, table, rng, k));
            break;
        }
      }
    }
  }
  return out;
}

}  // namespace embeval
