#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "embeval/baselines.hpp"
#include "embeval/offsets.hpp"
#include "embeval/synth.hpp"
#include "test_support.hpp"

namespace ts = test_support;
using embeval::BaselineInstance;
using embeval::BaselineKind;
using embeval::BroadType;
using embeval::RandomizeSide;
using embeval::ResolvedRelation;
using embeval::Rng;

namespace {

std::multiset<std::string> starts_of(const ResolvedRelation& rel) {
  std::multiset<std::string> out;
  for (const auto& p : rel.pairs) out.insert(p.start);
  return out;
}

std::multiset<std::string> ends_of(const ResolvedRelation& rel) {
  std::multiset<std::string> out;
  for (const auto& p : rel.pairs) out.insert(p.end);
  return out;
}

// Fixture: two relations per broad type over a shared table of distinct
// word vectors, plus spare vocabulary for the random baselines.
struct Pool {
  embeval::EmbeddingTable table;
  std::vector<ResolvedRelation> relations;
  std::vector<const ResolvedRelation*> ptrs;
};

Pool make_pool(int pairs_per_relation = 5, int spare = 60) {
  std::mt19937 gen(42);
  std::vector<ts::Entry> entries;
  struct Planned {
    std::string name;
    BroadType type;
    std::vector<std::pair<std::string, std::string>> pairs;
  };
  std::vector<Planned> planned;
  const BroadType types[] = {BroadType::Inflectional, BroadType::Derivational,
                             BroadType::Encyclopedic, BroadType::Lexicographic};
  int word_id = 0;
  for (int t = 0; t < 4; ++t) {
    for (int r = 0; r < 2; ++r) {
      Planned p;
      p.name = std::string(embeval::to_string(types[t])) + "-" + std::to_string(r);
      p.type = types[t];
      for (int i = 0; i < pairs_per_relation; ++i) {
        const std::string s = "w" + std::to_string(word_id++);
        const std::string e = "w" + std::to_string(word_id++);
        entries.emplace_back(s, ts::random_unit_f32(gen, 6));
        entries.emplace_back(e, ts::random_unit_f32(gen, 6));
        p.pairs.emplace_back(s, e);
      }
      planned.push_back(std::move(p));
    }
  }
  for (int i = 0; i < spare; ++i) {
    entries.emplace_back("spare" + std::to_string(i), ts::random_unit_f32(gen, 6));
  }
  Pool pool{ts::make_table(entries), {}, {}};
  for (const auto& p : planned) {
    embeval::Relation rel;
    rel.name = p.name;
    rel.broad_type = p.type;
    for (const auto& [s, e] : p.pairs) rel.pairs.push_back({s, e});
    pool.relations.push_back(embeval::resolve(rel, pool.table));
  }
  for (const auto& r : pool.relations) pool.ptrs.push_back(&r);
  return pool;
}

}  // namespace

TEST_CASE("permute_within_category preserves both word multisets") {
  const auto pool = make_pool();
  const auto& src = pool.relations[0];
  Rng rng(1);
  const auto inst = embeval::permute_within_category(src, rng, 0);
  CHECK(inst.kind == BaselineKind::PermutedWithinCategory);
  CHECK(inst.broad_type == src.broad_type);
  CHECK(starts_of(inst.relation) == starts_of(src));
  CHECK(ends_of(inst.relation) == ends_of(src));

  Rng r1(9), r2(9);
  const auto a = embeval::permute_within_category(src, r1, 0);
  const auto b = embeval::permute_within_category(src, r2, 0);
  CHECK(ends_of(a.relation) == ends_of(b.relation));
  for (std::size_t i = 0; i < a.relation.pairs.size(); ++i) {
    CHECK(a.relation.pairs[i].end == b.relation.pairs[i].end);
  }
}

TEST_CASE("mismatch_categories draws sides from the declared categories") {
  const auto pool = make_pool();
  const auto& src = pool.relations[0];  // Inflectional-0
  Rng rng(2);

  const auto within = embeval::mismatch_categories(src, pool.ptrs, false, rng, 0);
  CHECK(within.kind == BaselineKind::MismatchedWithinType);
  CHECK(within.broad_type == BroadType::Inflectional);
  CHECK(within.source.find("Inflectional-0->Inflectional-1") == 0);
  const auto src_starts = starts_of(src);
  for (const auto& p : within.relation.pairs) {
    CHECK(src_starts.contains(p.start));
  }
  const auto partner_ends = ends_of(pool.relations[1]);
  for (const auto& p : within.relation.pairs) {
    CHECK(partner_ends.contains(p.end));
  }
  // without replacement on both sides
  const auto inst_starts = starts_of(within.relation);
  const auto inst_ends = ends_of(within.relation);
  CHECK(std::set<std::string>(inst_starts.begin(), inst_starts.end()).size() ==
        inst_starts.size());
  CHECK(std::set<std::string>(inst_ends.begin(), inst_ends.end()).size() ==
        inst_ends.size());

  const auto across = embeval::mismatch_categories(src, pool.ptrs, true, rng, 0);
  CHECK(across.kind == BaselineKind::MismatchedAcrossType);
  CHECK(across.source.find("Inflectional-0->Inflectional") == std::string::npos);

  // a pool with a single relation offers no partner
  const std::vector<const ResolvedRelation*> lonely = {&src};
  CHECK_THROWS_AS(embeval::mismatch_categories(src, lonely, false, rng, 0),
                  std::invalid_argument);
}

TEST_CASE("mismatch_categories caps pairs at the smaller category") {
  const auto pool = make_pool(4);
  Rng rng(3);
  const auto inst =
      embeval::mismatch_categories(pool.relations[2], pool.ptrs, false, rng, 0);
  CHECK(inst.relation.size() + inst.relation.dropped_degenerate == 4);
}

TEST_CASE("randomize: kept side preserved, replacements distinct and foreign") {
  const auto pool = make_pool();
  const auto& src = pool.relations[3];
  std::set<std::string> own;
  for (const auto& p : src.pairs) {
    own.insert(p.start);
    own.insert(p.end);
  }

  Rng rng(4);
  const auto rand_end = embeval::randomize(src, RandomizeSide::End, pool.table, rng, 0);
  CHECK(rand_end.kind == BaselineKind::RandomEnd);
  CHECK(starts_of(rand_end.relation) == starts_of(src));
  for (const auto& p : rand_end.relation.pairs) CHECK_FALSE(own.contains(p.end));

  const auto rand_start =
      embeval::randomize(src, RandomizeSide::Start, pool.table, rng, 0);
  CHECK(ends_of(rand_start.relation) == ends_of(src));
  for (const auto& p : rand_start.relation.pairs) CHECK_FALSE(own.contains(p.start));

  const auto rand_both = embeval::randomize(src, RandomizeSide::Both, pool.table, rng, 0);
  CHECK(rand_both.kind == BaselineKind::RandomBoth);
  CHECK_FALSE(rand_both.broad_type.has_value());
  CHECK_FALSE(rand_both.relation.broad_type.has_value());
  std::set<std::string> drawn;
  for (const auto& p : rand_both.relation.pairs) {
    CHECK_FALSE(own.contains(p.start));
    CHECK_FALSE(own.contains(p.end));
    drawn.insert(p.start);
    drawn.insert(p.end);
  }
  CHECK(drawn.size() == 2 * rand_both.relation.size());
}

TEST_CASE("randomize: tiny vocabulary is an explicit error") {
  const auto table = ts::make_table({{"a", {1, 0}}, {"b", {0, 1}},
                                     {"c", {1, 1}}, {"d", {1, 2}},
                                     {"e", {2, 1}}, {"f", {3, 1}}});
  const auto resolved =
      ts::make_resolved(table, {{"a", "b"}, {"c", "d"}, {"e", "f"}});
  Rng rng(5);
  CHECK_THROWS_AS(embeval::randomize(resolved, RandomizeSide::End, table, rng, 0),
                  std::invalid_argument);
}

TEST_CASE("baseline_suite: counts, determinism, and applicability") {
  const auto pool = make_pool();
  const auto suite = embeval::baseline_suite(pool.ptrs, pool.table, 3, 99);
  // 8 usable relations x 6 kinds x 3 instances, all applicable here
  CHECK(suite.size() == 8 * 6 * 3);

  std::map<BaselineKind, int> per_kind;
  for (const auto& inst : suite) ++per_kind[inst.kind];
  for (const auto& [kind, n] : per_kind) CHECK(n == 24);

  const auto again = embeval::baseline_suite(pool.ptrs, pool.table, 3, 99);
  REQUIRE(again.size() == suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    CHECK(suite[i].source == again[i].source);
    CHECK(ends_of(suite[i].relation) == ends_of(again[i].relation));
  }

  // single broad type: across-type never applicable, within-type still is
  std::vector<const ResolvedRelation*> mono = {pool.ptrs[0], pool.ptrs[1]};
  const auto mono_suite = embeval::baseline_suite(mono, pool.table, 2, 1);
  for (const auto& inst : mono_suite) {
    CHECK(inst.kind != BaselineKind::MismatchedAcrossType);
  }
  CHECK(mono_suite.size() == 2 * 5 * 2);
}

TEST_CASE("baseline instances on clustered geometry keep consistency at chance") {
  // small smoke version of the acceptance criterion
  auto spec = embeval::SynthSpec{};
  spec.model = embeval::SynthModel::Clustered;
  spec.n_pairs = 12;
  spec.dim = 16;
  spec.seed = 31;
  const auto synth = embeval::generate(spec);
  const auto resolved = embeval::resolve(synth.relation, synth.table);
  std::vector<const ResolvedRelation*> ptrs = {&resolved};
  const auto suite = embeval::baseline_suite(ptrs, synth.table, 5, 7);
  embeval::PcsConfig cfg;
  cfg.seed = 7;
  cfg.n_shuffles = 20;
  std::map<BaselineKind, std::pair<double, int>> acc;
  for (const auto& inst : suite) {
    if (!inst.relation.usable()) continue;
    const double p = embeval::pcs(inst.relation, cfg);
    acc[inst.kind].first += p;
    acc[inst.kind].second += 1;
  }
  for (const auto& [kind, sums] : acc) {
    CHECK(sums.first / sums.second == doctest::Approx(0.5).epsilon(0.12));
  }
}
