#include <doctest.h>

#include <random>
#include <set>

#include "embeval/analogy.hpp"
#include "embeval/synth.hpp"
#include "test_support.hpp"

namespace ts = test_support;
using embeval::AnalogyQuad;
using embeval::TestMode;

namespace {

// Hand scan over the whole table with plain loops, mirroring the argmax
// definition but sharing no code with the implementation.
std::string oracle_predict(const embeval::EmbeddingTable& table,
                           const std::vector<double>& query,
                           const std::set<std::string>& excluded) {
  double best = -2.0;
  std::string best_word;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (excluded.contains(table.word(r))) continue;
    const double c = ts::oracle_cosine(query, ts::widen(table.row(r)));
    if (c > best) {
      best = c;
      best_word = table.word(r);
    }
  }
  return best_word;
}

std::vector<double> oracle_query(const AnalogyQuad& q) {
  auto query = ts::widen(q.vb());
  const auto a = ts::widen(q.va());
  const auto a_star = ts::widen(q.va_star());
  for (std::size_t i = 0; i < query.size(); ++i) query[i] += a_star[i] - a[i];
  return query;
}

}  // namespace

TEST_CASE("predict: five-row table against the hand scan, both modes") {
  const auto table = ts::make_table({{"a", {1, 0}},
                                     {"a*", {1, 1}},
                                     {"b", {0.9f, 0.1f}},
                                     {"b*", {0.9f, 1.1f}},
                                     {"w", {-1, 0}}});
  const auto resolved = ts::make_resolved(table, {{"a", "a*"}, {"b", "b*"}});
  REQUIRE(resolved.size() == 2);
  const AnalogyQuad quad{&resolved, 0, 1};

  const auto query = oracle_query(quad);
  CHECK(embeval::predict(table, quad, TestMode::Normal) ==
        oracle_predict(table, query, {"a", "a*", "b"}));
  CHECK(embeval::predict(table, quad, TestMode::Normal) == "b*");
  CHECK(embeval::predict(table, quad, TestMode::Honest) ==
        oracle_predict(table, query, {}));
}

TEST_CASE("predict: random tables agree with the hand scan") {
  std::mt19937 gen(31);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<ts::Entry> entries;
    for (int i = 0; i < 12; ++i) {
      entries.emplace_back("w" + std::to_string(i), ts::random_unit_f32(gen, 6));
    }
    const auto table = ts::make_table(entries);
    const auto resolved = ts::make_resolved(table, {{"w0", "w1"}, {"w2", "w3"}});
    if (resolved.size() != 2) continue;
    const AnalogyQuad quad{&resolved, 0, 1};
    const auto query = oracle_query(quad);
    CHECK(embeval::predict(table, quad, TestMode::Normal) ==
          oracle_predict(table, query, {"w0", "w1", "w2"}));
    CHECK(embeval::predict(table, quad, TestMode::Honest) ==
          oracle_predict(table, query, {}));
  }
}

TEST_CASE("predict: zero offset degenerates to nearest neighbour of b") {
  // a == a* gives a zero offset; the scan reduces to NN of b minus {a, b}.
  const auto table = ts::make_table({{"a", {1, 0}},
                                     {"same", {1, 0}},
                                     {"b", {0.6f, 0.8f}},
                                     {"b*", {0.58f, 0.81f}},
                                     {"far", {-1, 0}}});
  // (a, same) would be dropped as degenerate at resolve; build the quad manually
  embeval::ResolvedRelation manual;
  manual.name = "manual";
  manual.table = &table;
  manual.pairs = {{"a", "same", 0, 1}, {"b", "b*", 2, 3}};
  const AnalogyQuad quad{&manual, 0, 1};
  CHECK(embeval::predict(table, quad, TestMode::Normal) == "b*");
}

TEST_CASE("predict: ties break toward the lowest vocabulary index") {
  const auto table = ts::make_table({{"a", {1, 0}},
                                     {"a*", {0, 1}},
                                     {"b", {1, 0}},
                                     {"dup1", {0, 2}},
                                     {"dup2", {0, 2}}});
  embeval::ResolvedRelation manual;
  manual.name = "manual";
  manual.table = &table;
  manual.pairs = {{"a", "a*", 0, 1}, {"b", "dup2", 2, 4}};
  const AnalogyQuad quad{&manual, 0, 1};
  // query = b + a* - a = (0, 1); dup1 and dup2 tie at cosine 1
  CHECK(embeval::predict(table, quad, TestMode::Honest) == "a*");  // also (0,1), index 1
  CHECK(embeval::predict(table, quad, TestMode::Normal) == "dup1");
}

TEST_CASE("predict: scale invariance of the whole table") {
  std::mt19937 gen(77);
  std::vector<ts::Entry> entries;
  for (int i = 0; i < 10; ++i) {
    entries.emplace_back("w" + std::to_string(i), ts::random_unit_f32(gen, 5));
  }
  auto scaled = entries;
  for (auto& [_, row] : scaled) {
    for (auto& v : row) v *= 3.7f;
  }
  const auto table = ts::make_table(entries);
  const auto big = ts::make_table(scaled);
  const auto r1 = ts::make_resolved(table, {{"w0", "w1"}, {"w2", "w3"}, {"w4", "w5"}});
  const auto r2 = ts::make_resolved(big, {{"w0", "w1"}, {"w2", "w3"}, {"w4", "w5"}});
  for (const auto mode : {TestMode::Normal, TestMode::Honest}) {
    for (const auto& [q1, q2] :
         {std::pair{AnalogyQuad{&r1, 0, 1}, AnalogyQuad{&r2, 0, 1}},
          std::pair{AnalogyQuad{&r1, 2, 0}, AnalogyQuad{&r2, 2, 0}}}) {
      CHECK(embeval::predict(table, q1, mode) == embeval::predict(big, q2, mode));
    }
  }
}

TEST_CASE("accuracy: exact parallel offsets score 1.0 in normal mode") {
  auto result = embeval::generate(
      {embeval::SynthModel::ParallelOffset, 10, 8, 1.0, 0.0, 1.0, 4.0, 40, 5});
  const auto resolved = embeval::resolve(result.relation, result.table);
  REQUIRE(resolved.size() == 10);
  const auto acc = embeval::accuracy(result.table, resolved, TestMode::Normal);
  REQUIRE(acc.has_value());
  CHECK(*acc == 1.0);
}

TEST_CASE("accuracy: two pairs, both predictions wrong, gives 0.0") {
  // One distractor sits exactly on each quad's analogy direction, so b*
  // loses both scans: query1 = s2 + e1 - s1 = (0, 1.5), query2 = (0.5, 0).
  const auto table = ts::make_table({{"s1", {1, 0}},
                                     {"e1", {1, 0.5f}},
                                     {"s2", {0, 1}},
                                     {"e2", {-0.5f, 1}},
                                     {"m1", {0, 0.75f}},
                                     {"m2", {0.8f, 0}}});
  const auto resolved = ts::make_resolved(table, {{"s1", "e1"}, {"s2", "e2"}});
  REQUIRE(resolved.size() == 2);
  const auto acc = embeval::accuracy(table, resolved, TestMode::Normal);
  REQUIRE(acc.has_value());
  CHECK(*acc == 0.0);
}

TEST_CASE("accuracy: fewer than two pairs is absent") {
  const auto table = ts::make_table({{"a", {1, 0}}, {"b", {0, 1}}});
  const auto resolved = ts::make_resolved(table, {{"a", "b"}});
  CHECK_FALSE(embeval::accuracy(table, resolved, TestMode::Normal).has_value());
}

TEST_CASE("exclusion monotonicity: normal accuracy >= honest accuracy") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (const auto model : {embeval::SynthModel::ParallelOffset,
                             embeval::SynthModel::Clustered, embeval::SynthModel::Random}) {
      auto result = embeval::generate({model, 8, 10, 1.0, 0.3, 1.0, 4.0, 30, seed});
      const auto resolved = embeval::resolve(result.relation, result.table);
      if (resolved.size() < 2) continue;
      const auto normal = embeval::accuracy(result.table, resolved, TestMode::Normal);
      const auto honest = embeval::accuracy(result.table, resolved, TestMode::Honest);
      REQUIRE(normal.has_value());
      REQUIRE(honest.has_value());
      CHECK(*normal >= *honest);
    }
  }
}

TEST_CASE("decompose_score: zero offset collapses to within-pair") {
  const auto table = ts::make_table({{"a", {1, 0}},
                                     {"same", {1, 0}},
                                     {"b", {0.6f, 0.8f}},
                                     {"b*", {0.0f, 1.0f}}});
  const auto d = embeval::decompose_score(table.row(0), table.row(1), table.row(2),
                                          table.row(3));
  CHECK(d.offset_offset == doctest::Approx(0.0));
  CHECK(d.offset_start == doctest::Approx(0.0));
  CHECK(d.total ==
        doctest::Approx(ts::oracle_cosine(ts::widen(table.row(2)), ts::widen(table.row(3)))));
  CHECK(d.within_pair == doctest::Approx(d.total));
}

TEST_CASE("decompose_score: orthonormal construction with o_a = o_b = b* - b") {
  // b = e1, b* = e2; o_a = e2 - e1; analogy point lands exactly on b*.
  const std::vector<float> a = {0.3f, 0.4f};  // any a; only the offset matters
  const std::vector<float> a_star = {0.3f - 1.0f, 0.4f + 1.0f};
  const std::vector<float> b = {1, 0};
  const std::vector<float> b_star = {0, 1};
  const auto d = embeval::decompose_score(a, a_star, b, b_star);
  // direct-evaluation oracle: cosine(b + o_a, b*) = cosine(e2, e2) = 1, Z = 1
  const std::vector<double> analogy = {0.0, 1.0};
  CHECK(d.total == doctest::Approx(ts::oracle_cosine(analogy, ts::widen(b_star))));
  CHECK(d.normalization == doctest::Approx(1.0));
  CHECK(d.within_pair == doctest::Approx(0.0));
  CHECK(d.offset_offset == doctest::Approx(2.0));
  CHECK(d.offset_start == doctest::Approx(-1.0));
  CHECK(d.within_pair + d.offset_offset + d.offset_start == doctest::Approx(d.total));
}

TEST_CASE("decompose_score: random quads close to the direct cosine") {
  std::mt19937 gen(101);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = ts::random_f32(gen, 7);
    const auto a_star = ts::random_f32(gen, 7);
    const auto b = ts::random_f32(gen, 7);
    const auto b_star = ts::random_f32(gen, 7);
    auto analogy = ts::widen(b);
    for (int i = 0; i < 7; ++i) analogy[i] += double(a_star[i]) - double(a[i]);
    if (ts::oracle_norm(analogy) < 1e-6 || ts::oracle_norm(ts::widen(b_star)) < 1e-6) {
      continue;
    }
    const auto d = embeval::decompose_score(a, a_star, b, b_star);
    const double direct = ts::oracle_cosine(analogy, ts::widen(b_star));
    CHECK(d.within_pair + d.offset_offset + d.offset_start ==
          doctest::Approx(direct).epsilon(1e-6));
    CHECK(d.total == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("decompose_delta: equal norms kill the norm term") {
  const std::vector<float> a = {1, 0, 0};
  const std::vector<float> a_star = {0.8f, 0.2f, 0.1f};
  const std::vector<float> b = {0, 1, 0};
  const std::vector<float> b_star = {1, 0, 0};  // same norm as b
  const auto d = embeval::decompose_delta(a, a_star, b, b_star);
  CHECK(d.norm_term == doctest::Approx(0.0));
}

TEST_CASE("decompose_delta: b == b* gives delta_sim 0") {
  const std::vector<float> a = {1, 0};
  const std::vector<float> a_star = {0.5f, 0.5f};
  const std::vector<float> b = {0.3f, 0.7f};
  const auto d = embeval::decompose_delta(a, a_star, b, b);
  CHECK(d.delta_sim == doctest::Approx(0.0));
}

TEST_CASE("decompose_delta: random quads close to the direct value") {
  std::mt19937 gen(202);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = ts::random_f32(gen, 9);
    const auto a_star = ts::random_f32(gen, 9);
    const auto b = ts::random_f32(gen, 9);
    const auto b_star = ts::random_f32(gen, 9);
    auto analogy = ts::widen(b);
    for (int i = 0; i < 9; ++i) analogy[i] += double(a_star[i]) - double(a[i]);
    if (ts::oracle_norm(analogy) < 1e-6 || ts::oracle_norm(ts::widen(b_star)) < 1e-6 ||
        ts::oracle_norm(ts::widen(b)) < 1e-6) {
      continue;
    }
    const auto d = embeval::decompose_delta(a, a_star, b, b_star);
    const double direct = ts::oracle_cosine(analogy, ts::widen(b_star)) -
                          ts::oracle_cosine(analogy, ts::widen(b));
    CHECK(d.norm_term + d.offset_offset + d.start_offset ==
          doctest::Approx(direct).epsilon(1e-6));
    CHECK(d.delta_sim == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("decompose_delta: unit-norm inputs make start_offset * Z equal b.b* - 1") {
  std::mt19937 gen(303);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = ts::random_unit_f32(gen, 6);
    const auto a_star = ts::random_unit_f32(gen, 6);
    const auto b = ts::random_unit_f32(gen, 6);
    const auto b_star = ts::random_unit_f32(gen, 6);
    const auto d = embeval::decompose_delta(a, a_star, b, b_star);
    const double expected = ts::oracle_dot(ts::widen(b), ts::widen(b_star)) - 1.0;
    CHECK(d.start_offset * d.normalization == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("decompose_self: total is 1 and zero offset is pure within-pair") {
  std::mt19937 gen(404);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = ts::random_f32(gen, 5);
    const auto a_star = ts::random_f32(gen, 5);
    const auto b = ts::random_unit_f32(gen, 5);
    auto analogy = ts::widen(b);
    for (int i = 0; i < 5; ++i) analogy[i] += double(a_star[i]) - double(a[i]);
    if (ts::oracle_norm(analogy) < 1e-6) continue;
    const auto d = embeval::decompose_self(a, a_star, b);
    CHECK(d.total == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d.within_pair + d.offset_offset + d.offset_start ==
          doctest::Approx(1.0).epsilon(1e-6));
    // term magnitudes against direct evaluation
    std::vector<double> offset(5);
    for (int i = 0; i < 5; ++i) offset[i] = double(a_star[i]) - double(a[i]);
    const double z = ts::oracle_dot(analogy, analogy);
    CHECK(d.within_pair ==
          doctest::Approx(ts::oracle_dot(ts::widen(b), analogy) / z).epsilon(1e-6));
    CHECK(d.offset_offset ==
          doctest::Approx(ts::oracle_dot(offset, offset) / z).epsilon(1e-6));
  }

  const std::vector<float> same = {0.5f, 0.5f};
  const std::vector<float> b_only = {0.0f, 2.0f};
  const auto d = embeval::decompose_self(same, same, b_only);
  CHECK(d.within_pair == doctest::Approx(1.0));
  CHECK(d.offset_offset == doctest::Approx(0.0));
  CHECK(d.offset_start == doctest::Approx(0.0));
}

TEST_CASE("decompositions reject degenerate norms") {
  const std::vector<float> zero = {0, 0};
  const std::vector<float> e1 = {1, 0};
  // b + o_a = 0
  CHECK_THROWS_AS(embeval::decompose_score(e1, zero, e1, e1), std::invalid_argument);
  // b* = 0
  CHECK_THROWS_AS(embeval::decompose_score(e1, e1, e1, zero), std::invalid_argument);
  // b = 0 in the delta decomposition
  const std::vector<float> half = {0.5f, 0.5f};
  CHECK_THROWS_AS(embeval::decompose_delta(e1, half, zero, e1),
                  std::invalid_argument);
  CHECK_THROWS_AS(embeval::decompose_self(e1, zero, e1), std::invalid_argument);
}
