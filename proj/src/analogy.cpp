#include "embeval/analogy.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>

#include "embeval/linalg.hpp"

namespace embeval {

using linalg::Vec;

namespace {

Vec to_vec(std::span<const float> x) {
  return Vec(x.begin(), x.end());
}

Vec subtract(std::span<const float> x, std::span<const float> y) {
  linalg::check_same_dim(x.size(), y.size());
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = static_cast<double>(x[i]) - static_cast<double>(y[i]);
  }
  return out;
}

Vec add(std::span<const float> x, const Vec& y) {
  linalg::check_same_dim(x.size(), y.size());
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = static_cast<double>(x[i]) + y[i];
  }
  return out;
}

struct QuadGeometry {
  Vec offset_a;   // a* - a
  Vec offset_b;   // b* - b
  Vec analogy;    // b + o_a
  double norm_analogy;
  double norm_b;
  double norm_b_star;
  double z;       // ||b + o_a|| * ||b*||
};

QuadGeometry geometry(std::span<const float> a, std::span<const float> a_star,
                      std::span<const float> b, std::span<const float> b_star) {
  QuadGeometry g;
  g.offset_a = subtract(a_star, a);
  g.offset_b = subtract(b_star, b);
  g.analogy = add(b, g.offset_a);
  g.norm_analogy = linalg::norm(std::span<const double>(g.analogy));
  g.norm_b = linalg::norm(b);
  g.norm_b_star = linalg::norm(b_star);
  if (g.norm_analogy == 0.0) {
    throw std::invalid_argument("degenerate analogy point: b + a* - a has zero norm");
  }
  if (g.norm_b_star == 0.0) {
    throw std::invalid_argument("degenerate vector: b* has zero norm");
  }
  g.z = g.norm_analogy * g.norm_b_star;
  return g;
}

// Runs fn(worker_index, n_workers) on each worker; every worker owns a fixed
// slice of the output, so results are independent of scheduling.
template <class Fn>
void parallel_workers(std::size_t max_useful, Fn&& fn) {
  const std::size_t hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::max<std::size_t>(1, std::min(hw, max_useful));
  if (workers <= 1) {
    fn(0, 1);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers] { fn(w, workers); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

ScoreDecomposition decompose_score(std::span<const float> a,
                                   std::span<const float> a_star,
                                   std::span<const float> b,
                                   std::span<const float> b_star) {
  const QuadGeometry g = geometry(a, a_star, b, b_star);
  ScoreDecomposition d;
  d.normalization = g.z;
  d.within_pair = linalg::dot(std::span<const float>(b), b_star) / g.z;
  d.offset_offset = linalg::dot(std::span<const double>(g.offset_a), g.offset_b) / g.z;
  d.offset_start = linalg::dot(std::span<const double>(g.offset_a), b) / g.z;
  d.total = linalg::clamp_cosine(
      linalg::dot(std::span<const double>(g.analogy), b_star) / g.z);
  return d;
}

ScoreDecomposition decompose_score(const AnalogyQuad& quad) {
  return decompose_score(quad.va(), quad.va_star(), quad.vb(), quad.vb_star());
}

DeltaDecomposition decompose_delta(std::span<const float> a,
                                   std::span<const float> a_star,
                                   std::span<const float> b,
                                   std::span<const float> b_star) {
  const QuadGeometry g = geometry(a, a_star, b, b_star);
  if (g.norm_b == 0.0) {
    throw std::invalid_argument("degenerate vector: b has zero norm");
  }
  const double analogy_dot_b = linalg::dot(std::span<const double>(g.analogy), b);
  const double analogy_dot_b_star =
      linalg::dot(std::span<const double>(g.analogy), b_star);
  DeltaDecomposition d;
  d.normalization = g.z;
  d.norm_term = (g.norm_b - g.norm_b_star) / g.norm_b * analogy_dot_b / g.z;
  d.offset_offset = linalg::dot(std::span<const double>(g.offset_a), g.offset_b) / g.z;
  d.start_offset = linalg::dot(std::span<const double>(g.offset_b), b) / g.z;
  d.delta_sim = analogy_dot_b_star / (g.norm_analogy * g.norm_b_star) -
                analogy_dot_b / (g.norm_analogy * g.norm_b);
  return d;
}

DeltaDecomposition decompose_delta(const AnalogyQuad& quad) {
  return decompose_delta(quad.va(), quad.va_star(), quad.vb(), quad.vb_star());
}

ScoreDecomposition decompose_self(std::span<const float> a,
                                  std::span<const float> a_star,
                                  std::span<const float> b) {
  const Vec offset_a = subtract(a_star, a);
  const Vec analogy = add(b, offset_a);
  const double norm_analogy = linalg::norm(std::span<const double>(analogy));
  if (norm_analogy == 0.0) {
    throw std::invalid_argument("degenerate analogy point: b + a* - a has zero norm");
  }
  const double z = norm_analogy * norm_analogy;
  ScoreDecomposition d;
  d.normalization = z;
  d.within_pair = linalg::dot(std::span<const double>(analogy), b) / z;
  d.offset_offset =
      linalg::dot(std::span<const double>(offset_a), offset_a) / z;
  d.offset_start = linalg::dot(std::span<const double>(offset_a), b) / z;
  d.total = linalg::clamp_cosine(
      linalg::dot(std::span<const double>(analogy), analogy) / z);
  return d;
}

namespace {

// Scan core shared by predict() and accuracy(); returns the winning row.
std::size_t argmax_row(const EmbeddingTable& table, const Vec& query,
                       std::span<const std::size_t> excluded) {
  const double qn = linalg::norm(std::span<const double>(query));
  if (qn == 0.0) {
    throw std::invalid_argument("degenerate analogy query: b + a* - a has zero norm");
  }
  const std::size_t rows = table.size();
  const std::size_t dim = table.dim();
  const float* data = table.data().data();
  std::span<const double> norms = table.row_norms();
  double best = -2.0;
  std::size_t best_row = rows;
  for (std::size_t r = 0; r < rows; ++r) {
    bool skip = false;
    for (std::size_t e : excluded) skip = skip || (e == r);
    if (skip) continue;
    if (norms[r] == 0.0) {
      throw std::invalid_argument("degenerate vector: vocabulary row \"" +
                                  table.word(r) + "\" has zero norm");
    }
    const double s = linalg::detail::dot_f64_f32(query.data(), data + r * dim, dim) /
                     norms[r];
    if (s > best) {
      best = s;
      best_row = r;
    }
  }
  if (best_row == rows) {
    throw std::invalid_argument("no candidate rows remain after exclusion");
  }
  return best_row;
}

Vec analogy_query(const AnalogyQuad& quad) {
  Vec query = subtract(quad.va_star(), quad.va());
  const auto b = quad.vb();
  for (std::size_t i = 0; i < query.size(); ++i) {
    query[i] += static_cast<double>(b[i]);
  }
  return query;
}

std::size_t predict_row(const EmbeddingTable& table, const AnalogyQuad& quad,
                        TestMode mode) {
  const Vec query = analogy_query(quad);
  if (mode == TestMode::Normal) {
    const std::size_t excluded[3] = {quad.a_row(), quad.a_star_row(), quad.b_row()};
    return argmax_row(table, query, excluded);
  }
  return argmax_row(table, query, {});
}

}  // namespace

std::string predict(const EmbeddingTable& table, const AnalogyQuad& quad,
                    TestMode mode) {
  return table.word(predict_row(table, quad, mode));
}

std::optional<double> accuracy(const EmbeddingTable& table,
                               const ResolvedRelation& resolved, TestMode mode) {
  if (resolved.size() < 2) return std::nullopt;
  const auto quads = enumerate_quads(resolved);
  const std::size_t nq = quads.size();
  const std::size_t rows = table.size();
  const std::size_t dim = table.dim();
  const float* data = table.data().data();
  const std::span<const double> norms = table.row_norms();

  std::vector<Vec> queries(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    queries[i] = analogy_query(quads[i]);
    if (linalg::norm(std::span<const double>(queries[i])) == 0.0) {
      throw std::invalid_argument(
          "degenerate analogy query: b + a* - a has zero norm");
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (norms[r] == 0.0) {
      throw std::invalid_argument("degenerate vector: vocabulary row \"" +
                                  table.word(r) + "\" has zero norm");
    }
  }

  std::vector<double> best(nq, -2.0);
  std::vector<std::size_t> best_row(nq, rows);

  // Rows are scanned in cache-sized blocks shared by all quads, so the table
  // streams from memory once rather than once per quad. Each quad keeps its
  // own running argmax; rows ascend, so strict improvement preserves the
  // lowest-index tie-break.
  constexpr std::size_t kBlockRows = 512;
  parallel_workers(nq, [&](std::size_t w, std::size_t n_workers) {
    const std::size_t chunk = (nq + n_workers - 1) / n_workers;
    const std::size_t q_begin = w * chunk;
    const std::size_t q_end = std::min(nq, q_begin + chunk);
    for (std::size_t r0 = 0; r0 < rows; r0 += kBlockRows) {
      const std::size_t r1 = std::min(rows, r0 + kBlockRows);
      for (std::size_t q = q_begin; q < q_end; ++q) {
        const double* query = queries[q].data();
        const std::size_t ex0 = quads[q].a_row();
        const std::size_t ex1 = quads[q].a_star_row();
        const std::size_t ex2 = quads[q].b_row();
        const bool exclude = mode == TestMode::Normal;
        double q_best = best[q];
        std::size_t q_best_row = best_row[q];
        for (std::size_t r = r0; r < r1; ++r) {
          if (exclude && (r == ex0 || r == ex1 || r == ex2)) continue;
          const double s =
              linalg::detail::dot_f64_f32(query, data + r * dim, dim) / norms[r];
          if (s > q_best) {
            q_best = s;
            q_best_row = r;
          }
        }
        best[q] = q_best;
        best_row[q] = q_best_row;
      }
    }
  });

  std::size_t hits = 0;
  for (std::size_t q = 0; q < nq; ++q) {
    hits += best_row[q] == quads[q].b_star_row() ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(nq);
}

}  // namespace embeval
