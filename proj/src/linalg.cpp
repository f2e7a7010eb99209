#include "embeval/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace embeval::linalg {

namespace detail {

// Four independent accumulator chains throughout: the fused-multiply-add
// latency chain, not bandwidth, limits a two-chain loop.

#if defined(__AVX512F__)

double dot_f32(const float* a, const float* b, std::size_t n) {
  __m512d acc0 = _mm512_setzero_pd(), acc1 = _mm512_setzero_pd();
  __m512d acc2 = _mm512_setzero_pd(), acc3 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    acc0 = _mm512_fmadd_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i)),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i)), acc0);
    acc1 = _mm512_fmadd_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i + 8)),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i + 8)), acc1);
    acc2 = _mm512_fmadd_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i + 16)),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i + 16)), acc2);
    acc3 = _mm512_fmadd_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i + 24)),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i + 24)), acc3);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm512_fmadd_pd(_mm512_cvtps_pd(_mm256_loadu_ps(a + i)),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i)), acc0);
  }
  double s = _mm512_reduce_add_pd(
      _mm512_add_pd(_mm512_add_pd(acc0, acc1), _mm512_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double dot_f64_f32(const double* a, const float* b, std::size_t n) {
  __m512d acc0 = _mm512_setzero_pd(), acc1 = _mm512_setzero_pd();
  __m512d acc2 = _mm512_setzero_pd(), acc3 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i)), acc0);
    acc1 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 8),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i + 8)), acc1);
    acc2 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 16),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i + 16)), acc2);
    acc3 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 24),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i + 24)), acc3);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i),
                           _mm512_cvtps_pd(_mm256_loadu_ps(b + i)), acc0);
  }
  double s = _mm512_reduce_add_pd(
      _mm512_add_pd(_mm512_add_pd(acc0, acc1), _mm512_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * static_cast<double>(b[i]);
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m512d acc0 = _mm512_setzero_pd(), acc1 = _mm512_setzero_pd();
  __m512d acc2 = _mm512_setzero_pd(), acc3 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i), acc0);
    acc1 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 8), _mm512_loadu_pd(b + i + 8), acc1);
    acc2 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 16), _mm512_loadu_pd(b + i + 16), acc2);
    acc3 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 24), _mm512_loadu_pd(b + i + 24), acc3);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i), acc0);
  }
  double s = _mm512_reduce_add_pd(
      _mm512_add_pd(_mm512_add_pd(acc0, acc1), _mm512_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

#elif defined(__AVX2__)

static inline double hsum_pd(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

#if defined(__FMA__)
#define EMBEVAL_MADD(a, b, c) _mm256_fmadd_pd((a), (b), (c))
#else
#define EMBEVAL_MADD(a, b, c) _mm256_add_pd(_mm256_mul_pd((a), (b)), (c))
#endif

double dot_f32(const float* a, const float* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = EMBEVAL_MADD(_mm256_cvtps_pd(_mm_loadu_ps(a + i)),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i)), acc0);
    acc1 = EMBEVAL_MADD(_mm256_cvtps_pd(_mm_loadu_ps(a + i + 4)),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i + 4)), acc1);
    acc2 = EMBEVAL_MADD(_mm256_cvtps_pd(_mm_loadu_ps(a + i + 8)),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i + 8)), acc2);
    acc3 = EMBEVAL_MADD(_mm256_cvtps_pd(_mm_loadu_ps(a + i + 12)),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i + 12)), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = EMBEVAL_MADD(_mm256_cvtps_pd(_mm_loadu_ps(a + i)),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i)), acc0);
  }
  double s = hsum_pd(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double dot_f64_f32(const double* a, const float* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = EMBEVAL_MADD(_mm256_loadu_pd(a + i), _mm256_cvtps_pd(_mm_loadu_ps(b + i)), acc0);
    acc1 = EMBEVAL_MADD(_mm256_loadu_pd(a + i + 4),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i + 4)), acc1);
    acc2 = EMBEVAL_MADD(_mm256_loadu_pd(a + i + 8),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i + 8)), acc2);
    acc3 = EMBEVAL_MADD(_mm256_loadu_pd(a + i + 12),
                        _mm256_cvtps_pd(_mm_loadu_ps(b + i + 12)), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = EMBEVAL_MADD(_mm256_loadu_pd(a + i), _mm256_cvtps_pd(_mm_loadu_ps(b + i)), acc0);
  }
  double s = hsum_pd(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * static_cast<double>(b[i]);
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd(), acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = EMBEVAL_MADD(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = EMBEVAL_MADD(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = EMBEVAL_MADD(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = EMBEVAL_MADD(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = EMBEVAL_MADD(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum_pd(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

#undef EMBEVAL_MADD

#else  // scalar reference path, four independent chains

double dot_f32(const float* a, const float* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    s1 += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    s2 += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    s3 += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double dot_f64_f32(const double* a, const float* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * static_cast<double>(b[i]);
    s1 += a[i + 1] * static_cast<double>(b[i + 1]);
    s2 += a[i + 2] * static_cast<double>(b[i + 2]);
    s3 += a[i + 3] * static_cast<double>(b[i + 3]);
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * static_cast<double>(b[i]);
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

#endif

}  // namespace detail

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a) +
                                " vs " + std::to_string(b));
  }
}

double clamp_cosine(double value) {
  if (value > 1.0) return 1.0;
  if (value < -1.0) return -1.0;
  return value;
}

double dot(std::span<const float> x, std::span<const float> y) {
  check_same_dim(x.size(), y.size());
  return detail::dot_f32(x.data(), y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const float> y) {
  check_same_dim(x.size(), y.size());
  return detail::dot_f64_f32(x.data(), y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same_dim(x.size(), y.size());
  return detail::dot_f64(x.data(), y.data(), x.size());
}

double norm(std::span<const float> x) {
  return std::sqrt(detail::dot_f32(x.data(), x.data(), x.size()));
}

double norm(std::span<const double> x) {
  return std::sqrt(detail::dot_f64(x.data(), x.data(), x.size()));
}

namespace {

[[noreturn]] void throw_zero_norm() {
  throw std::invalid_argument("degenerate vector: zero norm");
}

template <class X, class Y>
double cosine_impl(X x, Y y) {
  check_same_dim(x.size(), y.size());
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) throw_zero_norm();
  return clamp_cosine(dot(x, y) / (nx * ny));
}

template <class X>
Vec unit_impl(X x) {
  const double n = norm(x);
  if (n == 0.0) throw_zero_norm();
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = static_cast<double>(x[i]) / n;
  }
  return out;
}

template <class Q>
std::vector<double> batch_cosine_impl(Q query, std::span<const float> matrix,
                                      std::size_t rows, std::size_t dim,
                                      std::span<const double> row_norms) {
  check_same_dim(query.size(), dim);
  const double qn = norm(query);
  if (qn == 0.0) throw_zero_norm();
  // Widening the query once keeps the hot loop down to one float-to-double
  // convert per row chunk; the products are bit-identical to the all-float
  // kernel since the widening itself is exact.
  const Vec wide(query.begin(), query.end());
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = matrix.data() + r * dim;
    if (row_norms[r] == 0.0) {
      throw std::invalid_argument("degenerate vector: matrix row " +
                                  std::to_string(r) + " has zero norm");
    }
    const double d = detail::dot_f64_f32(wide.data(), row, dim);
    out[r] = clamp_cosine(d / (qn * row_norms[r]));
  }
  return out;
}

}  // namespace

double cosine(std::span<const float> x, std::span<const float> y) {
  return cosine_impl(x, y);
}
double cosine(std::span<const double> x, std::span<const double> y) {
  return cosine_impl(x, y);
}
double cosine(std::span<const double> x, std::span<const float> y) {
  return cosine_impl(x, y);
}

Vec unit(std::span<const float> x) { return unit_impl(x); }
Vec unit(std::span<const double> x) { return unit_impl(x); }

std::vector<double> batch_cosine(std::span<const double> query,
                                 std::span<const float> matrix,
                                 std::size_t rows, std::size_t dim,
                                 std::span<const double> row_norms) {
  return batch_cosine_impl(query, matrix, rows, dim, row_norms);
}

std::vector<double> batch_cosine(std::span<const float> query,
                                 std::span<const float> matrix,
                                 std::size_t rows, std::size_t dim,
                                 std::span<const double> row_norms) {
  return batch_cosine_impl(query, matrix, rows, dim, row_norms);
}

}  // namespace embeval::linalg
