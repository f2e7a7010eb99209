#pragma once

// Dense-vector kernels: dot products, norms, unit normalization, cosine
// similarity, and batched cosine of one query against a row-major matrix.
// Storage is float32; every accumulation runs in double so that the scalar
// and batched paths agree and argmax scans over large vocabularies are not
// perturbed by summation order.

#include <cstddef>
#include <span>
#include <vector>

namespace embeval::linalg {

using Vec = std::vector<double>;

namespace detail {
double dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64_f32(const double* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
}  // namespace detail

void check_same_dim(std::size_t a, std::size_t b);

double dot(std::span<const float> x, std::span<const float> y);
double dot(std::span<const double> x, std::span<const float> y);
double dot(std::span<const double> x, std::span<const double> y);

double norm(std::span<const float> x);
double norm(std::span<const double> x);

// cosine(x, y), clamped to [-1, 1]. Throws on dimension mismatch or a
// zero-norm input.
double cosine(std::span<const float> x, std::span<const float> y);
double cosine(std::span<const double> x, std::span<const double> y);
double cosine(std::span<const double> x, std::span<const float> y);

// x / ||x||; throws on zero norm.
Vec unit(std::span<const float> x);
Vec unit(std::span<const double> x);

// One cosine per matrix row, in row order. `matrix` holds `rows` contiguous
// rows of `dim` floats; `row_norms[i]` must be the Euclidean norm of row i.
// A zero-norm row is reported as a degenerate-vector error, never a silent 0.
std::vector<double> batch_cosine(std::span<const double> query,
                                 std::span<const float> matrix,
                                 std::size_t rows, std::size_t dim,
                                 std::span<const double> row_norms);
std::vector<double> batch_cosine(std::span<const float> query,
                                 std::span<const float> matrix,
                                 std::size_t rows, std::size_t dim,
                                 std::span<const double> row_norms);

double clamp_cosine(double value);

}  // namespace embeval::linalg
