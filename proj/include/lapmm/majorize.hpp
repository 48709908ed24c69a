#pragma once

#include "lapmm/laplacian.hpp"

namespace lapmm {

enum class MajorizerRule { kDiagonal, kSpectral, kBlockIdentity, kGeneralQuadratic };

// Lhat = diag(alpha) with Lhat - L positive definite.
struct DiagonalMajorizer {
  Vector alpha;
  MajorizerRule rule = MajorizerRule::kDiagonal;

  Index size() const { return alpha.size(); }
};

inline constexpr double kDefaultFactor = 3.0;

// 1e-6 * (1 + max_i L_ii); used for rows with no coupling.
double default_floor(const WeightedLaplacian& L);

// alpha_i = max(factor * L_ii, floor). Needs factor > 2 and floor > 0.
DiagonalMajorizer diagonal_majorizer(const WeightedLaplacian& L, double factor = kDefaultFactor);
DiagonalMajorizer diagonal_majorizer(const WeightedLaplacian& L, double factor, double floor);

struct PowerIterationResult {
  double lambda_max = 0.0;
  int iterations = 0;
};

// Largest eigenvalue of L by power iteration; the start vector is a fixed pseudo-random
// vector so results are reproducible. Stops when the Rayleigh quotient changes by at most
// tol relative.
PowerIterationResult power_iteration(const WeightedLaplacian& L, double tol, int max_iter);

// alpha = max(2 lambda_max (1 + 1e-7), floor) on every coordinate. The small margin covers the
// power iteration underestimating lambda_max.
DiagonalMajorizer spectral_majorizer(const WeightedLaplacian& L, double tol = 1e-10,
                                     int max_iter = 100000);

// alpha constant on each block: max(factor * max_{j in block} L_jj, floor).
DiagonalMajorizer block_identity_majorizer(const WeightedLaplacian& L,
                                           const BlockPartition& partition,
                                           double factor = kDefaultFactor);
DiagonalMajorizer block_identity_majorizer(const WeightedLaplacian& L,
                                           const BlockPartition& partition, double factor,
                                           double floor);

// Row-absolute-sum rule for an arbitrary symmetric PSD Q: alpha_i = (1 + margin) sum_j |Q_ij|,
// with zero rows lifted to 1e-6 * (1 + max_i |Q_ii|).
DiagonalMajorizer general_quadratic_majorizer(const Matrix& Q, double margin);

// (1/2) z^T L z + (Lz)^T (x - z) + (1/2)(x - z)^T Lhat (x - z)
double majorizer_value(const WeightedLaplacian& L, const DiagonalMajorizer& Lhat, const Vector& x,
                       const Vector& z);

}  // namespace lapmm
