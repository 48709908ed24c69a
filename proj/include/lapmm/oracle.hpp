#pragma once

#include <optional>

#include "lapmm/laplacian.hpp"

namespace lapmm {

class BlockProblem;

struct OracleResult {
  Vector x_star;
  double objective = 0.0;
  double certificate = 0.0;  // max-norm stationarity violation
  int iterations = 0;
};

// minimize (1/2) x^T Q x + c^T x + constant  s.t.  A x = b
struct DenseQp {
  Matrix Q;
  Vector c;
  double constant = 0.0;
  Matrix A;
  Vector b;

  double objective(const Vector& x) const { return 0.5 * x.dot(Q * x) + c.dot(x) + constant; }
};

// Full KKT system solved by dense LU. kSingularKkt when the system is rank deficient.
OracleResult dense_kkt_reference(const DenseQp& qp);

struct ProxGradientOptions {
  double step = 0.0;  // 0 picks 0.99 / lambda_max(L) from a dense eigensolve
  int iters = 20000;
  bool accelerate = true;
};

// Accelerated proximal gradient on F = f + (1/2) x^T L x with adaptive restart: a forward
// step on the Laplacian term and a backward step on f, the latter through BlockProblem::update
// with h = 0 and alpha = 1/step (the prox at uniform scaling). Returns the best iterate.
// Throws kNoProgress when the objective stays above its starting value for many consecutive
// iterations, which signals a step that is too long.
OracleResult proximal_gradient_reference(const WeightedLaplacian& L,
                                         const BlockPartition& partition,
                                         const BlockProblem& problem,
                                         const ProxGradientOptions& opts,
                                         const std::optional<Vector>& x0 = std::nullopt);

}  // namespace lapmm
