#include "lapmm/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "lapmm/error.hpp"
#include "lapmm/solver.hpp"

namespace lapmm {

OracleResult dense_kkt_reference(const DenseQp& qp) {
  const Index n = qp.Q.rows();
  const Index m = qp.A.rows();
  require(qp.Q.cols() == n && qp.c.size() == n && (m == 0 || qp.A.cols() == n) &&
              qp.b.size() == m,
          ErrorCode::kDimensionMismatch, "dense QP dimensions");
  Matrix kkt = Matrix::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = qp.Q;
  if (m > 0) {
    kkt.topRightCorner(n, m) = qp.A.transpose();
    kkt.bottomLeftCorner(m, n) = qp.A;
  }
  Vector rhs(n + m);
  rhs << -qp.c, qp.b;

  Eigen::FullPivLU<Matrix> lu(kkt);
  require(lu.isInvertible(), ErrorCode::kSingularKkt,
          "KKT matrix has rank " + std::to_string(lu.rank()) + " of " +
              std::to_string(n + m));
  const Vector sol = lu.solve(rhs);

  OracleResult result;
  result.x_star = sol.head(n);
  result.objective = qp.objective(result.x_star);
  Vector stationarity = qp.Q * result.x_star + qp.c;
  if (m > 0) stationarity += qp.A.transpose() * sol.tail(m);
  result.certificate = stationarity.lpNorm<Eigen::Infinity>();
  if (m > 0) {
    result.certificate =
        std::max(result.certificate, (qp.A * result.x_star - qp.b).lpNorm<Eigen::Infinity>());
  }
  return result;
}

namespace {

Vector prox_step(const BlockPartition& partition, const BlockProblem& problem, const Vector& v,
                 double step) {
  Vector out(v.size());
  for (Index b = 0; b < partition.num_blocks(); ++b) {
    const Index nb = partition.block_size(b);
    partition.block(out, b) = problem.update(b, partition.block(v, b), Vector::Zero(nb),
                                             Vector::Constant(nb, 1.0 / step));
  }
  return out;
}

}  // namespace

OracleResult proximal_gradient_reference(const WeightedLaplacian& L,
                                         const BlockPartition& partition,
                                         const BlockProblem& problem,
                                         const ProxGradientOptions& opts,
                                         const std::optional<Vector>& x0) {
  require(partition.total() == L.size(), ErrorCode::kDimensionMismatch,
          "partition does not cover the Laplacian");
  require(opts.iters >= 1, ErrorCode::kInvalidArgument, "iters must be positive");

  double step = opts.step;
  if (step <= 0.0) {
    const double lmax =
        L.edges().empty()
            ? 0.0
            : Eigen::SelfAdjointEigenSolver<Matrix>(L.to_dense(), Eigen::EigenvaluesOnly)
                  .eigenvalues()
                  .maxCoeff();
    step = lmax > 0.0 ? 0.99 / lmax : 1.0;
  }

  Vector x(L.size());
  if (x0) {
    x = *x0;
  } else {
    for (Index b = 0; b < partition.num_blocks(); ++b) {
      partition.block(x, b) = problem.feasible_start(b);
    }
  }
  const double f_start = full_objective(L, partition, problem, x);
  require(f_start < kInfinity, ErrorCode::kInfeasibleStart, "oracle start is infeasible");

  OracleResult best;
  best.x_star = x;
  best.objective = f_start;

  Vector y = x;
  double f_x = f_start;
  double momentum = 1.0;
  int above_start = 0;
  for (int it = 1; it <= opts.iters; ++it) {
    const Vector x_next = prox_step(partition, problem, y - step * matvec(L, y), step);
    const double f_next = full_objective(L, partition, problem, x_next);

    if (opts.accelerate && f_next > f_x && momentum > 1.0) {
      // Restart: drop momentum and retake a plain step from x.
      momentum = 1.0;
      y = x;
      continue;
    }
    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = opts.accelerate ? Vector(x_next + ((momentum - 1.0) / momentum_next) * (x_next - x))
                        : x_next;
    momentum = momentum_next;
    x = x_next;
    f_x = f_next;

    if (f_x < best.objective) {
      best.objective = f_x;
      best.x_star = x;
      best.iterations = it;
    }
    above_start = f_x > f_start + 1e-12 * (1.0 + std::abs(f_start)) ? above_start + 1 : 0;
    require(above_start < 50, ErrorCode::kNoProgress,
            "objective stayed above its starting value; step too long?");
  }

  // Residual of one plain step from the best point: g + L x+ with g in the prox subdifferential.
  const Vector x_plus =
      prox_step(partition, problem, best.x_star - step * matvec(L, best.x_star), step);
  const Vector d = best.x_star - x_plus;
  best.certificate = (d / step - matvec(L, d)).lpNorm<Eigen::Infinity>();
  return best;
}

}  // namespace lapmm
