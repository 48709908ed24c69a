#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lapmm/laplacian.hpp"
#include "lapmm/majorize.hpp"
#include "lapmm/solver.hpp"

namespace lapmm::covariance {

inline constexpr double kDefaultLambda = 0.053;
inline constexpr double kDefaultKappa = 0.08;

struct SymmetricEigen {
  Matrix Q;       // columns are eigenvectors
  Vector values;  // ascending
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most 1e-12 ||M||_F.
// Throws kNotSymmetric or kNoConvergence.
SymmetricEigen symmetric_eigen(const Matrix& M, int max_sweeps = 100);

// Minimizer of Tr((S + H) theta) - log det theta + kappa Tr(theta) + (alpha/2)||theta - theta_k||_F^2:
// theta = Q V Q^T where Q diag(lambda) Q^T = S + H + kappa I - alpha theta_k and
// v_j = (-lambda_j + sqrt(lambda_j^2 + 4 alpha)) / (2 alpha).
Matrix block_update(const Matrix& S, const Matrix& H, double kappa, double alpha,
                    const Matrix& theta_k);

// (S + kappa I)^{-1}
Matrix analytic_lambda_zero(const Matrix& S, double kappa);

// Common minimizer when every node is forced equal: (S_bar + kappa I)^{-1}, S_bar the mean of
// the node covariances.
Matrix analytic_lambda_inf(const std::vector<Matrix>& S, double kappa);

// Symmetric d x d matrix <-> d(d+1)/2 vector of its upper triangle (row-major), with
// off-diagonal entries scaled by sqrt(2) so the Euclidean norm equals the Frobenius norm.
Index sym_dim(Index d);
Vector vec_sym(const Matrix& M);
Matrix unvec_sym(const VectorRef& v, Index d);

struct CovInstance {
  Index rows = 0;
  Index cols = 0;
  Index d = 0;
  Index samples = 0;
  double kappa = kDefaultKappa;
  double lambda = kDefaultLambda;
  std::vector<Matrix> S;           // empirical covariances, node r * cols + c
  std::vector<Matrix> theta_true;  // true inverse covariances

  Index num_nodes() const { return rows * cols; }
};

// Four random corner covariances A A^T / d + 0.1 I, bilinear blending across the grid, then
// `samples` zero-mean Gaussian draws per node.
CovInstance generate_instance(Index rows, Index cols, Index d, Index samples,
                              std::uint64_t seed);

// f_i(theta) = Tr(S_i theta) - log det theta + kappa Tr(theta) on the vectorized coordinates.
// Block updates need a block-identity majorizer (alpha constant within each block).
class CovarianceProblem : public BlockProblem {
 public:
  CovarianceProblem(std::vector<Matrix> S, double kappa);

  Vector update(Index block, const VectorRef& x_k, const VectorRef& h,
                const VectorRef& alpha) const override;
  double objective(Index block, const VectorRef& x) const override;
  Vector feasible_start(Index block) const override;

  Index dim() const { return d_; }

 private:
  std::vector<Matrix> S_;
  double kappa_;
  Index d_;
};

struct CovLrmp {
  WeightedLaplacian L;  // grid Laplacian with weights 2 lambda, expanded over d(d+1)/2 coords
  BlockPartition partition;
  DiagonalMajorizer majorizer;
  std::shared_ptr<CovarianceProblem> problem;
};

CovLrmp build_problem(const CovInstance& inst, double lambda);

inline SolveOptions default_options() {
  SolveOptions opts;
  opts.eps_abs = 1e-5;
  opts.eps_rel = 1e-3;
  opts.max_iter = 5000;
  return opts;
}

struct CovSolution {
  std::vector<Matrix> theta;
  SolveTrace trace;
};

Vector stack_thetas(const std::vector<Matrix>& theta);
std::vector<Matrix> split_thetas(const Vector& x, Index nodes, Index d);

CovSolution solve_covariance(const CovInstance& inst, const SolveOptions& opts,
                             const std::optional<std::vector<Matrix>>& warm = std::nullopt);

// Root mean square over all nodes and all matrix entries.
double rmse(const std::vector<Matrix>& estimate, const std::vector<Matrix>& truth);

struct PathPoint {
  double lambda = 0.0;
  int iterations = 0;
  double rmse = 0.0;
  SolveStatus status = SolveStatus::kMaxIter;
  std::vector<Matrix> theta;
};

// Solves for every lambda in ascending order; with warm_start each solve starts from the
// previous solution.
std::vector<PathPoint> regularization_path(const CovInstance& inst,
                                           const std::vector<double>& lambdas, bool warm_start,
                                           const SolveOptions& opts);

// `count` values spaced logarithmically from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace lapmm::covariance
