#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lapmm/laplacian.hpp"
#include "lapmm/oracle.hpp"
#include "lapmm/prox.hpp"
#include "lapmm/solver.hpp"

namespace lapmm::portfolio {

// Multi-period trading problem over periods t = 1..T with n assets, the last one cash:
//   minimize sum_t f_t(x_t) + (1/2)(x_t - x_{t-1})^T D_t (x_t - x_{t-1})
// with f_t(x) = -mu_t^T x + gamma x^T Sigma_t x + s_t^T (x)_- + I(1^T x = 1) for t < T and
// f_T = I(x = e_n). Per-period vectors below are indexed from 0, so mu[0] is mu_1.
struct PortfolioInstance {
  Index n = 0;
  Index T = 0;
  double gamma = 1.0;
  std::vector<Vector> mu;                // T - 1 expected returns
  std::vector<FactorQuadratic> sigma;    // T - 1 covariances, cash row/column zero
  std::vector<Vector> shorting;          // T - 1 shorting costs, cash entry zero
  std::vector<Vector> transaction;       // T diagonals D_1..D_T, cash entry zero
  Vector x0;                             // initial holdings, e_n by default
};

// Throws kInconsistentDimensions on size mismatches, kNegativeCostEntry on negative costs and
// kInvalidArgument when gamma <= 0 or the cash invariants fail.
void check_instance(const PortfolioInstance& inst);

// Tn x Tn block-tridiagonal Laplacian from D_2..D_T (costs.size() == T - 1); zero entries
// add no edge.
WeightedLaplacian chain_laplacian(const std::vector<Vector>& costs);

class PortfolioProblem : public BlockProblem {
 public:
  explicit PortfolioProblem(PortfolioInstance inst, AdmmOptions admm = {});

  Vector update(Index block, const VectorRef& x_k, const VectorRef& h,
                const VectorRef& alpha) const override;
  double objective(Index block, const VectorRef& x) const override;
  Vector feasible_start(Index block) const override;

  const PortfolioInstance& instance() const { return inst_; }

  // Smooth part of f_t plus the h^T x term, for t < T.
  SmoothQuadratic smooth_part(Index block, const Vector& h) const;

 private:
  PortfolioInstance inst_;
  AdmmOptions admm_;
  Vector cash_;
};

struct PortfolioLrmp {
  WeightedLaplacian L;
  BlockPartition partition;
  std::shared_ptr<PortfolioProblem> problem;
};

PortfolioLrmp build_problem(const PortfolioInstance& inst, AdmmOptions admm = {});

struct GeneratorOptions {
  Index n = 10;
  Index T = 4;
  Index factors = 3;
  std::uint64_t seed = 0;
  double gamma = 1000.0;
  bool shorting = true;  // false sets every s_t to zero
};

// Time-invariant random instance, reproducible from the seed. Expected returns are zero-mean
// normal with scale 1e-3 (cash 1e-5), factor loadings normal with scale 1e-2, idiosyncratic
// variances uniform in [1e-5, 1e-4], shorting costs uniform in [1e-4, 1e-3] and transaction
// costs uniform in [1e-3, 1e-2].
PortfolioInstance generate_instance(const GeneratorOptions& opts);

// Same problem as one dense equality-constrained QP over all Tn variables, built directly
// from the transaction-cost sum. Requires zero shorting costs.
DenseQp to_dense_qp(const PortfolioInstance& inst);

// Solution vector reshaped to T x n (row t is period t + 1).
Matrix weights_matrix(const PortfolioInstance& inst, const Vector& x);

// sum_t (1/2)(x_t - x_{t-1})^T D_t (x_t - x_{t-1}) evaluated term by term.
double transaction_cost(const PortfolioInstance& inst, const Vector& x);

}  // namespace lapmm::portfolio
