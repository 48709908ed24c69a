#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "lapmm/laplacian.hpp"
#include "lapmm/majorize.hpp"

namespace lapmm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using VectorRef = Eigen::Ref<const Vector>;

// Block-separable f = sum_i f_i(x_i). Implementations must tolerate concurrent calls on
// distinct block indices.
class BlockProblem {
 public:
  virtual ~BlockProblem() = default;

  // argmin_x f_i(x) + (1/2)(x - x_k)^T diag(alpha)(x - x_k) + h^T x
  virtual Vector update(Index block, const VectorRef& x_k, const VectorRef& h,
                        const VectorRef& alpha) const = 0;

  // f_i(x), +inf outside the domain.
  virtual double objective(Index block, const VectorRef& x) const = 0;

  virtual Vector feasible_start(Index block) const = 0;
};

struct SolveOptions {
  double eps_abs = 1e-6;
  double eps_rel = 0.0;
  int max_iter = 1000;
  int workers = 1;
  bool record_objective = true;
};

enum class SolveStatus { kConverged, kMaxIter };

struct IterationRecord {
  int iter = 0;
  double residual_norm = 0.0;
  std::optional<double> objective;
  double elapsed_ms = 0.0;
};

struct SolveTrace {
  std::vector<IterationRecord> iterations;
  std::optional<double> initial_objective;
  double threshold = 0.0;  // stopping tolerance at exit
  SolveStatus status = SolveStatus::kMaxIter;

  int num_iterations() const { return static_cast<int>(iterations.size()); }
  double final_residual() const {
    return iterations.empty() ? 0.0 : iterations.back().residual_norm;
  }
  std::optional<double> final_objective() const {
    return iterations.empty() ? initial_objective : iterations.back().objective;
  }
  // True when the recorded objective never increases by more than slack.
  bool is_monotone(double slack = 1e-9) const;
};

struct SolveResult {
  Vector x;
  SolveTrace trace;
};

// (Lhat - L)(x_prev - x_cur)
Vector residual(const WeightedLaplacian& L, const DiagonalMajorizer& Lhat, const Vector& x_prev,
                const Vector& x_cur);

// ||Lhat - L||_F, constant for a solve.
double majorizer_gap_frobenius(const WeightedLaplacian& L, const DiagonalMajorizer& Lhat);

// eps_abs + eps_rel (||Lhat - L||_F + ||x||_2)
double stopping_threshold(double gap_frobenius, const Vector& x, const SolveOptions& opts);
double stopping_threshold(const DiagonalMajorizer& Lhat, const WeightedLaplacian& L,
                          const Vector& x, const SolveOptions& opts);

// sum_i f_i(x_i) + (1/2) x^T L x; +inf dominates.
double full_objective(const WeightedLaplacian& L, const BlockPartition& partition,
                      const BlockProblem& problem, const Vector& x);

// Distributed MM. Iteration k applies the k-th parallel block update x^{k-1} -> x^k and
// records r^k = (Lhat - L)(x^{k-1} - x^k), the optimality residual of x^k. Stops once k >= 2
// and ||r^k|| <= eps; returns x^k.
SolveResult solve(const WeightedLaplacian& L, const BlockPartition& partition,
                  const DiagonalMajorizer& Lhat, const BlockProblem& problem,
                  const std::optional<Vector>& x0, const SolveOptions& opts);

// Header: iter,residual_norm,objective,elapsed_ms. include_timing=false leaves the last
// column empty so output is reproducible byte for byte.
void write_trace_csv(std::ostream& out, const SolveTrace& trace, bool include_timing = true);

}  // namespace lapmm
