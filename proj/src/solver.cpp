#include "lapmm/solver.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>

#include "lapmm/error.hpp"
#include "lapmm/io.hpp"

namespace lapmm {

bool SolveTrace::is_monotone(double slack) const {
  std::optional<double> prev = initial_objective;
  for (const IterationRecord& rec : iterations) {
    if (!rec.objective) continue;
    if (prev && *rec.objective > *prev + slack) return false;
    prev = rec.objective;
  }
  return true;
}

Vector residual(const WeightedLaplacian& L, const DiagonalMajorizer& Lhat, const Vector& x_prev,
                const Vector& x_cur) {
  require(x_prev.size() == L.size() && x_cur.size() == L.size() && Lhat.size() == L.size(),
          ErrorCode::kDimensionMismatch, "residual: sizes differ");
  const Vector d = x_prev - x_cur;
  return Lhat.alpha.cwiseProduct(d) - matvec(L, d);
}

double majorizer_gap_frobenius(const WeightedLaplacian& L, const DiagonalMajorizer& Lhat) {
  require(Lhat.size() == L.size(), ErrorCode::kDimensionMismatch, "majorizer size");
  double sum = (Lhat.alpha - L.diagonal()).squaredNorm();
  for (const Edge& e : L.edges()) sum += 2.0 * e.weight * e.weight;
  return std::sqrt(sum);
}

double stopping_threshold(double gap_frobenius, const Vector& x, const SolveOptions& opts) {
  return opts.eps_abs + opts.eps_rel * (gap_frobenius + x.norm());
}

double stopping_threshold(const DiagonalMajorizer& Lhat, const WeightedLaplacian& L,
                          const Vector& x, const SolveOptions& opts) {
  return stopping_threshold(majorizer_gap_frobenius(L, Lhat), x, opts);
}

double full_objective(const WeightedLaplacian& L, const BlockPartition& partition,
                      const BlockProblem& problem, const Vector& x) {
  require(x.size() == L.size() && partition.total() == L.size(), ErrorCode::kDimensionMismatch,
          "full_objective: sizes differ");
  double f = 0.0;
  for (Index b = 0; b < partition.num_blocks(); ++b) {
    const double fb = problem.objective(b, partition.block(x, b));
    if (fb == kInfinity) return kInfinity;
    f += fb;
  }
  return f + dirichlet_energy(L, x);
}

namespace {

void check_options(const SolveOptions& opts) {
  require(opts.eps_abs > 0.0, ErrorCode::kInvalidArgument, "eps_abs must be positive");
  require(opts.eps_rel >= 0.0, ErrorCode::kInvalidArgument, "eps_rel must be nonnegative");
  require(opts.max_iter >= 1, ErrorCode::kInvalidArgument, "max_iter must be at least 1");
  require(opts.workers >= 1, ErrorCode::kInvalidArgument, "workers must be at least 1");
}

// Step 2: every block reads x_cur and h, writes its own slice of x_next.
void update_blocks(const BlockPartition& partition, const DiagonalMajorizer& Lhat,
                   const BlockProblem& problem, const Vector& x_cur, const Vector& h,
                   Vector& x_next, int workers) {
  const Index p = partition.num_blocks();
  std::vector<std::exception_ptr> errors(static_cast<size_t>(p));

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (Index b = 0; b < p; ++b) {
    try {
      Vector xb = problem.update(b, partition.block(x_cur, b), partition.block(h, b),
                                 partition.block(Lhat.alpha, b));
      if (xb.size() != partition.block_size(b)) {
        throw BlockUpdateFailure(b, "update returned a vector of the wrong length");
      }
      if (!xb.allFinite()) throw BlockUpdateFailure(b, "update returned a non-finite value");
      partition.block(x_next, b) = xb;
    } catch (...) {
      errors[static_cast<size_t>(b)] = std::current_exception();
    }
  }

  // Lowest failing block wins so the reported error is independent of scheduling.
  for (Index b = 0; b < p; ++b) {
    if (!errors[static_cast<size_t>(b)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<size_t>(b)]);
    } catch (const BlockUpdateFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw BlockUpdateFailure(b, e.what());
    }
  }
}

}  // namespace

SolveResult solve(const WeightedLaplacian& L, const BlockPartition& partition,
                  const DiagonalMajorizer& Lhat, const BlockProblem& problem,
                  const std::optional<Vector>& x0, const SolveOptions& opts) {
  check_options(opts);
  require(partition.total() == L.size(), ErrorCode::kDimensionMismatch,
          "partition does not cover the Laplacian");
  require(Lhat.size() == L.size(), ErrorCode::kDimensionMismatch, "majorizer size");

  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  Vector& x_cur = result.x;
  if (x0) {
    require(x0->size() == L.size(), ErrorCode::kDimensionMismatch, "x0 length");
    x_cur = *x0;
  } else {
    x_cur.resize(L.size());
    for (Index b = 0; b < partition.num_blocks(); ++b) {
      partition.block(x_cur, b) = problem.feasible_start(b);
    }
  }
  const double f0 = full_objective(L, partition, problem, x_cur);
  require(f0 < kInfinity, ErrorCode::kInfeasibleStart, "f(x0) is +inf");
  if (opts.record_objective) result.trace.initial_objective = f0;

  const double gap = majorizer_gap_frobenius(L, Lhat);
  Vector x_next(L.size());
  for (int k = 1; k <= opts.max_iter; ++k) {
    const Vector h = matvec(L, x_cur);
    update_blocks(partition, Lhat, problem, x_cur, h, x_next, opts.workers);
    const Vector r = residual(L, Lhat, x_cur, x_next);
    x_cur.swap(x_next);

    IterationRecord rec;
    rec.iter = k;
    rec.residual_norm = r.norm();
    if (opts.record_objective) rec.objective = full_objective(L, partition, problem, x_cur);
    rec.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    result.trace.iterations.push_back(rec);

    result.trace.threshold = stopping_threshold(gap, x_cur, opts);
    if (k >= 2 && rec.residual_norm <= result.trace.threshold) {
      result.trace.status = SolveStatus::kConverged;
      return result;
    }
  }
  result.trace.status = SolveStatus::kMaxIter;
  return result;
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace, bool include_timing) {
  out << "iter,residual_norm,objective,elapsed_ms\n";
  for (const IterationRecord& rec : trace.iterations) {
    out << rec.iter << ',' << format_double(rec.residual_norm) << ',';
    if (rec.objective) out << format_double(*rec.objective);
    out << ',';
    if (include_timing) out << format_double(rec.elapsed_ms);
    out << '\n';
  }
}

}  // namespace lapmm
