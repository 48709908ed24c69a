#include "lapmm/covariance.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "lapmm/error.hpp"

namespace lapmm::covariance {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void check_symmetric(const Matrix& M) {
  require(M.rows() == M.cols(), ErrorCode::kNotSymmetric, "matrix is not square");
  if (M.size() == 0) return;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorCode::kNotSymmetric,
          "matrix is not symmetric");
}

// Off-diagonal Frobenius norm.
double off_norm(const Matrix& A) {
  double sum = 0.0;
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      if (i != j) sum += A(i, j) * A(i, j);
    }
  }
  return std::sqrt(sum);
}

Matrix inverse_spd(const Matrix& M) {
  const SymmetricEigen eig = symmetric_eigen(M);
  return eig.Q * eig.values.cwiseInverse().asDiagonal() * eig.Q.transpose();
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& M, int max_sweeps) {
  check_symmetric(M);
  const Index d = M.rows();
  Matrix A = 0.5 * (M + M.transpose());
  Matrix V = Matrix::Identity(d, d);
  const double target = 1e-12 * A.norm();

  bool converged = off_norm(A) <= target;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (Index p = 0; p + 1 < d; ++p) {
      for (Index q = p + 1; q < d; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < d; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < d; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (Index k = 0; k < d; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = off_norm(A) <= target;
  }
  require(converged, ErrorCode::kNoConvergence,
          "Jacobi sweeps did not converge in " + std::to_string(max_sweeps) + " sweeps");

  std::vector<Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&A](Index a, Index b) { return A(a, a) < A(b, b); });
  SymmetricEigen eig;
  eig.Q.resize(d, d);
  eig.values.resize(d);
  for (Index k = 0; k < d; ++k) {
    eig.values[k] = A(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]);
    eig.Q.col(k) = V.col(order[static_cast<size_t>(k)]);
  }
  return eig;
}

Matrix block_update(const Matrix& S, const Matrix& H, double kappa, double alpha,
                    const Matrix& theta_k) {
  require(alpha > 0.0, ErrorCode::kInvalidArgument, "alpha must be positive");
  const Index d = S.rows();
  require(S.cols() == d && H.rows() == d && H.cols() == d && theta_k.rows() == d &&
              theta_k.cols() == d,
          ErrorCode::kDimensionMismatch, "block_update: matrix sizes");
  Matrix M = S + H - alpha * theta_k;
  M.diagonal().array() += kappa;
  const SymmetricEigen eig = symmetric_eigen(M);

  Vector v(d);
  for (Index j = 0; j < d; ++j) {
    const double lam = eig.values[j];
    const double root = std::sqrt(lam * lam + 4.0 * alpha);
    // Both forms equal the positive root of alpha v^2 + lam v - 1 = 0; pick the one without
    // cancellation.
    v[j] = lam >= 0.0 ? 2.0 / (lam + root) : (root - lam) / (2.0 * alpha);
  }
  Matrix theta = eig.Q * v.asDiagonal() * eig.Q.transpose();
  return 0.5 * (theta + theta.transpose());
}

Matrix analytic_lambda_zero(const Matrix& S, double kappa) {
  require(kappa > 0.0, ErrorCode::kInvalidArgument, "kappa must be positive");
  Matrix M = S;
  M.diagonal().array() += kappa;
  return inverse_spd(M);
}

Matrix analytic_lambda_inf(const std::vector<Matrix>& S, double kappa) {
  require(!S.empty(), ErrorCode::kInvalidArgument, "need at least one node");
  Matrix mean = Matrix::Zero(S.front().rows(), S.front().cols());
  for (const Matrix& s : S) mean += s;
  mean /= static_cast<double>(S.size());
  return analytic_lambda_zero(mean, kappa);
}

Index sym_dim(Index d) { return d * (d + 1) / 2; }

Vector vec_sym(const Matrix& M) {
  const Index d = M.rows();
  Vector v(sym_dim(d));
  Index k = 0;
  for (Index a = 0; a < d; ++a) {
    v[k++] = M(a, a);
    for (Index b = a + 1; b < d; ++b) v[k++] = kSqrt2 * M(a, b);
  }
  return v;
}

Matrix unvec_sym(const VectorRef& v, Index d) {
  require(v.size() == sym_dim(d), ErrorCode::kDimensionMismatch, "unvec_sym: vector length");
  Matrix M(d, d);
  Index k = 0;
  for (Index a = 0; a < d; ++a) {
    M(a, a) = v[k++];
    for (Index b = a + 1; b < d; ++b) {
      M(a, b) = v[k++] / kSqrt2;
      M(b, a) = M(a, b);
    }
  }
  return M;
}

CovInstance generate_instance(Index rows, Index cols, Index d, Index samples,
                              std::uint64_t seed) {
  require(rows >= 2 && cols >= 2 && d >= 1 && samples >= 1, ErrorCode::kInvalidArgument,
          "generator needs rows, cols >= 2, d >= 1, samples >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::array<Matrix, 4> corners;  // (0,0), (0,cols-1), (rows-1,0), (rows-1,cols-1)
  for (Matrix& c : corners) {
    Matrix A(d, d);
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < d; ++i) A(i, j) = normal(rng);
    }
    c = A * A.transpose() / static_cast<double>(d);
    c.diagonal().array() += 0.1;
    c = 0.5 * (c + c.transpose());
  }

  CovInstance inst;
  inst.rows = rows;
  inst.cols = cols;
  inst.d = d;
  inst.samples = samples;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const double u = static_cast<double>(r) / static_cast<double>(rows - 1);
      const double v = static_cast<double>(c) / static_cast<double>(cols - 1);
      Matrix cov = (1 - u) * (1 - v) * corners[0] + (1 - u) * v * corners[1] +
                   u * (1 - v) * corners[2] + u * v * corners[3];
      Eigen::LLT<Matrix> chol(cov);
      require(chol.info() == Eigen::Success, ErrorCode::kInvalidArgument,
              "node covariance is not positive definite");
      Matrix S = Matrix::Zero(d, d);
      Vector g(d);
      for (Index k = 0; k < samples; ++k) {
        for (Index i = 0; i < d; ++i) g[i] = normal(rng);
        const Vector z = chol.matrixL() * g;
        S.noalias() += z * z.transpose();
      }
      inst.S.push_back(S / static_cast<double>(samples));
      Matrix theta = chol.solve(Matrix::Identity(d, d));
      inst.theta_true.push_back(0.5 * (theta + theta.transpose()));
    }
  }
  return inst;
}

CovarianceProblem::CovarianceProblem(std::vector<Matrix> S, double kappa)
    : S_(std::move(S)), kappa_(kappa), d_(S_.empty() ? 0 : S_.front().rows()) {
  require(kappa_ > 0.0, ErrorCode::kInvalidArgument, "kappa must be positive");
  for (const Matrix& s : S_) {
    require(s.rows() == d_ && s.cols() == d_, ErrorCode::kDimensionMismatch,
            "covariances differ in size");
    check_symmetric(s);
  }
}

Vector CovarianceProblem::update(Index block, const VectorRef& x_k, const VectorRef& h,
                                 const VectorRef& alpha) const {
  const double a = alpha.maxCoeff();
  require(a - alpha.minCoeff() <= 1e-12 * a, ErrorCode::kInvalidArgument,
          "covariance blocks need a block-identity majorizer");
  const Matrix theta = block_update(S_[static_cast<size_t>(block)], unvec_sym(h, d_), kappa_, a,
                                    unvec_sym(x_k, d_));
  return vec_sym(theta);
}

double CovarianceProblem::objective(Index block, const VectorRef& x) const {
  const Matrix theta = unvec_sym(x, d_);
  Eigen::LLT<Matrix> chol(theta);
  if (chol.info() != Eigen::Success) return kInfinity;
  const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
  return S_[static_cast<size_t>(block)].cwiseProduct(theta).sum() + kappa_ * theta.trace() -
         log_det;
}

Vector CovarianceProblem::feasible_start(Index block) const {
  return vec_sym(analytic_lambda_zero(S_[static_cast<size_t>(block)], kappa_));
}

CovLrmp build_problem(const CovInstance& inst, double lambda) {
  require(lambda >= 0.0, ErrorCode::kInvalidArgument, "lambda must be nonnegative");
  require(static_cast<Index>(inst.S.size()) == inst.num_nodes(),
          ErrorCode::kInconsistentDimensions, "one covariance per grid node");
  const Index m = sym_dim(inst.d);
  // Weights 2 lambda so that (1/2) x^T L x = lambda sum ||theta_i - theta_j||_F^2.
  std::vector<Edge> edges;
  if (lambda > 0.0) edges = grid_graph(inst.rows, inst.cols, 2.0 * lambda);
  CovLrmp lrmp;
  lrmp.L = laplacian_from_edges(inst.num_nodes(), std::move(edges)).kron_identity(m);
  lrmp.partition = BlockPartition::uniform(inst.num_nodes(), m);
  lrmp.majorizer = block_identity_majorizer(lrmp.L, lrmp.partition);
  lrmp.problem = std::make_shared<CovarianceProblem>(inst.S, inst.kappa);
  return lrmp;
}

Vector stack_thetas(const std::vector<Matrix>& theta) {
  if (theta.empty()) return {};
  const Index m = sym_dim(theta.front().rows());
  Vector x(m * static_cast<Index>(theta.size()));
  for (size_t i = 0; i < theta.size(); ++i) {
    x.segment(static_cast<Index>(i) * m, m) = vec_sym(theta[i]);
  }
  return x;
}

std::vector<Matrix> split_thetas(const Vector& x, Index nodes, Index d) {
  const Index m = sym_dim(d);
  require(x.size() == nodes * m, ErrorCode::kDimensionMismatch, "stacked vector length");
  std::vector<Matrix> theta;
  theta.reserve(static_cast<size_t>(nodes));
  for (Index i = 0; i < nodes; ++i) theta.push_back(unvec_sym(x.segment(i * m, m), d));
  return theta;
}

CovSolution solve_covariance(const CovInstance& inst, const SolveOptions& opts,
                             const std::optional<std::vector<Matrix>>& warm) {
  const CovLrmp lrmp = build_problem(inst, inst.lambda);
  std::optional<Vector> x0;
  if (warm) {
    require(static_cast<Index>(warm->size()) == inst.num_nodes(),
            ErrorCode::kDimensionMismatch, "warm start needs one matrix per node");
    x0 = stack_thetas(*warm);
  }
  SolveResult res = solve(lrmp.L, lrmp.partition, lrmp.majorizer, *lrmp.problem, x0, opts);
  return {split_thetas(res.x, inst.num_nodes(), inst.d), std::move(res.trace)};
}

double rmse(const std::vector<Matrix>& estimate, const std::vector<Matrix>& truth) {
  require(estimate.size() == truth.size() && !truth.empty(), ErrorCode::kDimensionMismatch,
          "rmse: node counts differ");
  double sum = 0.0;
  double count = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    sum += (estimate[i] - truth[i]).squaredNorm();
    count += static_cast<double>(truth[i].size());
  }
  return std::sqrt(sum / count);
}

std::vector<PathPoint> regularization_path(const CovInstance& inst,
                                           const std::vector<double>& lambdas, bool warm_start,
                                           const SolveOptions& opts) {
  require(std::is_sorted(lambdas.begin(), lambdas.end()), ErrorCode::kInvalidArgument,
          "lambda grid must be ascending");
  std::vector<PathPoint> path;
  path.reserve(lambdas.size());
  CovInstance current = inst;
  for (double lambda : lambdas) {
    current.lambda = lambda;
    std::optional<std::vector<Matrix>> warm;
    if (warm_start && !path.empty()) warm = path.back().theta;
    CovSolution sol = solve_covariance(current, opts, warm);
    PathPoint point;
    point.lambda = lambda;
    point.iterations = sol.trace.num_iterations();
    point.status = sol.trace.status;
    point.rmse = inst.theta_true.empty() ? 0.0 : rmse(sol.theta, inst.theta_true);
    point.theta = std::move(sol.theta);
    path.push_back(std::move(point));
  }
  return path;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi >= lo && count >= 1, ErrorCode::kInvalidArgument,
          "log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> grid(static_cast<size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (std::log(hi) - std::log(lo)) / (count - 1);
  for (int k = 0; k < count; ++k) grid[static_cast<size_t>(k)] = std::exp(std::log(lo) + k * step);
  grid.back() = hi;
  return grid;
}

}  // namespace lapmm::covariance
