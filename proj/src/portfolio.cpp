#include "lapmm/portfolio.hpp"

#include <cmath>
#include <random>

#include "lapmm/error.hpp"
#include "lapmm/majorize.hpp"

namespace lapmm::portfolio {

namespace {

constexpr double kConstraintTol = 1e-9;

void require_len(const Vector& v, Index n, const char* what) {
  require(v.size() == n, ErrorCode::kInconsistentDimensions,
          std::string(what) + " has length " + std::to_string(v.size()) + ", expected " +
              std::to_string(n));
}

}  // namespace

void check_instance(const PortfolioInstance& inst) {
  const Index n = inst.n;
  const Index T = inst.T;
  require(n >= 1 && T >= 1, ErrorCode::kInconsistentDimensions, "need n >= 1 and T >= 1");
  const auto periods = static_cast<size_t>(T - 1);
  require(inst.mu.size() == periods && inst.sigma.size() == periods &&
              inst.shorting.size() == periods,
          ErrorCode::kInconsistentDimensions, "mu, sigma and shorting need T - 1 entries");
  require(inst.transaction.size() == static_cast<size_t>(T), ErrorCode::kInconsistentDimensions,
          "transaction costs need T entries");
  require_len(inst.x0, n, "x0");
  require(inst.gamma > 0.0, ErrorCode::kInvalidArgument, "gamma must be positive");

  for (size_t t = 0; t < periods; ++t) {
    require_len(inst.mu[t], n, "mu_t");
    require_len(inst.shorting[t], n, "s_t");
    require_len(inst.sigma[t].diag, n, "Sigma_t diagonal");
    require(inst.sigma[t].factors.cols() == 0 || inst.sigma[t].factors.rows() == n,
            ErrorCode::kInconsistentDimensions, "Sigma_t factor rows");
    require((inst.shorting[t].array() >= 0.0).all(), ErrorCode::kNegativeCostEntry,
            "shorting costs must be nonnegative");
    require(inst.shorting[t][n - 1] == 0.0, ErrorCode::kInvalidArgument,
            "cash must have zero shorting cost");
    require(inst.sigma[t].diag[n - 1] == 0.0 &&
                (inst.sigma[t].factors.cols() == 0 ||
                 inst.sigma[t].factors.row(n - 1).isZero(0.0)),
            ErrorCode::kInvalidArgument, "cash must have zero risk");
  }
  for (const Vector& d : inst.transaction) {
    require_len(d, n, "D_t");
    require((d.array() >= 0.0).all(), ErrorCode::kNegativeCostEntry,
            "transaction costs must be nonnegative");
    require(d[n - 1] == 0.0, ErrorCode::kInvalidArgument, "cash must trade for free");
  }
}

WeightedLaplacian chain_laplacian(const std::vector<Vector>& costs) {
  const Index T = static_cast<Index>(costs.size()) + 1;
  const Index n = costs.empty() ? 0 : costs.front().size();
  std::vector<Edge> edges;
  for (Index t = 1; t < T; ++t) {
    const Vector& d = costs[static_cast<size_t>(t - 1)];
    require(d.size() == n, ErrorCode::kInconsistentDimensions, "cost vectors differ in length");
    for (Index a = 0; a < n; ++a) {
      require(d[a] >= 0.0, ErrorCode::kNegativeCostEntry,
              "negative transaction cost " + std::to_string(d[a]));
      if (d[a] > 0.0) edges.push_back({(t - 1) * n + a, t * n + a, d[a]});
    }
  }
  return laplacian_from_edges(T * n, std::move(edges));
}

PortfolioProblem::PortfolioProblem(PortfolioInstance inst, AdmmOptions admm)
    : inst_(std::move(inst)), admm_(admm) {
  check_instance(inst_);
  cash_ = Vector::Zero(inst_.n);
  cash_[inst_.n - 1] = 1.0;
}

SmoothQuadratic PortfolioProblem::smooth_part(Index block, const Vector& h) const {
  const auto t = static_cast<size_t>(block);
  SmoothQuadratic smooth;
  smooth.P = inst_.sigma[t];
  smooth.P.diag *= inst_.gamma;
  smooth.P.scale *= inst_.gamma;
  smooth.q = h - inst_.mu[t];
  if (block == 0) {
    // Lumped x_1 terms of the first transaction cost.
    const Vector& d1 = inst_.transaction[0];
    smooth.P.diag += 0.5 * d1;
    smooth.q -= d1.cwiseProduct(inst_.x0);
  }
  smooth.constraint = LinearConstraint{Vector::Ones(inst_.n), 1.0};
  return smooth;
}

Vector PortfolioProblem::update(Index block, const VectorRef& x_k, const VectorRef& h,
                                const VectorRef& alpha) const {
  if (block == inst_.T - 1) return cash_;
  const NegativePartCost cost{inst_.shorting[static_cast<size_t>(block)]};
  return inner_admm(smooth_part(block, h), cost, x_k, alpha, admm_).x;
}

double PortfolioProblem::objective(Index block, const VectorRef& x) const {
  if (block == inst_.T - 1) {
    return (x - cash_).lpNorm<Eigen::Infinity>() <= 1e-12 ? 0.0 : kInfinity;
  }
  const Vector xv = x;
  if (std::abs(xv.sum() - 1.0) > kConstraintTol * (1.0 + xv.lpNorm<1>())) return kInfinity;
  const auto t = static_cast<size_t>(block);
  double f = -inst_.mu[t].dot(xv) + inst_.gamma * xv.dot(inst_.sigma[t].apply(xv)) +
             NegativePartCost{inst_.shorting[t]}.value(xv);
  if (block == 0) {
    const Vector& d1 = inst_.transaction[0];
    f += 0.5 * xv.dot(d1.cwiseProduct(xv)) - d1.cwiseProduct(inst_.x0).dot(xv) +
         0.5 * inst_.x0.dot(d1.cwiseProduct(inst_.x0));
  }
  return f;
}

Vector PortfolioProblem::feasible_start(Index) const { return cash_; }

PortfolioLrmp build_problem(const PortfolioInstance& inst, AdmmOptions admm) {
  check_instance(inst);
  PortfolioLrmp lrmp;
  lrmp.L = chain_laplacian(
      std::vector<Vector>(inst.transaction.begin() + 1, inst.transaction.end()));
  if (inst.T == 1) lrmp.L = laplacian_from_edges(inst.n, {});
  lrmp.partition = BlockPartition::uniform(inst.T, inst.n);
  lrmp.problem = std::make_shared<PortfolioProblem>(inst, admm);
  return lrmp;
}

PortfolioInstance generate_instance(const GeneratorOptions& opts) {
  require(opts.n >= 2 && opts.T >= 2 && opts.factors >= 0, ErrorCode::kInvalidArgument,
          "generator needs n >= 2, T >= 2, factors >= 0");
  const Index n = opts.n;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  Vector mu(n);
  for (Index a = 0; a + 1 < n; ++a) mu[a] = 1e-3 * normal(rng);
  mu[n - 1] = 1e-5;

  FactorQuadratic sigma;
  sigma.scale = 1.0;
  sigma.diag.resize(n);
  for (Index a = 0; a + 1 < n; ++a) sigma.diag[a] = uniform(1e-5, 1e-4);
  sigma.diag[n - 1] = 0.0;
  sigma.factors = Matrix::Zero(n, opts.factors);
  for (Index a = 0; a + 1 < n; ++a) {
    for (Index k = 0; k < opts.factors; ++k) sigma.factors(a, k) = 1e-2 * normal(rng);
  }

  Vector s = Vector::Zero(n);
  for (Index a = 0; a + 1 < n; ++a) {
    const double draw = uniform(1e-4, 1e-3);
    if (opts.shorting) s[a] = draw;
  }

  Vector d(n);
  for (Index a = 0; a + 1 < n; ++a) d[a] = uniform(1e-3, 1e-2);
  d[n - 1] = 0.0;

  PortfolioInstance inst;
  inst.n = n;
  inst.T = opts.T;
  inst.gamma = opts.gamma;
  const auto periods = static_cast<size_t>(opts.T - 1);
  inst.mu.assign(periods, mu);
  inst.sigma.assign(periods, sigma);
  inst.shorting.assign(periods, s);
  inst.transaction.assign(static_cast<size_t>(opts.T), d);
  inst.x0 = Vector::Zero(n);
  inst.x0[n - 1] = 1.0;
  return inst;
}

DenseQp to_dense_qp(const PortfolioInstance& inst) {
  check_instance(inst);
  for (const Vector& s : inst.shorting) {
    require(s.isZero(0.0), ErrorCode::kInvalidArgument, "dense QP needs zero shorting costs");
  }
  const Index n = inst.n;
  const Index T = inst.T;
  const Index N = n * T;
  DenseQp qp;
  qp.Q = Matrix::Zero(N, N);
  qp.c = Vector::Zero(N);

  for (Index t = 0; t + 1 < T; ++t) {
    qp.Q.block(t * n, t * n, n, n) += 2.0 * inst.gamma * inst.sigma[static_cast<size_t>(t)].to_dense();
    qp.c.segment(t * n, n) -= inst.mu[static_cast<size_t>(t)];
  }
  // (1/2)(x_t - x_{t-1})^T D_t (x_t - x_{t-1}) for t = 1..T, x_0 fixed.
  for (Index t = 0; t < T; ++t) {
    const Vector& d = inst.transaction[static_cast<size_t>(t)];
    qp.Q.block(t * n, t * n, n, n).diagonal() += d;
    if (t == 0) {
      qp.c.head(n) -= d.cwiseProduct(inst.x0);
      qp.constant += 0.5 * inst.x0.dot(d.cwiseProduct(inst.x0));
    } else {
      qp.Q.block((t - 1) * n, (t - 1) * n, n, n).diagonal() += d;
      qp.Q.block(t * n, (t - 1) * n, n, n).diagonal() -= d;
      qp.Q.block((t - 1) * n, t * n, n, n).diagonal() -= d;
    }
  }

  // 1^T x_t = 1 for t < T, x_T = e_n.
  const Index m = (T - 1) + n;
  qp.A = Matrix::Zero(m, N);
  qp.b = Vector::Zero(m);
  for (Index t = 0; t + 1 < T; ++t) {
    qp.A.block(t, t * n, 1, n).setOnes();
    qp.b[t] = 1.0;
  }
  for (Index a = 0; a < n; ++a) qp.A(T - 1 + a, (T - 1) * n + a) = 1.0;
  qp.b[T - 1 + n - 1] = 1.0;
  return qp;
}

Matrix weights_matrix(const PortfolioInstance& inst, const Vector& x) {
  require(x.size() == inst.n * inst.T, ErrorCode::kDimensionMismatch, "solution length");
  Matrix w(inst.T, inst.n);
  for (Index t = 0; t < inst.T; ++t) w.row(t) = x.segment(t * inst.n, inst.n).transpose();
  return w;
}

double transaction_cost(const PortfolioInstance& inst, const Vector& x) {
  require(x.size() == inst.n * inst.T, ErrorCode::kDimensionMismatch, "solution length");
  double total = 0.0;
  for (Index t = 0; t < inst.T; ++t) {
    const Vector prev = t == 0 ? inst.x0 : Vector(x.segment((t - 1) * inst.n, inst.n));
    const Vector diff = x.segment(t * inst.n, inst.n) - prev;
    total += 0.5 * diff.dot(inst.transaction[static_cast<size_t>(t)].cwiseProduct(diff));
  }
  return total;
}

}  // namespace lapmm::portfolio
