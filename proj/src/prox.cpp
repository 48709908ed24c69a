#include "lapmm/prox.hpp"

#include <cmath>

#include "lapmm/error.hpp"
#include "lapmm/solver.hpp"

namespace lapmm {

Vector FactorQuadratic::apply(const Vector& x) const {
  Vector y = diag.cwiseProduct(x);
  if (factors.cols() > 0) y.noalias() += scale * (factors * (factors.transpose() * x));
  return y;
}

Matrix FactorQuadratic::to_dense() const {
  Matrix m = scale * factors * factors.transpose();
  m.diagonal() += diag;
  return m;
}

double NegativePartCost::value(const Vector& x) const {
  return s.dot((-x).cwiseMax(0.0));
}

FactorKktSolver::FactorKktSolver(const FactorQuadratic& P, const Vector& rho,
                                 std::optional<LinearConstraint> constraint)
    : constraint_(std::move(constraint)) {
  const Index n = P.size();
  require(P.factors.rows() == n || P.factors.cols() == 0, ErrorCode::kDimensionMismatch,
          "factor matrix rows");
  require(rho.size() == n, ErrorCode::kDimensionMismatch, "rho length");
  require((rho.array() >= 0.0).all(), ErrorCode::kInvalidArgument, "rho must be nonnegative");
  require(P.scale >= 0.0, ErrorCode::kInvalidArgument, "factor scale must be nonnegative");

  g_ = 2.0 * P.diag + rho;
  for (Index j = 0; j < n; ++j) {
    require(g_[j] > 0.0, ErrorCode::kSingularSystem,
            "zero curvature in coordinate " + std::to_string(j));
  }
  const Index r = P.factors.cols();
  u_ = std::sqrt(2.0 * P.scale) * P.factors;
  if (r == 0) u_.resize(n, 0);
  w_ = g_.cwiseInverse().asDiagonal() * u_;
  Matrix cap = Matrix::Identity(r, r);
  cap.noalias() += u_.transpose() * w_;
  capacitance_.compute(cap);
  require(capacitance_.info() == Eigen::Success, ErrorCode::kSingularSystem,
          "capacitance matrix is not positive definite");

  if (constraint_) {
    require(constraint_->a.size() == n, ErrorCode::kDimensionMismatch, "constraint length");
    require(constraint_->a.squaredNorm() > 0.0, ErrorCode::kInvalidArgument,
            "constraint normal is zero");
    inv_a_ = apply_inverse(constraint_->a);
    a_inv_a_ = constraint_->a.dot(inv_a_);
    require(a_inv_a_ > 0.0, ErrorCode::kSingularSystem, "a^T A^{-1} a is not positive");
  }
}

Vector FactorKktSolver::apply_matrix(const Vector& x) const {
  Vector y = g_.cwiseProduct(x);
  if (u_.cols() > 0) y.noalias() += u_ * (u_.transpose() * x);
  return y;
}

Vector FactorKktSolver::apply_inverse_once(const Vector& y) const {
  Vector x = y.cwiseQuotient(g_);
  if (u_.cols() > 0) x.noalias() -= w_ * capacitance_.solve(w_.transpose() * y);
  return x;
}

Vector FactorKktSolver::apply_inverse(const Vector& y) const {
  Vector x = apply_inverse_once(y);
  x += apply_inverse_once(y - apply_matrix(x));
  return x;
}

Vector FactorKktSolver::solve(const Vector& c) const {
  require(c.size() == g_.size(), ErrorCode::kDimensionMismatch, "linear term length");
  Vector x = apply_inverse(-c);
  if (constraint_) {
    // x = -A^{-1}(c + a nu) with nu fixed by a^T x = b.
    const double nu = (constraint_->a.dot(x) - constraint_->b) / a_inv_a_;
    x -= nu * inv_a_;
  }
  return x;
}

Vector solve_eq_quadratic(const FactorQuadratic& P, const Vector& q, const Vector& rho,
                          const Vector& u, const std::optional<LinearConstraint>& constraint) {
  require(q.size() == P.size() && u.size() == P.size(), ErrorCode::kDimensionMismatch,
          "solve_eq_quadratic: vector lengths");
  FactorKktSolver kkt(P, rho, constraint);
  return kkt.solve(q - rho.cwiseProduct(u));
}

Vector prox_negative_part(const NegativePartCost& cost, const Vector& rho, const Vector& u) {
  require(cost.s.size() == u.size() && rho.size() == u.size(), ErrorCode::kDimensionMismatch,
          "prox_negative_part: vector lengths");
  require((cost.s.array() >= 0.0).all(), ErrorCode::kNegativeCostEntry,
          "shorting cost must be nonnegative");
  Vector x(u.size());
  for (Index j = 0; j < u.size(); ++j) {
    require(rho[j] > 0.0, ErrorCode::kInvalidArgument, "rho must be positive");
    const double shift = cost.s[j] / rho[j];
    if (u[j] >= 0.0) {
      x[j] = u[j];
    } else if (u[j] >= -shift) {
      x[j] = 0.0;
    } else {
      x[j] = u[j] + shift;
    }
  }
  return x;
}

AdmmResult inner_admm(const SmoothQuadratic& smooth, const NegativePartCost& nonsmooth,
                      const Vector& center, const Vector& alpha, const AdmmOptions& opts) {
  const Index n = smooth.P.size();
  require(smooth.q.size() == n && nonsmooth.s.size() == n && center.size() == n &&
              alpha.size() == n,
          ErrorCode::kDimensionMismatch, "inner_admm: vector lengths");
  require(opts.tol > 0.0, ErrorCode::kInvalidArgument, "ADMM tolerance must be positive");
  require((alpha.array() > 0.0).all(), ErrorCode::kInvalidArgument, "alpha must be positive");
  require((nonsmooth.s.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "shorting cost must be nonnegative");

  // Fold the prox term into the smooth quadratic.
  FactorQuadratic P = smooth.P;
  P.diag += 0.5 * alpha;
  const Vector q = smooth.q - alpha.cwiseProduct(center);

  AdmmResult result;
  if ((nonsmooth.s.array() == 0.0).all()) {
    FactorKktSolver kkt(P, Vector::Zero(n), smooth.constraint);
    result.x = kkt.solve(q);
    return result;
  }

  const double rho = std::exp(alpha.array().log().mean());
  const Vector rho_vec = Vector::Constant(n, rho);
  FactorKktSolver kkt(P, rho_vec, smooth.constraint);

  Vector z = center;
  Vector dual = Vector::Zero(n);  // scaled dual variable
  Vector x(n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    x = kkt.solve(q - rho * (z - dual));
    const Vector z_prev = z;
    z = prox_negative_part(nonsmooth, rho_vec, x + dual);
    dual += x - z;

    const double limit = opts.tol * (1.0 + x.norm());
    const double primal = (x - z).norm();
    const double dual_res = rho * (z - z_prev).norm();
    if (primal <= limit && dual_res <= limit) {
      result.x = x;
      result.iterations = it;
      return result;
    }
  }
  fail(ErrorCode::kNoConvergence,
       "inner ADMM did not converge in " + std::to_string(opts.max_iter) + " iterations");
}

double inner_objective(const SmoothQuadratic& smooth, const NegativePartCost& nonsmooth,
                       const Vector& center, const Vector& alpha, const Vector& x,
                       double constraint_tol) {
  if (smooth.constraint) {
    const double gap = std::abs(smooth.constraint->a.dot(x) - smooth.constraint->b);
    if (gap > constraint_tol * (1.0 + x.lpNorm<1>())) return kInfinity;
  }
  const Vector d = x - center;
  return x.dot(smooth.P.apply(x)) + smooth.q.dot(x) + nonsmooth.value(x) +
         0.5 * d.dot(alpha.cwiseProduct(d));
}

}  // namespace lapmm
