#pragma once

#include <optional>

#include <Eigen/Cholesky>

#include "lapmm/laplacian.hpp"

namespace lapmm {

// P = diag(diag) + scale * factors * factors^T, with diag >= 0 and scale >= 0.
struct FactorQuadratic {
  Vector diag;
  Matrix factors;  // n x r, r may be 0
  double scale = 1.0;

  Index size() const { return diag.size(); }
  Vector apply(const Vector& x) const;
  Matrix to_dense() const;
};

// a^T x = b
struct LinearConstraint {
  Vector a;
  double b = 0.0;
};

// s^T (x)_-, with s >= 0.
struct NegativePartCost {
  Vector s;

  double value(const Vector& x) const;
};

// Minimizes (1/2) x^T (diag(g) + U U^T) x + c^T x, optionally subject to a^T x = b, for a
// fixed matrix and many right-hand sides. The diagonal-plus-low-rank inverse is applied
// through the capacitance matrix I + U^T diag(g)^{-1} U, followed by one step of iterative
// refinement.
class FactorKktSolver {
 public:
  // Matrix is 2P + diag(rho).
  FactorKktSolver(const FactorQuadratic& P, const Vector& rho,
                  std::optional<LinearConstraint> constraint);

  Vector solve(const Vector& c) const;

 private:
  Vector apply_matrix(const Vector& x) const;
  Vector apply_inverse_once(const Vector& y) const;
  Vector apply_inverse(const Vector& y) const;

  Vector g_;
  Matrix u_;
  Matrix w_;  // diag(g)^{-1} U
  Eigen::LLT<Matrix> capacitance_;
  std::optional<LinearConstraint> constraint_;
  Vector inv_a_;
  double a_inv_a_ = 0.0;
};

// argmin (1/2) x^T (2P + diag(rho)) x + q^T x - (rho .* u)^T x  s.t. a^T x = b.
// rho >= 0 elementwise; kSingularSystem when some 2 P_jj + rho_j vanishes.
Vector solve_eq_quadratic(const FactorQuadratic& P, const Vector& q, const Vector& rho,
                          const Vector& u, const std::optional<LinearConstraint>& constraint);

// Coordinatewise argmin s_j max(-x_j, 0) + (rho_j / 2)(x_j - u_j)^2.
Vector prox_negative_part(const NegativePartCost& cost, const Vector& rho, const Vector& u);

// x^T P x + q^T x, optionally constrained.
struct SmoothQuadratic {
  FactorQuadratic P;
  Vector q;
  std::optional<LinearConstraint> constraint;
};

struct AdmmOptions {
  double tol = 1e-11;
  int max_iter = 20000;
};

struct AdmmResult {
  Vector x;
  int iterations = 0;
};

// Minimizes x^T P x + q^T x + s^T (x)_- + (1/2)(x - center)^T diag(alpha)(x - center) over the
// constraint set. ADMM splits the smooth-plus-constraint part from the negative-part cost,
// with penalty equal to the geometric mean of alpha. When s == 0 the smooth problem is solved
// directly.
AdmmResult inner_admm(const SmoothQuadratic& smooth, const NegativePartCost& nonsmooth,
                      const Vector& center, const Vector& alpha, const AdmmOptions& opts = {});

// Value of the inner_admm objective, +inf when the constraint is violated beyond
// constraint_tol * (1 + ||x||_1).
double inner_objective(const SmoothQuadratic& smooth, const NegativePartCost& nonsmooth,
                       const Vector& center, const Vector& alpha, const Vector& x,
                       double constraint_tol = 1e-9);

}  // namespace lapmm
