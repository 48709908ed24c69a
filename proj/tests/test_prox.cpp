#include <gtest/gtest.h>

#include <Eigen/LU>

#include "lapmm/error.hpp"
#include "lapmm/oracle.hpp"
#include "lapmm/prox.hpp"
#include "testing.hpp"

namespace lapmm {
namespace {

FactorQuadratic diagonal_only(const Vector& d) { return {d, Matrix(d.size(), 0), 1.0}; }

FactorQuadratic random_factor(std::mt19937_64& rng, Index n, Index r) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d[i] = unif(rng);
  Matrix F(n, r);
  for (Index j = 0; j < r; ++j) F.col(j) = testing::random_vector(rng, n);
  return {d, F, 0.7};
}

// Dense KKT of min (1/2) x^T (2P + diag(rho)) x + (q - rho .* u)^T x s.t. a^T x = b.
Vector dense_kkt(const FactorQuadratic& P, const Vector& q, const Vector& rho, const Vector& u,
                 const LinearConstraint& c) {
  const Index n = q.size();
  Matrix K = Matrix::Zero(n + 1, n + 1);
  K.topLeftCorner(n, n) = 2.0 * P.to_dense();
  K.topLeftCorner(n, n).diagonal() += rho;
  K.block(0, n, n, 1) = c.a;
  K.block(n, 0, 1, n) = c.a.transpose();
  Vector rhs(n + 1);
  rhs.head(n) = rho.cwiseProduct(u) - q;
  rhs[n] = c.b;
  return K.fullPivLu().solve(rhs).head(n);
}

TEST(FactorQuadratic, ApplyMatchesDense) {
  std::mt19937_64 rng(1);
  const auto P = random_factor(rng, 12, 3);
  const Vector x = testing::random_vector(rng, 12);
  EXPECT_LE((P.apply(x) - P.to_dense() * x).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SolveEqQuadratic, SimplexHyperplaneProjection) {
  const LinearConstraint budget{Vector::Ones(2), 1.0};
  const Vector x = solve_eq_quadratic(diagonal_only(Vector::Constant(2, 0.5)), Vector::Zero(2),
                                      Vector::Zero(2), Vector::Zero(2), budget);
  EXPECT_NEAR(x[0], 0.5, 1e-15);
  EXPECT_NEAR(x[1], 0.5, 1e-15);

  const Vector y = solve_eq_quadratic(diagonal_only((Vector(2) << 0.5, 1.0).finished()),
                                      Vector::Zero(2), Vector::Zero(2), Vector::Zero(2), budget);
  EXPECT_NEAR(y[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(y[1], 1.0 / 3.0, 1e-15);
}

TEST(SolveEqQuadratic, MatchesDenseKktAndSatisfiesConstraint) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto P = random_factor(rng, 20, 3);
    const Vector q = testing::random_vector(rng, 20);
    const Vector rho = testing::random_vector(rng, 20).cwiseAbs();
    const Vector u = testing::random_vector(rng, 20);
    const LinearConstraint c{testing::random_vector(rng, 20), 0.7};
    const Vector x = solve_eq_quadratic(P, q, rho, u, c);
    const Vector ref = dense_kkt(P, q, rho, u, c);
    EXPECT_LE((x - ref).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + ref.cwiseAbs().maxCoeff()));
    EXPECT_NEAR(c.a.dot(x), c.b, 1e-12 * (1.0 + c.a.cwiseAbs().dot(x.cwiseAbs())));

    // Stationarity: (2P + diag(rho)) x + q - rho u is parallel to a.
    Vector g = 2.0 * P.apply(x) + rho.cwiseProduct(x) + q - rho.cwiseProduct(u);
    const double nu = g.dot(c.a) / c.a.squaredNorm();
    g -= nu * c.a;
    EXPECT_LE(g.norm(), 1e-10 * (1.0 + q.norm() + rho.cwiseProduct(u).norm()));
  }
}

TEST(SolveEqQuadratic, UnconstrainedAndErrors) {
  std::mt19937_64 rng(3);
  const auto P = random_factor(rng, 6, 2);
  const Vector q = testing::random_vector(rng, 6);
  const Vector rho = Vector::Constant(6, 0.5);
  const Vector x = solve_eq_quadratic(P, q, rho, Vector::Zero(6), std::nullopt);
  Matrix H = 2.0 * P.to_dense();
  H.diagonal() += rho;
  EXPECT_LE((H * x + q).cwiseAbs().maxCoeff(), 1e-10);

  try {
    solve_eq_quadratic(diagonal_only(Vector::Zero(2)), Vector::Zero(2), Vector::Zero(2),
                       Vector::Zero(2), std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSystem);
  }
  EXPECT_THROW(solve_eq_quadratic(P, q, -rho, Vector::Zero(6), std::nullopt), Error);
  EXPECT_THROW(solve_eq_quadratic(P, Vector::Zero(5), rho, Vector::Zero(6), std::nullopt), Error);
}

TEST(ProxNegativePart, Cases) {
  const NegativePartCost one{Vector::Ones(1)};
  EXPECT_EQ(prox_negative_part(one, Vector::Ones(1), Vector::Constant(1, 2.0))[0], 2.0);
  EXPECT_EQ(prox_negative_part(one, Vector::Ones(1), Vector::Constant(1, -2.0))[0], -1.0);
  EXPECT_EQ(prox_negative_part(one, Vector::Constant(1, 2.0), Vector::Constant(1, -0.3))[0], 0.0);
  EXPECT_THROW(prox_negative_part({Vector::Constant(1, -1.0)}, Vector::Ones(1), Vector::Ones(1)),
               Error);
}

TEST(ProxNegativePart, StationarityInclusion) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const double s = unif(rng);
    const double rho = 0.1 + unif(rng);
    const double u = 3.0 * (unif(rng) - 1.0);
    const double x =
        prox_negative_part({Vector::Constant(1, s)}, Vector::Constant(1, rho), Vector::Constant(1, u))[0];
    const double g = rho * (x - u);  // must satisfy -g in the subdifferential of s (x)_-
    if (x > 0) {
      EXPECT_NEAR(g, 0.0, 1e-14);
    } else if (x < 0) {
      EXPECT_NEAR(g, s, 1e-14);
    } else {
      EXPECT_GE(g, -1e-14);
      EXPECT_LE(g, s + 1e-14);
    }
  }
}

TEST(InnerAdmm, SmoothCaseMatchesDirectSolve) {
  std::mt19937_64 rng(9);
  const auto P = random_factor(rng, 10, 2);
  const Vector q = testing::random_vector(rng, 10);
  const LinearConstraint budget{Vector::Ones(10), 1.0};
  const Vector alpha = Vector::Constant(10, 0.8);
  const Vector center = testing::random_vector(rng, 10);
  const auto result = inner_admm({P, q, budget}, {Vector::Zero(10)}, center, alpha);
  const Vector direct = solve_eq_quadratic(P, q, alpha, center, budget);
  EXPECT_LE((result.x - direct).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(InnerAdmm, ScalarToy) {
  // min (x - 1)^2 + max(-x, 0): the smooth part is x^2 - 2x, with a vanishing prox term.
  const SmoothQuadratic smooth{diagonal_only(Vector::Ones(1)), Vector::Constant(1, -2.0),
                               std::nullopt};
  const auto result = inner_admm(smooth, {Vector::Ones(1)}, Vector::Zero(1),
                                 Vector::Constant(1, 1e-12));
  EXPECT_NEAR(result.x[0], 1.0, 1e-8);
}

// Long projected subgradient run on the budget hyperplane: an algorithm-independent oracle.
double subgradient_oracle(const SmoothQuadratic& smooth, const NegativePartCost& cost,
                          const Vector& center, const Vector& alpha, Vector x, int steps) {
  const Index n = x.size();
  const Vector a = smooth.constraint->a;
  auto project = [&](Vector v) {
    return Vector(v - a * ((a.dot(v) - smooth.constraint->b) / a.squaredNorm()));
  };
  x = project(x);
  double best = inner_objective(smooth, cost, center, alpha, x);
  for (int k = 1; k <= steps; ++k) {
    Vector g = 2.0 * smooth.P.apply(x) + smooth.q + alpha.cwiseProduct(x - center);
    for (Index j = 0; j < n; ++j) {
      if (x[j] < 0) g[j] -= cost.s[j];
    }
    x = project(x - (0.5 / std::sqrt(static_cast<double>(k))) * g / (1.0 + g.norm()));
    best = std::min(best, inner_objective(smooth, cost, center, alpha, x));
  }
  return best;
}

TEST(InnerAdmm, NonsmoothBlockAgainstSubgradientOracle) {
  std::mt19937_64 rng(13);
  const Index n = 10;
  const auto P = random_factor(rng, n, 2);
  const Vector q = testing::random_vector(rng, n);
  const SmoothQuadratic smooth{P, q, LinearConstraint{Vector::Ones(n), 1.0}};
  const NegativePartCost cost{testing::random_vector(rng, n).cwiseAbs()};
  const Vector alpha = Vector::Constant(n, 1.0);
  const Vector center = Vector::Constant(n, 0.1);
  const auto result = inner_admm(smooth, cost, center, alpha);
  const double value = inner_objective(smooth, cost, center, alpha, result.x);
  const double oracle = subgradient_oracle(smooth, cost, center, alpha, center, 1000000);
  EXPECT_LE(value - oracle, 1e-5);
  EXPECT_NEAR(result.x.sum(), 1.0, 1e-9);
}

TEST(InnerAdmm, DominatesEachSingleTermSolution) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 6;
    const auto P = random_factor(rng, n, 1);
    const SmoothQuadratic smooth{P, testing::random_vector(rng, n),
                                 LinearConstraint{Vector::Ones(n), 1.0}};
    const NegativePartCost cost{testing::random_vector(rng, n).cwiseAbs()};
    const Vector alpha = testing::random_vector(rng, n).cwiseAbs() + Vector::Constant(n, 0.1);
    const Vector center = testing::random_vector(rng, n);
    const Vector x = inner_admm(smooth, cost, center, alpha).x;
    const double value = inner_objective(smooth, cost, center, alpha, x);
    // The smooth-only solution is feasible; the prox-only point generally is not (+inf).
    const Vector smooth_only = solve_eq_quadratic(P, smooth.q, alpha, center, smooth.constraint);
    const Vector prox_only = prox_negative_part(cost, alpha, center);
    EXPECT_LE(value, inner_objective(smooth, cost, center, alpha, smooth_only) + 1e-9);
    EXPECT_LE(value, inner_objective(smooth, cost, center, alpha, prox_only) + 1e-9);
  }
}

TEST(InnerAdmm, ReportsNoConvergence) {
  std::mt19937_64 rng(2);
  const Index n = 8;
  const SmoothQuadratic smooth{random_factor(rng, n, 2), testing::random_vector(rng, n),
                               LinearConstraint{Vector::Ones(n), 1.0}};
  AdmmOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-15;
  try {
    inner_admm(smooth, {Vector::Ones(n)}, Vector::Constant(n, -1.0), Vector::Ones(n), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoConvergence);
  }
}

TEST(DenseKktReference, ReproducesTwoByTwoLagrangeExamples) {
  DenseQp qp;
  qp.Q = (Vector(2) << 1.0, 2.0).finished().asDiagonal();
  qp.c = Vector::Zero(2);
  qp.A = Matrix::Ones(1, 2);
  qp.b = Vector::Ones(1);
  const auto r = dense_kkt_reference(qp);
  EXPECT_NEAR(r.x_star[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.x_star[1], 1.0 / 3.0, 1e-15);
  EXPECT_LE(r.certificate, 1e-14);

  qp.Q = Matrix::Zero(2, 2);
  qp.A = Matrix::Zero(1, 2);
  try {
    dense_kkt_reference(qp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularKkt);
  }
}

}  // namespace
}  // namespace lapmm
