#include <gtest/gtest.h>

#include <Eigen/LU>

#include "lapmm/covariance.hpp"
#include "lapmm/error.hpp"
#include "lapmm/oracle.hpp"
#include "lapmm/portfolio.hpp"
#include "testing.hpp"

namespace lapmm {
namespace {

using testing::WeightedQuadratic;

TEST(ProximalGradient, UncoupledQuadratic) {
  const auto L = laplacian_from_edges(4, {});
  const auto part = BlockPartition::uniform(2, 2);
  const Vector a = (Vector(4) << 1, -1, 2, 0.5).finished();
  const WeightedQuadratic f(part, a, Vector::Ones(4));
  ProxGradientOptions opts;
  opts.step = 0.5;
  opts.iters = 200;
  const auto r = proximal_gradient_reference(L, part, f, opts);
  EXPECT_LE((r.x_star - a).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ProximalGradient, TwoBlockChainMatchesClosedForm) {
  const auto L = laplacian_from_edges(2, {{0, 1, 1.0}});
  const auto part = BlockPartition::uniform(2, 1);
  const Vector a = (Vector(2) << 1.0, 3.0).finished();
  const WeightedQuadratic f(part, a, Vector::Constant(2, 2.0));
  const auto r = proximal_gradient_reference(L, part, f, {});
  Matrix A(2, 2);
  A << 3, -1, -1, 3;
  const Vector expected = A.lu().solve(2.0 * a);
  EXPECT_LE((r.x_star - expected).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(r.certificate, 1e-8);
}

TEST(ProximalGradient, BadStepReportsNoProgress) {
  std::mt19937_64 rng(3);
  const auto L = testing::random_laplacian(rng, 8, 0.8);
  const auto part = BlockPartition::uniform(8, 1);
  const WeightedQuadratic f(part, testing::random_vector(rng, 8), Vector::Constant(8, 1e-3));
  ProxGradientOptions opts;
  opts.step = 100.0;
  opts.accelerate = false;
  try {
    proximal_gradient_reference(L, part, f, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoProgress);
  }
}

TEST(ProximalGradient, AgreesWithMmOnSmallCovariancePath) {
  // 2x2 grid (four nodes), d = 3.
  const auto inst = covariance::generate_instance(2, 2, 3, 20, 5);
  for (double lambda : {0.01, 0.1, 1.0}) {
    const auto lrmp = covariance::build_problem(inst, lambda);
    SolveOptions opts;
    opts.eps_abs = 1e-9;
    opts.max_iter = 20000;
    const auto mm = solve(lrmp.L, lrmp.partition, lrmp.majorizer, *lrmp.problem, std::nullopt, opts);
    ASSERT_EQ(mm.trace.status, SolveStatus::kConverged);
    const auto pg = proximal_gradient_reference(lrmp.L, lrmp.partition, *lrmp.problem, {});
    const double f_mm = *mm.trace.final_objective();
    EXPECT_LE(std::abs(f_mm - pg.objective), 1e-5 * std::abs(pg.objective)) << lambda;
  }
}

TEST(DenseKktReference, GammaChangesOptimizerNotResidual) {
  portfolio::GeneratorOptions g;
  g.seed = 2;
  g.shorting = false;
  auto inst = portfolio::generate_instance(g);
  for (auto& s : inst.shorting) s.setZero();
  const auto r1 = dense_kkt_reference(portfolio::to_dense_qp(inst));
  inst.gamma *= 2.0;
  const auto r2 = dense_kkt_reference(portfolio::to_dense_qp(inst));
  EXPECT_GT((r1.x_star - r2.x_star).norm(), 1e-8);
  EXPECT_LE(r1.certificate, 1e-10);
  EXPECT_LE(r2.certificate, 1e-10);
}

}  // namespace
}  // namespace lapmm
