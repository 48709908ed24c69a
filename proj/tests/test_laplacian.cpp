#include <gtest/gtest.h>

#include "lapmm/error.hpp"
#include "lapmm/laplacian.hpp"
#include "testing.hpp"

namespace lapmm {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kParse;
}

TEST(LaplacianFromEdges, SingleEdge) {
  const auto L = laplacian_from_edges(2, {{0, 1, 1.0}});
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(L.to_dense(), expected);
}

TEST(LaplacianFromEdges, EmptyGraphIsZero) {
  const auto L = laplacian_from_edges(3, {});
  EXPECT_TRUE(L.to_dense().isZero(0.0));
  EXPECT_EQ(L.size(), 3);
}

TEST(LaplacianFromEdges, PathGraphDiagonalAndRowSums) {
  const auto L = laplacian_from_edges(3, {{1, 2, 1.0}, {0, 1, 2.0}});
  EXPECT_EQ(L.diagonal(), Vector::Map(std::vector<double>{2, 3, 1}.data(), 3));
  // dense row-sum oracle
  EXPECT_TRUE(L.to_dense().rowwise().sum().isZero(1e-15));
  ASSERT_EQ(L.edges().size(), 2u);
  EXPECT_EQ(L.edges()[0].i, 0);  // sorted
}

TEST(LaplacianFromEdges, Errors) {
  EXPECT_EQ(code_of([] { laplacian_from_edges(2, {{0, 2, 1.0}}); }), ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([] { laplacian_from_edges(3, {{1, 1, 1.0}}); }), ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([] { laplacian_from_edges(3, {{2, 1, 1.0}}); }), ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([] { laplacian_from_edges(2, {{0, 1, 0.0}}); }), ErrorCode::kNonpositiveWeight);
  EXPECT_EQ(code_of([] { laplacian_from_edges(2, {{0, 1, -1.0}}); }),
            ErrorCode::kNonpositiveWeight);
  EXPECT_EQ(code_of([] { laplacian_from_edges(3, {{0, 1, 1.0}, {0, 1, 2.0}}); }),
            ErrorCode::kDuplicateEdge);
}

TEST(Validate, Reports) {
  Matrix good(2, 2);
  good << 1, -1, -1, 1;
  EXPECT_TRUE(validate(good).valid);

  Matrix positive(2, 2);
  positive << 1, 1, 1, 1;
  const auto r1 = validate(positive);
  EXPECT_FALSE(r1.valid);
  EXPECT_DOUBLE_EQ(r1.max_positive_offdiagonal, 1.0);
  EXPECT_DOUBLE_EQ(r1.max_row_sum, 2.0);
  EXPECT_EQ(r1.violations.size(), 2u);
  EXPECT_EQ(r1.max_asymmetry, 0.0);

  Matrix asym(2, 2);
  asym << 1, -1, -0.5, 0.5;
  const auto r2 = validate(asym);
  EXPECT_FALSE(r2.valid);
  EXPECT_DOUBLE_EQ(r2.max_asymmetry, 0.5);
  EXPECT_NE(r2.violations.front().find("asymmetric"), std::string::npos);

  EXPECT_FALSE(validate(Matrix::Zero(2, 3)).valid);
}

TEST(DirichletEnergy, Examples) {
  const auto L = laplacian_from_edges(2, {{0, 1, 1.0}});
  EXPECT_DOUBLE_EQ(dirichlet_energy(L, Vector::Unit(2, 0)), 0.5);
  std::mt19937_64 rng(1);
  const auto R = testing::random_laplacian(rng, 10);
  EXPECT_NEAR(dirichlet_energy(R, Vector::Constant(10, 3.7)), 0.0, 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = testing::random_vector(rng, 10);
    const double dense = 0.5 * x.dot(R.to_dense() * x);
    EXPECT_NEAR(dirichlet_energy(R, x), dense, 1e-12 * (1.0 + std::abs(dense)));
  }
  EXPECT_THROW(dirichlet_energy(L, Vector::Zero(3)), Error);
}

TEST(Matvec, Examples) {
  const auto L = laplacian_from_edges(2, {{0, 1, 1.0}});
  EXPECT_EQ(matvec(L, Vector::Unit(2, 0)), (Vector(2) << 1, -1).finished());
  std::mt19937_64 rng(2);
  const auto R = testing::random_laplacian(rng, 20);
  EXPECT_LE(matvec(R, Vector::Ones(20)).cwiseAbs().maxCoeff(), 1e-12);
  const Vector x = testing::random_vector(rng, 20);
  EXPECT_LE((matvec(R, x) - R.to_dense() * x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(matvec(L, Vector::Zero(1)), Error);
}

TEST(GridGraph, EdgeCounts) {
  EXPECT_EQ(grid_graph(15, 15, 1.0).size(), 420u);
  EXPECT_EQ(grid_graph(2, 2, 1.0).size(), 4u);
  EXPECT_EQ(grid_graph(3, 3, 1.0).size(), 12u);
  EXPECT_EQ(grid_graph(1, 5, 1.0).size(), 4u);
  EXPECT_EQ(code_of([] { grid_graph(2, 2, 0.0); }), ErrorCode::kNonpositiveWeight);
  // valid input for laplacian_from_edges
  EXPECT_NO_THROW(laplacian_from_edges(12, grid_graph(3, 4, 0.5)));
}

TEST(KronIdentity, MatchesDenseKronecker) {
  const auto L = laplacian_from_edges(3, {{0, 1, 2.0}, {1, 2, 0.5}});
  const auto K = L.kron_identity(2);
  const Matrix dense = L.to_dense();
  Matrix expected = Matrix::Zero(6, 6);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) expected.block(2 * i, 2 * j, 2, 2) = dense(i, j) * Matrix::Identity(2, 2);
  }
  EXPECT_EQ(K.to_dense(), expected);
}

TEST(BlockPartition, Offsets) {
  const BlockPartition part({2, 3, 1});
  EXPECT_EQ(part.num_blocks(), 3);
  EXPECT_EQ(part.total(), 6);
  EXPECT_EQ(part.offset(2), 5);
  Vector x = Vector::LinSpaced(6, 0, 5);
  EXPECT_EQ(part.block(x, 1)[0], 2.0);
  EXPECT_THROW(BlockPartition({2, 0}), Error);
}

// Properties over random instances.
TEST(LaplacianProperties, PsdEnergyAndMatvecConsistency) {
  std::mt19937_64 rng(11);
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 2 + inst * 3;
    const auto L = testing::random_laplacian(rng, n, 0.4);
    EXPECT_TRUE(validate(L.to_dense()).valid);
    EXPECT_LE(matvec(L, Vector::Ones(n)).cwiseAbs().maxCoeff(), 1e-12);
    for (int k = 0; k < 100; ++k) {
      const Vector z = testing::random_vector(rng, n);
      const double energy = dirichlet_energy(L, z);
      EXPECT_GE(energy, 0.0);
      const double via_matvec = 0.5 * z.dot(matvec(L, z));
      EXPECT_NEAR(energy, via_matvec, 1e-10 * std::max(1.0, energy));
    }
  }
}

}  // namespace
}  // namespace lapmm
