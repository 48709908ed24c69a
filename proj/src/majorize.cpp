#include "lapmm/majorize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lapmm/error.hpp"

namespace lapmm {

namespace {

constexpr double kSpectralMargin = 1e-7;
constexpr std::uint64_t kPowerIterationSeed = 0x5eed1a9ULL;

void check_factor(double factor, double floor) {
  require(factor > 2.0, ErrorCode::kFactorTooSmall,
          "factor must exceed 2, got " + std::to_string(factor));
  require(floor > 0.0, ErrorCode::kNonpositiveFloor,
          "floor must be positive, got " + std::to_string(floor));
}

}  // namespace

double default_floor(const WeightedLaplacian& L) { return 1e-6 * (1.0 + L.max_diagonal()); }

DiagonalMajorizer diagonal_majorizer(const WeightedLaplacian& L, double factor) {
  return diagonal_majorizer(L, factor, default_floor(L));
}

DiagonalMajorizer diagonal_majorizer(const WeightedLaplacian& L, double factor, double floor) {
  check_factor(factor, floor);
  DiagonalMajorizer m;
  m.rule = MajorizerRule::kDiagonal;
  m.alpha = (factor * L.diagonal()).cwiseMax(floor);
  return m;
}

PowerIterationResult power_iteration(const WeightedLaplacian& L, double tol, int max_iter) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "power iteration tolerance must be positive");
  PowerIterationResult result;
  const Index n = L.size();
  if (n == 0 || L.edges().empty()) return result;

  // All-ones lies in the null space of L, so perturb it.
  std::mt19937_64 rng(kPowerIterationSeed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + unif(rng);
  v.normalize();

  double rayleigh = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector w = matvec(L, v);
    const double next = v.dot(w);
    const double norm = w.norm();
    result.iterations = it;
    if (norm == 0.0) {
      result.lambda_max = 0.0;
      return result;
    }
    v = w / norm;
    if (it > 1 && std::abs(next - rayleigh) <= tol * std::abs(next)) {
      result.lambda_max = next;
      return result;
    }
    rayleigh = next;
  }
  fail(ErrorCode::kNoConvergence,
       "power iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

DiagonalMajorizer spectral_majorizer(const WeightedLaplacian& L, double tol, int max_iter) {
  const double lambda = power_iteration(L, tol, max_iter).lambda_max;
  const double value = std::max(2.0 * lambda * (1.0 + kSpectralMargin), default_floor(L));
  DiagonalMajorizer m;
  m.rule = MajorizerRule::kSpectral;
  m.alpha = Vector::Constant(L.size(), value);
  return m;
}

DiagonalMajorizer block_identity_majorizer(const WeightedLaplacian& L,
                                           const BlockPartition& partition, double factor) {
  return block_identity_majorizer(L, partition, factor, default_floor(L));
}

DiagonalMajorizer block_identity_majorizer(const WeightedLaplacian& L,
                                           const BlockPartition& partition, double factor,
                                           double floor) {
  check_factor(factor, floor);
  require(partition.total() == L.size(), ErrorCode::kDimensionMismatch,
          "partition does not cover the Laplacian");
  DiagonalMajorizer m;
  m.rule = MajorizerRule::kBlockIdentity;
  m.alpha.resize(L.size());
  for (Index b = 0; b < partition.num_blocks(); ++b) {
    const double block_max = partition.block(L.diagonal(), b).maxCoeff();
    partition.block(m.alpha, b).setConstant(std::max(factor * block_max, floor));
  }
  return m;
}

DiagonalMajorizer general_quadratic_majorizer(const Matrix& Q, double margin) {
  require(Q.rows() == Q.cols(), ErrorCode::kDimensionMismatch, "Q must be square");
  require(margin > 0.0, ErrorCode::kInvalidArgument, "margin must be positive");
  const double scale = 1.0 + (Q.size() ? Q.cwiseAbs().maxCoeff() : 0.0);
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorCode::kAsymmetricInput,
          "Q is not symmetric");
  const double floor = 1e-6 * (1.0 + (Q.size() ? Q.diagonal().cwiseAbs().maxCoeff() : 0.0));
  DiagonalMajorizer m;
  m.rule = MajorizerRule::kGeneralQuadratic;
  m.alpha = ((1.0 + margin) * Q.cwiseAbs().rowwise().sum()).cwiseMax(floor);
  return m;
}

double majorizer_value(const WeightedLaplacian& L, const DiagonalMajorizer& Lhat, const Vector& x,
                       const Vector& z) {
  require(x.size() == L.size() && z.size() == L.size() && Lhat.size() == L.size(),
          ErrorCode::kDimensionMismatch, "majorizer_value: sizes differ");
  const Vector d = x - z;
  return dirichlet_energy(L, z) + matvec(L, z).dot(d) +
         0.5 * d.dot(Lhat.alpha.cwiseProduct(d));
}

}  // namespace lapmm
