#include "lapmm/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lapmm/error.hpp"

namespace lapmm {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kNonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kFactorTooSmall: return "FactorTooSmall";
    case ErrorCode::kNonpositiveFloor: return "NonpositiveFloor";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kAsymmetricInput: return "AsymmetricInput";
    case ErrorCode::kInfeasibleStart: return "InfeasibleStart";
    case ErrorCode::kBlockUpdateFailure: return "BlockUpdateFailure";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kNotSymmetric: return "NotSymmetric";
    case ErrorCode::kNegativeCostEntry: return "NegativeCostEntry";
    case ErrorCode::kInconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::kNoProgress: return "NoProgress";
    case ErrorCode::kSingularKkt: return "SingularKKT";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

WeightedLaplacian laplacian_from_edges(Index n, std::vector<Edge> edges) {
  require(n >= 0, ErrorCode::kIndexOutOfRange, "negative node count");
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j >= n || e.i >= e.j) {
      std::ostringstream msg;
      msg << "edge (" << e.i << ", " << e.j << ") needs 0 <= i < j < " << n;
      fail(ErrorCode::kIndexOutOfRange, msg.str());
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      std::ostringstream msg;
      msg << "edge (" << e.i << ", " << e.j << ") has weight " << e.weight;
      fail(ErrorCode::kNonpositiveWeight, msg.str());
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
      std::ostringstream msg;
      msg << "edge (" << edges[k].i << ", " << edges[k].j << ") listed twice";
      fail(ErrorCode::kDuplicateEdge, msg.str());
    }
  }

  WeightedLaplacian L;
  L.diagonal_ = Vector::Zero(n);
  for (const Edge& e : edges) {
    L.diagonal_[e.i] += e.weight;
    L.diagonal_[e.j] += e.weight;
  }
  L.edges_ = std::move(edges);
  return L;
}

Matrix WeightedLaplacian::to_dense() const {
  Matrix dense = diagonal_.asDiagonal();
  for (const Edge& e : edges_) {
    dense(e.i, e.j) = -e.weight;
    dense(e.j, e.i) = -e.weight;
  }
  return dense;
}

WeightedLaplacian WeightedLaplacian::kron_identity(Index m) const {
  require(m >= 1, ErrorCode::kInvalidArgument, "kron_identity needs m >= 1");
  std::vector<Edge> expanded;
  expanded.reserve(edges_.size() * static_cast<size_t>(m));
  for (const Edge& e : edges_) {
    for (Index k = 0; k < m; ++k) expanded.push_back({e.i * m + k, e.j * m + k, e.weight});
  }
  return laplacian_from_edges(size() * m, std::move(expanded));
}

ValidationReport validate(const Matrix& L, double tol) {
  ValidationReport report;
  if (L.rows() != L.cols()) {
    report.valid = false;
    report.violations.push_back("not square");
    return report;
  }
  const Index n = L.rows();
  const double scale = 1.0 + (n ? L.cwiseAbs().maxCoeff() : 0.0);
  for (Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      row_sum += L(i, j);
      if (j != i) {
        report.max_asymmetry = std::max(report.max_asymmetry, std::abs(L(i, j) - L(j, i)));
        report.max_positive_offdiagonal = std::max(report.max_positive_offdiagonal, L(i, j));
      }
    }
    report.max_row_sum = std::max(report.max_row_sum, std::abs(row_sum));
  }
  const double limit = tol * scale;
  if (report.max_asymmetry > limit) {
    report.violations.push_back("asymmetric (max |L_ij - L_ji| = " +
                                std::to_string(report.max_asymmetry) + ")");
  }
  if (report.max_positive_offdiagonal > limit) {
    report.violations.push_back("positive off-diagonal (max L_ij = " +
                                std::to_string(report.max_positive_offdiagonal) + ")");
  }
  if (report.max_row_sum > limit) {
    report.violations.push_back("nonzero row sum (max |sum_j L_ij| = " +
                                std::to_string(report.max_row_sum) + ")");
  }
  report.valid = report.violations.empty();
  return report;
}

double dirichlet_energy(const WeightedLaplacian& L, const Vector& x) {
  require(x.size() == L.size(), ErrorCode::kDimensionMismatch, "dirichlet_energy: length of x");
  double sum = 0.0;
  for (const Edge& e : L.edges()) {
    const double diff = x[e.i] - x[e.j];
    sum += e.weight * diff * diff;
  }
  return 0.5 * sum;
}

Vector matvec(const WeightedLaplacian& L, const Vector& x) {
  require(x.size() == L.size(), ErrorCode::kDimensionMismatch, "matvec: length of x");
  Vector h = L.diagonal().cwiseProduct(x);
  for (const Edge& e : L.edges()) {
    h[e.i] -= e.weight * x[e.j];
    h[e.j] -= e.weight * x[e.i];
  }
  return h;
}

std::vector<Edge> grid_graph(Index rows, Index cols, double weight) {
  require(rows >= 1 && cols >= 1, ErrorCode::kInvalidArgument, "grid needs rows, cols >= 1");
  require(weight > 0.0, ErrorCode::kNonpositiveWeight, "grid weight must be positive");
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(rows * (cols - 1) + cols * (rows - 1)));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Index v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1, weight});
      if (r + 1 < rows) edges.push_back({v, v + cols, weight});
    }
  }
  return edges;
}

BlockPartition::BlockPartition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (Index s : sizes_) {
    require(s >= 1, ErrorCode::kInvalidArgument, "block sizes must be positive");
    offsets_.push_back(offsets_.back() + s);
  }
}

BlockPartition BlockPartition::uniform(Index blocks, Index block_size) {
  require(blocks >= 1, ErrorCode::kInvalidArgument, "need at least one block");
  return BlockPartition(std::vector<Index>(static_cast<size_t>(blocks), block_size));
}

}  // namespace lapmm
