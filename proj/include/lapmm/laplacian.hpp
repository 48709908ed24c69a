#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace lapmm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Edge {
  Index i;
  Index j;
  double weight;
};

// Weighted graph Laplacian stored as a sorted edge list (i < j, w > 0) plus its diagonal.
// Immutable after construction.
class WeightedLaplacian {
 public:
  WeightedLaplacian() = default;

  Index size() const { return static_cast<Index>(diagonal_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vector& diagonal() const { return diagonal_; }
  double max_diagonal() const { return diagonal_.size() ? diagonal_.maxCoeff() : 0.0; }

  Matrix to_dense() const;

  // L (x) I_m: every node becomes m uncoupled coordinates sharing the node's edges.
  WeightedLaplacian kron_identity(Index m) const;

 private:
  friend WeightedLaplacian laplacian_from_edges(Index n, std::vector<Edge> edges);

  std::vector<Edge> edges_;
  Vector diagonal_;
};

// Throws kIndexOutOfRange, kNonpositiveWeight or kDuplicateEdge.
WeightedLaplacian laplacian_from_edges(Index n, std::vector<Edge> edges);

struct ValidationReport {
  bool valid = true;
  double max_asymmetry = 0.0;
  double max_positive_offdiagonal = 0.0;
  double max_row_sum = 0.0;
  std::vector<std::string> violations;
};

// Checks the Laplacian invariants of an arbitrary square matrix. Never throws on bad
// input; a non-square matrix is reported as a violation.
ValidationReport validate(const Matrix& L, double tol = 1e-12);

// (1/2) x^T L x, summed over edges in sorted order.
double dirichlet_energy(const WeightedLaplacian& L, const Vector& x);

Vector matvec(const WeightedLaplacian& L, const Vector& x);

// 4-neighbour grid; node (r, c) has index r * cols + c.
std::vector<Edge> grid_graph(Index rows, Index cols, double weight);

// Split of an n-vector into p contiguous blocks.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<Index> sizes);
  static BlockPartition uniform(Index blocks, Index block_size);

  Index num_blocks() const { return static_cast<Index>(sizes_.size()); }
  Index block_size(Index i) const { return sizes_[static_cast<size_t>(i)]; }
  Index offset(Index i) const { return offsets_[static_cast<size_t>(i)]; }
  Index total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  const std::vector<Index>& sizes() const { return sizes_; }

  template <class Derived>
  auto block(Eigen::MatrixBase<Derived>& x, Index i) const {
    return x.segment(offset(i), block_size(i));
  }
  template <class Derived>
  auto block(const Eigen::MatrixBase<Derived>& x, Index i) const {
    return x.segment(offset(i), block_size(i));
  }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;  // size p + 1, offsets_[0] == 0
};

}  // namespace lapmm
