#pragma once

#include "isvd/design.hpp"
#include "isvd/graph.hpp"
#include "isvd/linop.hpp"
#include "isvd/rsvd.hpp"

#include <vector>

namespace isvd {

/// Embedding model from the SVD of the network-embedding design matrix.
struct NeModel {
  SvdResult svd;

  /// U S^1/2 and V S^1/2.
  Matrix left() const;
  Matrix right() const;
  /// <U_i, V_j>_S.
  double score(Index i, Index j) const;
  Vector scores(const std::vector<Edge>& pairs) const;
};

NeModel train_ne(const LinOp& M, const SvdConfig& cfg, SvdStats* stats = nullptr);

struct NcModel {
  Matrix W;  // F x y
  NcSpec spec;
  Index feature_dim = 0;
  Index label_dim = 0;
};

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kPinvTolerance = 1e-10;

/// Least-norm solution of M[rows] W = Y[rows] through a rank-k SVD of the
/// implicitly gathered design matrix. Y has one row per row of M.
Matrix solve_least_norm(const LinOp& M, const Matrix& Y, const std::vector<Index>& rows,
                        const SvdConfig& cfg, SvdStats* stats = nullptr);

NcModel solve_nc(const LinOp& M, const Matrix& Y, const std::vector<Index>& rows, const NcSpec& spec,
                 const SvdConfig& cfg, SvdStats* stats = nullptr);

/// Design matrix of a graph for the given spec (no pseudo-dropout). Label
/// re-use draws on the labels of the graph's training nodes only.
LinOp nc_design(const GraphData& graph, const NcSpec& spec);

/// n x y logits of the rebuilt design matrix times W*.
Matrix infer_nc(const NcModel& model, const GraphData& graph);

std::vector<int> argmax_rows(const Matrix& logits);

/// Rank-k principal components (scores U S) of the column-centered X,
/// computed matrix-free.
Matrix pca(const Matrix& X, Index k, const SvdConfig& cfg);

}  // namespace isvd
