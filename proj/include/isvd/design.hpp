#pragma once

// Implicit design matrices for closed-form graph learning.
//
//   network embedding:    M = sum_q w_q B^q - lambda (1 1^T - A),  B = D^-1 A or A_hat
//   node classification:  M = [X | A_hat X | ... | A_hat^L X]  (+ label re-use blocks)
//
// All builders return LinOps; the n x n terms are never formed.

#include "isvd/linop.hpp"
#include "isvd/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace isvd {

/// D^-1 A as an explicit sparse matrix. Rows of isolated nodes stay zero.
SparseMatrix transition_matrix(const SparseMatrix& A);
/// (D+I)^-1/2 (A+I) (D+I)^-1/2.
SparseMatrix normalized_adjacency(const SparseMatrix& A);
/// A_hat - (D+I)^-1: propagation without the self-loop term.
SparseMatrix leak_free_propagation(const SparseMatrix& A);

LinOp transition(const SparseMatrix& A);
LinOp sym_norm_adj(const SparseMatrix& A);

/// Walk-length weights w_q = (C - q + 1) / (C (C + 1) / 2), q = 1..C.
std::vector<double> context_weights(int C);

struct NeSpec {
  double lambda = 0.0;
  int context = 1;
  bool symmetric = false;

  void validate() const;
};

LinOp build_ne(const SparseMatrix& A, const NeSpec& spec);

struct DropoutSpec {
  bool enabled = false;
  double rate = 0.5;
  std::uint64_t seed = 0;
  int replicas = 1;

  void validate() const;
};

struct NcSpec {
  int layers = 2;
  bool label_reuse = false;
  DropoutSpec dropout;

  void validate() const;
  /// Design width for d feature columns and y label columns.
  Index width(Index d, Index y) const;
};

/// [X | A_hat X | ... | A_hat^L X] as an n x d(L+1) operator.
LinOp build_nc(const LinOp& adj_hat, const Matrix& X, int layers);

/// Appends (A_hat - (D+I)^-1) Y_train and (A_hat - (D+I)^-1)^2 Y_train as two
/// more column blocks.
LinOp add_label_reuse(const LinOp& M, const SparseMatrix& A, const Matrix& Y_train);

struct PseudoDropout {
  LinOp op;                          // ConcatRows[M, PD_1(M), ..., PD_r(M)]
  std::vector<Index> train_rows;     // [train | train + n | ...]
  std::vector<std::vector<Vector>> masks;  // masks[replica][block]: 0/1 per row
};

/// Row-wise replication of M where every replica zeroes, per column block, a
/// seeded Bernoulli(rate) subset of that block's rows.
PseudoDropout pseudo_dropout(const LinOp& M, double rate, std::uint64_t seed,
                             const std::vector<Index>& train, int replicas = 1);

/// Stacks `copies` copies of Y vertically (labels matching a pseudo-dropout design).
Matrix replicate_rows(const Matrix& Y, int copies);

/// Reproducible description of a design matrix.
struct DesignSpec {
  std::optional<NeSpec> ne;
  std::optional<NcSpec> nc;
};

void to_json(nlohmann::json& j, const NeSpec& s);
void from_json(const nlohmann::json& j, NeSpec& s);
void to_json(nlohmann::json& j, const DropoutSpec& s);
void from_json(const nlohmann::json& j, DropoutSpec& s);
void to_json(nlohmann::json& j, const NcSpec& s);
void from_json(const nlohmann::json& j, NcSpec& s);
void to_json(nlohmann::json& j, const DesignSpec& s);
void from_json(const nlohmann::json& j, DesignSpec& s);

}  // namespace isvd
