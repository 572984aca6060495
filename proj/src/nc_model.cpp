#include "isvd/models.hpp"

#include <algorithm>

namespace isvd {

Matrix solve_least_norm(const LinOp& M, const Matrix& Y, const std::vector<Index>& rows,
                        const SvdConfig& cfg, SvdStats* stats) {
  if (rows.empty()) throw std::invalid_argument("solve: no training rows");
  if (Y.rows() != M.rows())
    throw ShapeError("solve: labels have " + std::to_string(Y.rows()) + " rows, design has " +
                     std::to_string(M.rows()));

  const LinOp gathered = gather_rows(M, rows);
  SvdConfig c = cfg;
  c.rank = std::min<Index>(cfg.rank, std::min(gathered.rows(), gathered.cols()));
  const SvdResult svd = isvd(gathered, c, stats);

  const double smax = svd.s.size() ? svd.s[0] : 0.0;
  if (!(smax > 0.0)) throw NumericalError("solve: design matrix has an all-zero singular spectrum");
  Vector inv = Vector::Zero(svd.s.size());
  for (Index i = 0; i < svd.s.size(); ++i)
    if (svd.s[i] > kPinvTolerance * smax) inv[i] = 1.0 / svd.s[i];

  Matrix Yr(rows.size(), Y.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) Yr.row(i) = Y.row(rows[i]);

  // Right to left: U^T Y is k x y, so nothing of size F x |rows| is formed.
  const Matrix UtY = svd.U.transpose() * Yr;
  return svd.V * (inv.asDiagonal() * UtY);
}

NcModel solve_nc(const LinOp& M, const Matrix& Y, const std::vector<Index>& rows, const NcSpec& spec,
                 const SvdConfig& cfg, SvdStats* stats) {
  NcModel model;
  model.W = solve_least_norm(M, Y, rows, cfg, stats);
  model.spec = spec;
  model.label_dim = Y.cols();
  model.feature_dim = (M.cols() - (spec.label_reuse ? 2 * Y.cols() : 0)) / (spec.layers + 1);
  return model;
}

LinOp nc_design(const GraphData& graph, const NcSpec& spec) {
  spec.validate();
  if (!graph.features) throw std::invalid_argument("node classification needs node features");
  const LinOp adj = sym_norm_adj(graph.adjacency);
  LinOp M = build_nc(adj, *graph.features, spec.layers);
  if (spec.label_reuse) {
    if (!graph.labels) throw std::invalid_argument("label re-use needs labels");
    M = add_label_reuse(M, graph.adjacency, masked_labels(*graph.labels, graph.node_splits.train));
  }
  return M;
}

Matrix infer_nc(const NcModel& model, const GraphData& graph) {
  if (!graph.features) throw std::invalid_argument("inference needs node features");
  if (graph.features->cols() != model.feature_dim)
    throw ShapeError("inference: features have width " + std::to_string(graph.features->cols()) +
                     ", model was trained on " + std::to_string(model.feature_dim));
  const LinOp M = nc_design(graph, model.spec);
  if (M.cols() != model.W.rows())
    throw ShapeError("inference: design width " + std::to_string(M.cols()) + " does not match W* with " +
                     std::to_string(model.W.rows()) + " rows");
  return evaluate(M, model.W);
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (Index i = 0; i < logits.rows(); ++i) {
    Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    out[i] = static_cast<int>(arg);
  }
  return out;
}

Matrix pca(const Matrix& X, Index k, const SvdConfig& cfg) {
  const Index n = X.rows();
  const Matrix mean = X.colwise().mean();
  const LinOp centered = leaf(X) - leaf(Matrix::Ones(n, 1)) * leaf(mean);
  SvdConfig c = cfg;
  c.rank = std::min<Index>(k, std::min(X.rows(), X.cols()));
  // With the full column space in the range finder one pass is already exact.
  if (static_cast<Index>(c.oversample_factor) * c.rank >= std::min(X.rows(), X.cols())) c.iterations = 1;
  const SvdResult r = isvd(centered, c);
  return r.U * r.s.asDiagonal();
}

}  // namespace isvd
