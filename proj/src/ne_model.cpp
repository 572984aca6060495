#include "isvd/models.hpp"

namespace isvd {

Matrix NeModel::left() const { return svd.U * svd.s.cwiseSqrt().asDiagonal(); }

Matrix NeModel::right() const { return svd.V * svd.s.cwiseSqrt().asDiagonal(); }

double NeModel::score(Index i, Index j) const {
  return (svd.U.row(i).transpose().cwiseProduct(svd.s)).dot(svd.V.row(j).transpose());
}

Vector NeModel::scores(const std::vector<Edge>& pairs) const {
  Vector out(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const auto [i, j] = pairs[e];
    if (i < 0 || i >= svd.U.rows() || j < 0 || j >= svd.V.rows())
      throw ShapeError("score: pair (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    out[e] = score(i, j);
  }
  return out;
}

NeModel train_ne(const LinOp& M, const SvdConfig& cfg, SvdStats* stats) {
  if (M.rows() != M.cols()) throw ShapeError("train_ne: design matrix must be square, got " + to_string(M.shape()));
  return NeModel{isvd(M, cfg, stats)};
}

}  // namespace isvd
