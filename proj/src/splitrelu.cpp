#include "isvd/splitrelu.hpp"

#include <string>

namespace isvd {

SplitReluNet splitrelu_init(const Matrix& W, Index d, int layers) {
  if (layers < 0) throw std::invalid_argument("splitrelu: layer count must be >= 0");
  if (W.rows() != d * (layers + 1))
    throw ShapeError("splitrelu: W* has " + std::to_string(W.rows()) + " rows, expected d(L+1) = " +
                     std::to_string(d * (layers + 1)));
  SplitReluNet net;
  const Matrix eye = Matrix::Identity(d, d);
  for (int l = 0; l < layers; ++l) {
    net.Wp.push_back(eye);
    net.Wn.push_back(-eye);
  }
  for (int l = 0; l <= layers; ++l) {
    net.Wop.push_back(W.middleRows(d * l, d));
    net.Won.push_back(-W.middleRows(d * l, d));
  }
  return net;
}

namespace {

Matrix relu(const Matrix& m) { return m.cwiseMax(0.0); }

}  // namespace

Matrix splitrelu_forward(const SplitReluNet& net, const LinOp& adj, const Matrix& X) {
  const int L = net.layers();
  if (net.Wn.size() != net.Wp.size() || static_cast<int>(net.Wop.size()) != L + 1 ||
      net.Won.size() != net.Wop.size())
    throw ShapeError("splitrelu: inconsistent layer counts");
  if (adj.rows() != X.rows() || adj.cols() != X.rows())
    throw ShapeError("splitrelu: adjacency " + to_string(adj.shape()) + " does not match " +
                     std::to_string(X.rows()) + " feature rows");

  Matrix H = X;
  Matrix out;
  for (int l = 0; l <= L; ++l) {
    if (net.Wop[l].rows() != H.cols() || net.Won[l].rows() != H.cols() || net.Wop[l].cols() != net.Won[l].cols())
      throw ShapeError("splitrelu: output tap " + std::to_string(l) + " has the wrong shape");
    const Matrix tap = relu(H * net.Wop[l]) - relu(H * net.Won[l]);
    if (l == 0)
      out = tap;
    else if (tap.cols() != out.cols())
      throw ShapeError("splitrelu: output taps disagree on width");
    else
      out += tap;
    if (l == L) break;
    if (net.Wp[l].rows() != H.cols() || net.Wn[l].rows() != H.cols() || net.Wp[l].cols() != net.Wn[l].cols())
      throw ShapeError("splitrelu: layer " + std::to_string(l) + " has the wrong shape");
    const Matrix AH = evaluate(adj, H);
    H = relu(AH * net.Wp[l]) - relu(AH * net.Wn[l]);
  }
  return out;
}

}  // namespace isvd
