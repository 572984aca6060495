#include "isvd/splitrelu.hpp"

#include "isvd/design.hpp"
#include "isvd/synthetic.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace isvd;
using isvd::testing::dense_of;
using isvd::testing::random_matrix;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Entry-by-entry evaluation of the Split-ReLu network.
Matrix naive_forward(const SplitReluNet& net, const Matrix& A, const Matrix& X) {
  auto matmul = [](const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < b.cols(); ++j) {
        double acc = 0;
        for (Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
        out(i, j) = acc;
      }
    return out;
  };
  auto split = [](const Matrix& p, const Matrix& n) {
    Matrix out(p.rows(), p.cols());
    for (Index i = 0; i < p.rows(); ++i)
      for (Index j = 0; j < p.cols(); ++j) out(i, j) = std::max(0.0, p(i, j)) - std::max(0.0, n(i, j));
    return out;
  };
  Matrix H = X;
  Matrix out = split(matmul(H, net.Wop[0]), matmul(H, net.Won[0]));
  for (int l = 0; l < net.layers(); ++l) {
    const Matrix AH = matmul(A, H);
    H = split(matmul(AH, net.Wp[l]), matmul(AH, net.Wn[l]));
    out += split(matmul(H, net.Wop[l + 1]), matmul(H, net.Won[l + 1]));
  }
  return out;
}

}  // namespace

TEST(SplitReluInit, BranchesCancelBlockwise) {
  Rng rng(1);
  const Matrix W = random_matrix(4 * 3, 2, rng);
  const SplitReluNet net = splitrelu_init(W, 4, 2);
  ASSERT_EQ(net.layers(), 2);
  for (int l = 0; l < 2; ++l) EXPECT_EQ(max_abs(net.Wp[l] + net.Wn[l]), 0.0);
  for (int l = 0; l <= 2; ++l) {
    EXPECT_EQ(max_abs(net.Wop[l] + net.Won[l]), 0.0);
    EXPECT_TRUE(net.Wop[l] == W.middleRows(4 * l, 4));
  }
}

TEST(SplitReluInit, ZeroLayersHasOneTap) {
  Rng rng(2);
  const Matrix W = random_matrix(3, 2, rng);
  const SplitReluNet net = splitrelu_init(W, 3, 0);
  EXPECT_EQ(net.layers(), 0);
  ASSERT_EQ(net.Wop.size(), 1u);
  EXPECT_TRUE(net.Wop[0] == W);
}

TEST(SplitReluInit, RejectsRowMismatch) {
  EXPECT_THROW(splitrelu_init(Matrix::Ones(7, 2), 3, 1), ShapeError);
}

TEST(SplitReluForward, InitEqualsLinearModel) {
  Rng rng(3);
  for (int L : {0, 1, 2, 4}) {
    const GraphData g = random_graph(25, 60, 10 + L);
    const Matrix X = random_matrix(25, 4, rng);
    const Matrix W = random_matrix(4 * (L + 1), 3, rng);
    const LinOp adj = sym_norm_adj(g.adjacency);
    const Matrix linear = evaluate(build_nc(adj, X, L), W);
    const Matrix net = splitrelu_forward(splitrelu_init(W, 4, L), adj, X);
    EXPECT_LE(max_abs(linear - net), 1e-8) << "L=" << L;
  }
}

TEST(SplitReluForward, ZeroNegativeBranchIsPlainRelu) {
  Rng rng(4);
  const GraphData g = path_graph(5);
  const LinOp adj = sym_norm_adj(g.adjacency);
  const Matrix A = dense_of(adj);
  const Matrix X = random_matrix(5, 3, rng);
  SplitReluNet net;
  net.Wp = {random_matrix(3, 3, rng)};
  net.Wn = {Matrix::Zero(3, 3)};
  net.Wop = {Matrix::Zero(3, 2), random_matrix(3, 2, rng)};
  net.Won = {Matrix::Zero(3, 2), Matrix::Zero(3, 2)};
  const Matrix H1 = (A * X * net.Wp[0]).cwiseMax(0.0);
  const Matrix ref = (H1 * net.Wop[1]).cwiseMax(0.0);
  EXPECT_LE(max_abs(splitrelu_forward(net, adj, X) - ref), 1e-12);
}

TEST(SplitReluForward, PerturbedWeightsMatchNaiveReference) {
  Rng rng(5);
  const SparseMatrix Adj = adjacency_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}});
  const LinOp adj = sym_norm_adj(Adj);
  const Matrix X = random_matrix(5, 3, rng);
  SplitReluNet net = splitrelu_init(random_matrix(9, 2, rng), 3, 2);
  for (auto* group : {&net.Wp, &net.Wn, &net.Wop, &net.Won})
    for (auto& W : *group) W += 0.3 * random_matrix(W.rows(), W.cols(), rng);
  EXPECT_LE(max_abs(splitrelu_forward(net, adj, X) - naive_forward(net, dense_of(adj), X)), 1e-12);
}

TEST(SplitReluForward, RejectsShapeMismatch) {
  const LinOp adj = sym_norm_adj(path_graph(4).adjacency);
  const SplitReluNet net = splitrelu_init(Matrix::Ones(6, 2), 3, 1);
  EXPECT_THROW(splitrelu_forward(net, adj, Matrix::Ones(4, 2)), ShapeError);
  EXPECT_THROW(splitrelu_forward(net, adj, Matrix::Ones(5, 3)), ShapeError);
}
