#include "isvd/linop.hpp"

#include "isvd/design.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace isvd;
using isvd::testing::dense_of;
using isvd::testing::random_dag;
using isvd::testing::random_matrix;
using isvd::testing::random_sparse;

namespace {

constexpr double kTol = 1e-10;

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(Leaf, ShapeOfIdentity) {
  EXPECT_EQ(leaf(Matrix(Matrix::Identity(2, 2))).shape(), (Shape{2, 2}));
}

TEST(Leaf, SparseShapePassthrough) {
  SparseMatrix s(3, 4);
  s.insert(0, 0) = 1;
  s.insert(0, 3) = 2;
  s.insert(1, 1) = 3;
  s.insert(2, 2) = 4;
  s.insert(2, 3) = 5;
  const LinOp op = leaf(s);
  EXPECT_EQ(op.shape(), (Shape{3, 4}));
  EXPECT_EQ(op.kind(), OpKind::LeafSparse);
}

TEST(Leaf, EvaluatesToItsMatrixOnIdentity) {
  Rng rng(1);
  const Matrix M = random_matrix(6, 6, rng);
  EXPECT_LE(max_abs(evaluate(leaf(M), Matrix::Identity(6, 6)) - M), kTol);
}

TEST(Leaf, RejectsNonFiniteEntries) {
  Matrix m = Matrix::Ones(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(leaf(m), std::invalid_argument);
  SparseMatrix s(2, 2);
  s.insert(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(leaf(s), std::invalid_argument);
}

TEST(Combine, RejectsIncompatibleShapes) {
  const LinOp a = leaf(Matrix(Matrix::Ones(2, 3)));
  const LinOp b = leaf(Matrix(Matrix::Ones(3, 3)));
  EXPECT_THROW(sum({a, b}), ShapeError);
  EXPECT_THROW(product({a, a}), ShapeError);
  EXPECT_THROW(concat_rows({a, leaf(Matrix(Matrix::Ones(2, 2)))}), ShapeError);
  EXPECT_THROW(concat_cols({a, leaf(Matrix(Matrix::Ones(3, 2)))}), ShapeError);
  EXPECT_THROW(power(a, 2), ShapeError);
}

TEST(Combine, RejectsEmptyChildListsAndBadPayloads) {
  const LinOp b = leaf(Matrix(Matrix::Ones(3, 3)));
  EXPECT_THROW(sum({}), ShapeError);
  EXPECT_THROW(product({}), ShapeError);
  EXPECT_THROW(concat_rows({}), ShapeError);
  EXPECT_THROW(power(b, 0), std::invalid_argument);
  EXPECT_THROW(gather_rows(b, {0, 3}), ShapeError);
  EXPECT_THROW(gather_cols(b, {-1}), ShapeError);
}

TEST(Combine, DifferenceWithItselfIsZero) {
  Rng rng(2);
  const LinOp a = leaf(random_matrix(4, 4, rng));
  const Matrix G = random_matrix(4, 3, rng);
  EXPECT_EQ(max_abs(evaluate(sum({a, scalar_times(-1, a)}), G)), 0.0);
}

TEST(Combine, OnesOuterProductBroadcastsColumnSums) {
  const Index n = 7;
  const LinOp ones = leaf(Matrix(Matrix::Ones(n, 1)));
  const LinOp J = ones * ones.T();
  EXPECT_EQ(J.shape(), (Shape{n, n}));
  Rng rng(3);
  const Matrix G = random_matrix(n, 3, rng);
  const Matrix out = evaluate(J, G);
  for (Index i = 0; i < n; ++i) EXPECT_LE(max_abs(out.row(i) - G.colwise().sum()), kTol);
}

TEST(Combine, NoNumericWorkAtConstruction) {
  EvalCounters counters;
  const LinOp t = leaf(Matrix(Matrix::Identity(3, 3)));
  const LinOp big = sum({power(t, 5), t * t, transpose(t)});
  EXPECT_EQ(counters.leaf_multiplications, 0u);
  EXPECT_EQ(big.kind(), OpKind::Sum);
}

TEST(Evaluate, IdentityLeafReturnsG) {
  Rng rng(4);
  const Matrix G = random_matrix(3, 5, rng);
  EXPECT_EQ(evaluate(leaf(Matrix(Matrix::Identity(3, 3))), G), G);
}

TEST(Evaluate, PowerOfStochasticMatrixMatchesDenseCube) {
  Rng rng(5);
  Matrix T = random_matrix(5, 5, rng).cwiseAbs();
  T = T.array().colwise() / T.rowwise().sum().array();
  const Matrix G = random_matrix(5, 2, rng);
  EXPECT_LE(max_abs(evaluate(power(leaf(T), 3), G) - T * T * T * G), kTol);
}

TEST(Evaluate, RejectsDimensionMismatch) {
  const LinOp a = leaf(Matrix(Matrix::Ones(2, 3)));
  EXPECT_THROW(evaluate(a, Matrix::Ones(2, 1)), ShapeError);
}

TEST(Evaluate, EveryKindMatchesDenseOracle) {
  Rng rng(6);
  const LinOp A = leaf(random_matrix(5, 4, rng));
  const LinOp B = leaf(random_sparse(4, 5, 0.5, rng));
  const LinOp S = leaf(random_matrix(5, 5, rng));
  const std::vector<LinOp> ops{
      A,
      B,
      transpose(A),
      transpose(B),
      sum({S, S.T(), S}),
      product({A, B, S}),
      scalar_times(-2.5, A),
      power(S, 4),
      concat_rows({A, B.T()}),
      concat_cols({A, S}),
      gather_rows(A, {4, 0, 0, 2}),
      gather_cols(A, {3, 3, 1}),
  };
  for (const auto& op : ops) {
    const Matrix G = random_matrix(op.cols(), 3, rng);
    EXPECT_LE(max_abs(evaluate(op, G) - dense_of(op) * G), kTol) << to_string(op.kind());
  }
}

TEST(Evaluate, RandomDepthFourDagsMatchDenseOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const LinOp op = random_dag(4, 5, rng);
    const Matrix G = random_matrix(5, 3, rng);
    const Matrix ref = dense_of(op) * G;
    const double scale = std::max(1.0, max_abs(ref));
    EXPECT_LE(max_abs(evaluate(op, G) - ref), kTol * scale) << "trial " << trial;
  }
}

TEST(Transpose, DoubleTransposeEvaluatesIdentically) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const LinOp op = random_dag(3, 5, rng);
    const LinOp tt = transpose(transpose(op));
    EXPECT_EQ(tt.shape(), op.shape());
    const Matrix G = random_matrix(5, 2, rng);
    EXPECT_LE(max_abs(evaluate(tt, G) - evaluate(op, G)), kTol * std::max(1.0, max_abs(evaluate(op, G))));
  }
}

TEST(Transpose, DualityHoldsForRandomDags) {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const LinOp op = random_dag(3, 6, rng);
    const Matrix G = random_matrix(op.cols(), 3, rng);
    const Matrix H = random_matrix(op.rows(), 2, rng);
    const Matrix lhs = evaluate(transpose(op), H).transpose() * G;
    const Matrix rhs = H.transpose() * evaluate(op, G);
    EXPECT_LE(max_abs(lhs - rhs), kTol * std::max(1.0, max_abs(rhs))) << "trial " << trial;
  }
}

TEST(Transpose, GatherAndConcatSwapKinds) {
  const LinOp a = leaf(Matrix(Matrix::Ones(3, 2)));
  EXPECT_EQ(transpose(gather_rows(a, {0, 2})).kind(), OpKind::GatherCols);
  EXPECT_EQ(transpose(concat_cols({a, a})).kind(), OpKind::ConcatRows);
  EXPECT_EQ(transpose(transpose(a)).id(), a.id());
}

TEST(Transpose, ProductReversesFactors) {
  Rng rng(10);
  const LinOp a = leaf(random_matrix(3, 4, rng));
  const LinOp b = leaf(random_matrix(4, 2, rng));
  const LinOp t = transpose(a * b);
  ASSERT_EQ(t.kind(), OpKind::Product);
  EXPECT_EQ(t.shape(), (Shape{2, 3}));
  EXPECT_EQ(t.child(0).child(0).id(), b.id());
  EXPECT_EQ(t.child(1).child(0).id(), a.id());
}

TEST(Cache, TransparentOnRandomDags) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const LinOp op = random_dag(4, 5, rng);
    const Matrix G = random_matrix(5, 4, rng);
    EvalCache cache;
    const Matrix cached = evaluate(op, G, &cache);
    const Matrix plain = evaluate(op, G);
    EXPECT_TRUE(cached == plain) << "trial " << trial;
  }
}

TEST(Cache, ContextSumNeedsOnlyCLeafProducts) {
  Rng rng(12);
  const LinOp T = leaf(random_sparse(20, 20, 0.2, rng));
  for (int C : {1, 2, 3, 5, 10}) {
    const auto w = context_weights(C);
    std::vector<LinOp> terms;
    for (int q = 1; q <= C; ++q) terms.push_back(w[q - 1] * power(T, q));
    const LinOp M = sum(terms);
    const Matrix G = random_matrix(20, 3, rng);

    EvalCounters with, without;
    EvalCache cache;
    const Matrix a = evaluate(M, G, &cache, &with);
    const Matrix b = evaluate(M, G, nullptr, &without);
    EXPECT_TRUE(a == b);
    EXPECT_EQ(with.leaf_multiplications, static_cast<std::uint64_t>(C));
    EXPECT_EQ(without.leaf_multiplications, static_cast<std::uint64_t>(C * (C + 1) / 2));
    EXPECT_EQ(cache.hit_count() + cache.miss_count(), with.product_requests);
  }
}

TEST(Cache, SharedPrefixesAcrossTransposedDesign) {
  Rng rng(13);
  const Matrix X = random_matrix(8, 3, rng);
  const LinOp adj = leaf(random_sparse(8, 8, 0.3, rng));
  const LinOp M = build_nc(adj, X, 4);
  const Matrix H = random_matrix(8, 2, rng);
  EvalCounters with, without;
  EvalCache cache;
  const Matrix a = evaluate(transpose(M), H, &cache, &with);
  const Matrix b = evaluate(transpose(M), H, nullptr, &without);
  EXPECT_TRUE(a == b);
  EXPECT_LT(with.leaf_multiplications, without.leaf_multiplications);
}

TEST(Cache, RejectsDifferentRightHandMatrix) {
  Rng rng(14);
  const LinOp a = leaf(random_matrix(3, 3, rng));
  EvalCache cache;
  const Matrix G = random_matrix(3, 2, rng);
  evaluate(a, G, &cache);
  EXPECT_NO_THROW(evaluate(a, G, &cache));
  EXPECT_EQ(cache.hit_count(), 1u);
  Matrix G2 = G;
  G2(0, 0) += 1.0;
  EXPECT_THROW(evaluate(a, G2, &cache), CacheMismatch);
  cache.clear();
  EXPECT_TRUE(cache.empty());
  EXPECT_NO_THROW(evaluate(a, G2, &cache));
}

TEST(Ids, AreConstructionOrdered) {
  const LinOp a = leaf(Matrix(Matrix::Ones(1, 1)));
  const LinOp b = leaf(Matrix(Matrix::Ones(1, 1)));
  const LinOp c = a + b;
  EXPECT_LT(a.id(), b.id());
  EXPECT_LT(b.id(), c.id());
}
