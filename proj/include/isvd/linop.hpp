#pragma once

// Symbolic linear operators.
//
// A LinOp is a node in an immutable DAG. Leaves hold an explicit dense or
// sparse matrix; every other node only describes how to multiply by the
// matrix it represents. The one numeric entry point is evaluate(op, G),
// which returns op * G by walking the DAG downwards. Nothing is ever
// materialized entry-wise unless a leaf already holds it.
//
//   LinOp t = leaf(transition);
//   LinOp ones = leaf(Matrix::Ones(n, 1));
//   LinOp m = 0.5 * t + (1.0 / 3) * power(t, 2) - lambda * (ones * ones.T() - a);
//   Matrix y = evaluate(m, g);

#include "isvd/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace isvd {

enum class OpKind {
  LeafDense,
  LeafSparse,
  Sum,
  Product,
  Transpose,  // transposed view of a leaf; child(0) is the leaf
  ScalarTimes,
  Power,
  ConcatRows,
  ConcatCols,
  GatherRows,
  GatherCols,
};

const char* to_string(OpKind kind);

namespace detail {
struct Node;
}

class LinOp {
 public:
  LinOp() = default;

  bool valid() const { return static_cast<bool>(node_); }
  explicit operator bool() const { return valid(); }

  Shape shape() const;
  Index rows() const { return shape().rows; }
  Index cols() const { return shape().cols; }
  OpKind kind() const;
  /// Construction-order serial number; stable for the lifetime of the node.
  std::uint64_t id() const;

  std::span<const LinOp> children() const;
  const LinOp& child(std::size_t i) const { return children()[i]; }

  /// Payload accessors; each is only meaningful for the matching kind.
  double scalar() const;
  int exponent() const;
  const std::vector<Index>& indices() const;
  const Matrix& dense() const;
  const SparseMatrix& sparse() const;

  bool is_leaf() const {
    return kind() == OpKind::LeafDense || kind() == OpKind::LeafSparse;
  }

  LinOp T() const;

 private:
  explicit LinOp(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  const detail::Node& node() const;

  std::shared_ptr<const detail::Node> node_;

  friend LinOp make_node(detail::Node&&);
};

// Leaves. Entries must be finite.
LinOp leaf(Matrix m);
LinOp leaf(SparseMatrix m);

// Combinators. None of them performs numeric work.
LinOp sum(std::vector<LinOp> terms);
LinOp product(std::vector<LinOp> factors);
LinOp transpose(const LinOp& op);
LinOp scalar_times(double alpha, const LinOp& op);
LinOp power(const LinOp& op, int exponent);
LinOp concat_rows(std::vector<LinOp> blocks);
LinOp concat_cols(std::vector<LinOp> blocks);
LinOp gather_rows(const LinOp& op, std::vector<Index> rows);
LinOp gather_cols(const LinOp& op, std::vector<Index> cols);

LinOp operator+(const LinOp& a, const LinOp& b);
LinOp operator-(const LinOp& a, const LinOp& b);
LinOp operator-(const LinOp& a);
LinOp operator*(const LinOp& a, const LinOp& b);  // matrix product
LinOp operator*(double alpha, const LinOp& a);
LinOp operator*(const LinOp& a, double alpha);

struct EvalCounters;

/// Intermediate products of one evaluation batch, keyed by the ordered list of
/// operators (and right-hand-side transforms) that were applied to G.
/// A cache belongs to exactly one right-hand matrix; offering it a different
/// one throws CacheMismatch.
class EvalCache {
 public:
  std::uint64_t hit_count() const { return hits_; }
  std::uint64_t miss_count() const { return misses_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty() && !fingerprint_set_; }

  /// Drops all entries and the fingerprint; counters are kept.
  void clear();

 private:
  friend class Evaluator;
  friend Matrix evaluate(const LinOp&, const Matrix&, EvalCache*, EvalCounters*);

  using Key = std::vector<std::uint64_t>;
  std::map<Key, std::shared_ptr<const Matrix>> entries_;
  std::uint64_t fingerprint_ = 0;
  bool fingerprint_set_ = false;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

struct EvalCounters {
  std::uint64_t leaf_multiplications = 0;
  std::uint64_t product_requests = 0;  // cache lookups (hits + misses)
};

/// Returns op * G. Products run right-to-left; with a cache, any repeated
/// (operator list, G) product is computed once.
Matrix evaluate(const LinOp& op, const Matrix& G, EvalCache* cache = nullptr,
                EvalCounters* counters = nullptr);

std::uint64_t fingerprint(const Matrix& G);

}  // namespace isvd
