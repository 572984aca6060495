#include "isvd/linop.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <unordered_map>

namespace isvd {

namespace detail {

struct Node {
  OpKind kind = OpKind::LeafDense;
  Shape shape;
  std::uint64_t id = 0;
  std::vector<LinOp> children;
  double scalar = 1.0;
  int exponent = 1;
  std::shared_ptr<const std::vector<Index>> indices;
  std::shared_ptr<const Matrix> dense;
  std::shared_ptr<const SparseMatrix> sparse;
};

}  // namespace detail

namespace {

std::atomic<std::uint64_t> next_id{1};

const std::vector<Index>& empty_indices() {
  static const std::vector<Index> none;
  return none;
}

}  // namespace

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::LeafDense: return "LeafDense";
    case OpKind::LeafSparse: return "LeafSparse";
    case OpKind::Sum: return "Sum";
    case OpKind::Product: return "Product";
    case OpKind::Transpose: return "Transpose";
    case OpKind::ScalarTimes: return "ScalarTimes";
    case OpKind::Power: return "Power";
    case OpKind::ConcatRows: return "ConcatRows";
    case OpKind::ConcatCols: return "ConcatCols";
    case OpKind::GatherRows: return "GatherRows";
    case OpKind::GatherCols: return "GatherCols";
  }
  return "?";
}

LinOp make_node(detail::Node&& n) {
  n.id = next_id.fetch_add(1, std::memory_order_relaxed);
  return LinOp(std::make_shared<const detail::Node>(std::move(n)));
}

const detail::Node& LinOp::node() const {
  if (!node_) throw std::logic_error("use of an empty LinOp");
  return *node_;
}

Shape LinOp::shape() const { return node().shape; }
OpKind LinOp::kind() const { return node().kind; }
std::uint64_t LinOp::id() const { return node().id; }
std::span<const LinOp> LinOp::children() const { return node().children; }
double LinOp::scalar() const { return node().scalar; }
int LinOp::exponent() const { return node().exponent; }

const std::vector<Index>& LinOp::indices() const {
  const auto& idx = node().indices;
  return idx ? *idx : empty_indices();
}

const Matrix& LinOp::dense() const {
  if (!node().dense) throw std::logic_error("LinOp has no dense payload");
  return *node().dense;
}

const SparseMatrix& LinOp::sparse() const {
  if (!node().sparse) throw std::logic_error("LinOp has no sparse payload");
  return *node().sparse;
}

LinOp LinOp::T() const { return transpose(*this); }

// ---------------------------------------------------------------------------
// Construction

LinOp leaf(Matrix m) {
  if (!m.allFinite()) throw std::invalid_argument("leaf: matrix has non-finite entries");
  detail::Node n;
  n.kind = OpKind::LeafDense;
  n.shape = {m.rows(), m.cols()};
  n.dense = std::make_shared<const Matrix>(std::move(m));
  return make_node(std::move(n));
}

LinOp leaf(SparseMatrix m) {
  m.makeCompressed();
  for (Index k = 0; k < m.nonZeros(); ++k)
    if (!std::isfinite(m.valuePtr()[k]))
      throw std::invalid_argument("leaf: sparse matrix has non-finite entries");
  detail::Node n;
  n.kind = OpKind::LeafSparse;
  n.shape = {m.rows(), m.cols()};
  n.sparse = std::make_shared<const SparseMatrix>(std::move(m));
  return make_node(std::move(n));
}

namespace {

void require_children(const std::vector<LinOp>& ops, const char* what) {
  if (ops.empty()) throw ShapeError(std::string(what) + ": empty operand list");
  for (const auto& op : ops)
    if (!op) throw ShapeError(std::string(what) + ": empty LinOp operand");
}

}  // namespace

LinOp sum(std::vector<LinOp> terms) {
  require_children(terms, "sum");
  const Shape s = terms.front().shape();
  for (const auto& t : terms)
    if (t.shape() != s)
      throw ShapeError("sum: shape " + to_string(t.shape()) + " differs from " + to_string(s));
  detail::Node n;
  n.kind = OpKind::Sum;
  n.shape = s;
  n.children = std::move(terms);
  return make_node(std::move(n));
}

LinOp product(std::vector<LinOp> factors) {
  require_children(factors, "product");
  for (std::size_t i = 0; i + 1 < factors.size(); ++i)
    if (factors[i].cols() != factors[i + 1].rows())
      throw ShapeError("product: cannot chain " + to_string(factors[i].shape()) + " with " +
                       to_string(factors[i + 1].shape()));
  detail::Node n;
  n.kind = OpKind::Product;
  n.shape = {factors.front().rows(), factors.back().cols()};
  n.children = std::move(factors);
  return make_node(std::move(n));
}

LinOp scalar_times(double alpha, const LinOp& op) {
  if (!op) throw ShapeError("scalar_times: empty LinOp operand");
  if (!std::isfinite(alpha)) throw std::invalid_argument("scalar_times: non-finite scalar");
  detail::Node n;
  n.kind = OpKind::ScalarTimes;
  n.shape = op.shape();
  n.scalar = alpha;
  n.children = {op};
  return make_node(std::move(n));
}

LinOp power(const LinOp& op, int exponent) {
  if (!op) throw ShapeError("power: empty LinOp operand");
  if (exponent < 1) throw std::invalid_argument("power: exponent must be >= 1");
  if (op.rows() != op.cols()) throw ShapeError("power: operator " + to_string(op.shape()) + " is not square");
  detail::Node n;
  n.kind = OpKind::Power;
  n.shape = op.shape();
  n.exponent = exponent;
  n.children = {op};
  return make_node(std::move(n));
}

LinOp concat_rows(std::vector<LinOp> blocks) {
  require_children(blocks, "concat_rows");
  Index rows = 0;
  const Index cols = blocks.front().cols();
  for (const auto& b : blocks) {
    if (b.cols() != cols)
      throw ShapeError("concat_rows: block " + to_string(b.shape()) + " has " +
                       std::to_string(b.cols()) + " columns, expected " + std::to_string(cols));
    rows += b.rows();
  }
  detail::Node n;
  n.kind = OpKind::ConcatRows;
  n.shape = {rows, cols};
  n.children = std::move(blocks);
  return make_node(std::move(n));
}

LinOp concat_cols(std::vector<LinOp> blocks) {
  require_children(blocks, "concat_cols");
  Index cols = 0;
  const Index rows = blocks.front().rows();
  for (const auto& b : blocks) {
    if (b.rows() != rows)
      throw ShapeError("concat_cols: block " + to_string(b.shape()) + " has " +
                       std::to_string(b.rows()) + " rows, expected " + std::to_string(rows));
    cols += b.cols();
  }
  detail::Node n;
  n.kind = OpKind::ConcatCols;
  n.shape = {rows, cols};
  n.children = std::move(blocks);
  return make_node(std::move(n));
}

namespace {

LinOp make_gather(OpKind kind, const LinOp& op, std::vector<Index> idx) {
  if (!op) throw ShapeError("gather: empty LinOp operand");
  const Index bound = kind == OpKind::GatherRows ? op.rows() : op.cols();
  for (Index i : idx)
    if (i < 0 || i >= bound)
      throw ShapeError("gather: index " + std::to_string(i) + " out of range [0, " +
                       std::to_string(bound) + ")");
  detail::Node n;
  n.kind = kind;
  const auto count = static_cast<Index>(idx.size());
  n.shape = kind == OpKind::GatherRows ? Shape{count, op.cols()} : Shape{op.rows(), count};
  n.indices = std::make_shared<const std::vector<Index>>(std::move(idx));
  n.children = {op};
  return make_node(std::move(n));
}

}  // namespace

LinOp gather_rows(const LinOp& op, std::vector<Index> rows) {
  return make_gather(OpKind::GatherRows, op, std::move(rows));
}

LinOp gather_cols(const LinOp& op, std::vector<Index> cols) {
  return make_gather(OpKind::GatherCols, op, std::move(cols));
}

// ---------------------------------------------------------------------------
// Transpose: a DAG rewrite, memoized so shared sub-nodes stay shared.

namespace {

using TransposeMemo = std::unordered_map<std::uint64_t, LinOp>;

LinOp transpose_rec(const LinOp& op, TransposeMemo& memo);

std::vector<LinOp> transpose_all(std::span<const LinOp> ops, TransposeMemo& memo) {
  std::vector<LinOp> out;
  out.reserve(ops.size());
  for (const auto& c : ops) out.push_back(transpose_rec(c, memo));
  return out;
}

LinOp transpose_rec(const LinOp& op, TransposeMemo& memo) {
  if (auto it = memo.find(op.id()); it != memo.end()) return it->second;

  LinOp out;
  switch (op.kind()) {
    case OpKind::LeafDense:
    case OpKind::LeafSparse: {
      detail::Node n;
      n.kind = OpKind::Transpose;
      n.shape = {op.cols(), op.rows()};
      n.children = {op};
      out = make_node(std::move(n));
      break;
    }
    case OpKind::Transpose:
      out = op.child(0);
      break;
    case OpKind::Sum:
      out = sum(transpose_all(op.children(), memo));
      break;
    case OpKind::Product: {
      auto factors = transpose_all(op.children(), memo);
      std::reverse(factors.begin(), factors.end());
      out = product(std::move(factors));
      break;
    }
    case OpKind::ScalarTimes:
      out = scalar_times(op.scalar(), transpose_rec(op.child(0), memo));
      break;
    case OpKind::Power:
      out = power(transpose_rec(op.child(0), memo), op.exponent());
      break;
    case OpKind::ConcatRows:
      out = concat_cols(transpose_all(op.children(), memo));
      break;
    case OpKind::ConcatCols:
      out = concat_rows(transpose_all(op.children(), memo));
      break;
    case OpKind::GatherRows:
      out = gather_cols(transpose_rec(op.child(0), memo), op.indices());
      break;
    case OpKind::GatherCols:
      out = gather_rows(transpose_rec(op.child(0), memo), op.indices());
      break;
  }
  memo.emplace(op.id(), out);
  return out;
}

}  // namespace

LinOp transpose(const LinOp& op) {
  if (!op) throw ShapeError("transpose: empty LinOp operand");
  TransposeMemo memo;
  return transpose_rec(op, memo);
}

// ---------------------------------------------------------------------------
// Sugar

LinOp operator+(const LinOp& a, const LinOp& b) { return sum({a, b}); }
LinOp operator-(const LinOp& a, const LinOp& b) { return sum({a, scalar_times(-1.0, b)}); }
LinOp operator-(const LinOp& a) { return scalar_times(-1.0, a); }
LinOp operator*(const LinOp& a, const LinOp& b) { return product({a, b}); }
LinOp operator*(double alpha, const LinOp& a) { return scalar_times(alpha, a); }
LinOp operator*(const LinOp& a, double alpha) { return scalar_times(alpha, a); }

// ---------------------------------------------------------------------------
// Evaluation

void EvalCache::clear() {
  entries_.clear();
  fingerprint_ = 0;
  fingerprint_set_ = false;
}

std::uint64_t fingerprint(const Matrix& G) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001B3ULL;
    }
  };
  const Index dims[2] = {G.rows(), G.cols()};
  mix(dims, sizeof(dims));
  mix(G.data(), static_cast<std::size_t>(G.size()) * sizeof(double));
  return h;
}

class Evaluator {
 public:
  using Key = EvalCache::Key;
  using Ptr = std::shared_ptr<const Matrix>;

  Evaluator(EvalCache* cache, EvalCounters* counters) : cache_(cache), counters_(counters) {}

  // Returns op * rhs, where rhs equals the operators listed in `tail` applied to
  // the root right-hand matrix.
  Ptr eval(const LinOp& op, const Ptr& rhs, const Key& tail) {
    if (op.kind() == OpKind::Product || op.kind() == OpKind::Power) {
      std::vector<LinOp> factors;
      flatten(op, factors);
      Ptr cur = rhs;
      Key key = tail;
      for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        cur = eval(*it, cur, key);
        key.insert(key.begin(), it->id());
      }
      return cur;
    }

    Key key;
    key.reserve(tail.size() + 1);
    key.push_back(op.id());
    key.insert(key.end(), tail.begin(), tail.end());
    if (counters_) ++counters_->product_requests;
    if (cache_) {
      if (auto it = cache_->entries_.find(key); it != cache_->entries_.end()) {
        ++cache_->hits_;
        return it->second;
      }
      ++cache_->misses_;
    }
    Ptr result = compute(op, rhs, tail);
    if (cache_) cache_->entries_.emplace(std::move(key), result);
    return result;
  }

 private:
  static void flatten(const LinOp& op, std::vector<LinOp>& out) {
    if (op.kind() == OpKind::Product) {
      for (const auto& f : op.children()) flatten(f, out);
    } else if (op.kind() == OpKind::Power) {
      for (int q = 0; q < op.exponent(); ++q) flatten(op.child(0), out);
    } else {
      out.push_back(op);
    }
  }

  // Token for a linear map applied to the right-hand side that is not itself a
  // DAG node (row-block split of ConcatCols, scatter of GatherCols).
  static std::uint64_t rhs_token(const LinOp& op, std::uint64_t block) {
    return (std::uint64_t{1} << 63) | (op.id() << 20) | (block & 0xFFFFF);
  }

  static Key prepend(std::uint64_t token, const Key& tail) {
    Key k;
    k.reserve(tail.size() + 1);
    k.push_back(token);
    k.insert(k.end(), tail.begin(), tail.end());
    return k;
  }

  void count_leaf() {
    if (counters_) ++counters_->leaf_multiplications;
  }

  Ptr compute(const LinOp& op, const Ptr& rhs, const Key& tail) {
    const Matrix& g = *rhs;
    switch (op.kind()) {
      case OpKind::LeafDense:
        count_leaf();
        return std::make_shared<const Matrix>(op.dense() * g);
      case OpKind::LeafSparse:
        count_leaf();
        return std::make_shared<const Matrix>(op.sparse() * g);
      case OpKind::Transpose: {
        count_leaf();
        const LinOp& base = op.child(0);
        if (base.kind() == OpKind::LeafDense)
          return std::make_shared<const Matrix>(base.dense().transpose() * g);
        return std::make_shared<const Matrix>(base.sparse().transpose() * g);
      }
      case OpKind::Sum: {
        auto children = op.children();
        Matrix acc = *eval(children[0], rhs, tail);
        for (std::size_t i = 1; i < children.size(); ++i) acc += *eval(children[i], rhs, tail);
        return std::make_shared<const Matrix>(std::move(acc));
      }
      case OpKind::ScalarTimes:
        return std::make_shared<const Matrix>(op.scalar() * *eval(op.child(0), rhs, tail));
      case OpKind::ConcatRows: {
        Matrix out(op.rows(), g.cols());
        Index offset = 0;
        for (const auto& block : op.children()) {
          out.middleRows(offset, block.rows()) = *eval(block, rhs, tail);
          offset += block.rows();
        }
        return std::make_shared<const Matrix>(std::move(out));
      }
      case OpKind::ConcatCols: {
        Matrix acc = Matrix::Zero(op.rows(), g.cols());
        Index offset = 0;
        std::uint64_t b = 0;
        for (const auto& block : op.children()) {
          auto part = std::make_shared<const Matrix>(g.middleRows(offset, block.cols()));
          acc += *eval(block, part, prepend(rhs_token(op, b), tail));
          offset += block.cols();
          ++b;
        }
        return std::make_shared<const Matrix>(std::move(acc));
      }
      case OpKind::GatherRows: {
        const Ptr full = eval(op.child(0), rhs, tail);
        const auto& idx = op.indices();
        Matrix out(static_cast<Index>(idx.size()), g.cols());
        for (std::size_t t = 0; t < idx.size(); ++t) out.row(static_cast<Index>(t)) = full->row(idx[t]);
        return std::make_shared<const Matrix>(std::move(out));
      }
      case OpKind::GatherCols: {
        const auto& idx = op.indices();
        auto scattered = std::make_shared<Matrix>(Matrix::Zero(op.child(0).cols(), g.cols()));
        for (std::size_t t = 0; t < idx.size(); ++t) scattered->row(idx[t]) += g.row(static_cast<Index>(t));
        return eval(op.child(0), scattered, prepend(rhs_token(op, 0xFFFFF), tail));
      }
      case OpKind::Product:
      case OpKind::Power:
        break;
    }
    throw std::logic_error("evaluate: unreachable operator kind");
  }

  EvalCache* cache_;
  EvalCounters* counters_;
};

Matrix evaluate(const LinOp& op, const Matrix& G, EvalCache* cache, EvalCounters* counters) {
  if (!op) throw ShapeError("evaluate: empty LinOp");
  if (G.rows() != op.cols())
    throw ShapeError("evaluate: operator " + to_string(op.shape()) + " cannot multiply " +
                     std::to_string(G.rows()) + "x" + std::to_string(G.cols()));
  if (cache) {
    const std::uint64_t fp = fingerprint(G);
    if (cache->fingerprint_set_ && cache->fingerprint_ != fp)
      throw CacheMismatch("evaluate: cache was populated with a different right-hand matrix");
    cache->fingerprint_ = fp;
    cache->fingerprint_set_ = true;
  }
  // Non-owning handle: G outlives the evaluation.
  std::shared_ptr<const Matrix> root(&G, [](const Matrix*) {});
  Evaluator ev(cache, counters);
  auto result = ev.eval(op, root, {});
  if (result.get() == &G) return G;
  return *result;
}

}  // namespace isvd
