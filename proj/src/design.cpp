#include "isvd/design.hpp"

#include "isvd/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isvd {

namespace {

void check_square(const SparseMatrix& A, const char* what) {
  if (A.rows() != A.cols())
    throw ShapeError(std::string(what) + ": adjacency must be square, got " +
                     to_string(Shape{A.rows(), A.cols()}));
}

Vector degrees(const SparseMatrix& A) {
  Vector deg = Vector::Zero(A.rows());
  for (Index i = 0; i < A.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      if (it.value() < 0.0) throw std::invalid_argument("adjacency has a negative entry");
      deg[i] += it.value();
    }
  return deg;
}

SparseMatrix diagonal(const Vector& d) {
  SparseMatrix D(d.size(), d.size());
  D.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) D.insert(i, i) = d[i];
  D.makeCompressed();
  return D;
}

}  // namespace

SparseMatrix transition_matrix(const SparseMatrix& A) {
  check_square(A, "transition");
  const Vector deg = degrees(A);
  Vector inv = Vector::Zero(deg.size());
  for (Index i = 0; i < deg.size(); ++i)
    if (deg[i] > 0.0) inv[i] = 1.0 / deg[i];
  SparseMatrix T = diagonal(inv) * A;
  T.makeCompressed();
  return T;
}

SparseMatrix normalized_adjacency(const SparseMatrix& A) {
  check_square(A, "sym_norm_adj");
  const Vector deg = degrees(A);
  const Vector inv_sqrt = (deg.array() + 1.0).rsqrt().matrix();
  SparseMatrix eye(A.rows(), A.cols());
  eye.setIdentity();
  const SparseMatrix Dh = diagonal(inv_sqrt);
  SparseMatrix out = Dh * (A + eye) * Dh;
  out.makeCompressed();
  return out;
}

SparseMatrix leak_free_propagation(const SparseMatrix& A) {
  const Vector deg = degrees(A);
  const Vector self = (deg.array() + 1.0).inverse().matrix();
  SparseMatrix out = normalized_adjacency(A) - diagonal(self);
  // Diagonal entries cancel to (rounding) zero; drop them so they cannot leak.
  out.prune([](Index r, Index c, double) { return r != c; });
  out.makeCompressed();
  return out;
}

LinOp transition(const SparseMatrix& A) { return leaf(transition_matrix(A)); }

LinOp sym_norm_adj(const SparseMatrix& A) { return leaf(normalized_adjacency(A)); }

std::vector<double> context_weights(int C) {
  if (C < 1) throw std::invalid_argument("context window must be >= 1, got " + std::to_string(C));
  const double total = C * (C + 1) / 2.0;
  std::vector<double> w(C);
  for (int q = 1; q <= C; ++q) w[q - 1] = (C - q + 1) / total;
  return w;
}

void NeSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("ne: lambda must be a finite non-negative number");
  if (context < 1) throw std::invalid_argument("ne: context window C must be >= 1");
}

LinOp build_ne(const SparseMatrix& A, const NeSpec& spec) {
  spec.validate();
  check_square(A, "build_ne");
  const Index n = A.rows();
  if (n < 1) throw ShapeError("build_ne: empty graph");

  const LinOp B = spec.symmetric ? sym_norm_adj(A) : transition(A);
  const auto w = context_weights(spec.context);
  std::vector<LinOp> terms;
  terms.reserve(w.size() + 1);
  for (int q = 1; q <= spec.context; ++q) terms.push_back(w[q - 1] * power(B, q));

  if (spec.lambda > 0.0) {
    const LinOp ones = leaf(Matrix::Ones(n, 1));
    terms.push_back(-spec.lambda * (ones * ones.T() - leaf(A)));
  }
  return terms.size() == 1 ? terms.front() : sum(std::move(terms));
}

void DropoutSpec::validate() const {
  if (!enabled) return;
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must lie in (0, 1)");
  if (replicas < 1) throw std::invalid_argument("dropout replicas must be >= 1");
}

void NcSpec::validate() const {
  if (layers < 0) throw std::invalid_argument("nc: layer count must be >= 0");
  dropout.validate();
}

Index NcSpec::width(Index d, Index y) const {
  return d * (layers + 1) + (label_reuse ? 2 * y : 0);
}

LinOp build_nc(const LinOp& adj_hat, const Matrix& X, int layers) {
  if (X.size() == 0) throw std::invalid_argument("build_nc: feature matrix is empty");
  if (layers < 0) throw std::invalid_argument("build_nc: layer count must be >= 0");
  if (adj_hat.rows() != adj_hat.cols() || adj_hat.cols() != X.rows())
    throw ShapeError("build_nc: propagation operator " + to_string(adj_hat.shape()) +
                     " does not match " + std::to_string(X.rows()) + " feature rows");

  const LinOp x = leaf(X);
  if (layers == 0) return x;
  std::vector<LinOp> blocks{x};
  for (int q = 1; q <= layers; ++q) blocks.push_back(product({power(adj_hat, q), x}));
  return concat_cols(std::move(blocks));
}

LinOp add_label_reuse(const LinOp& M, const SparseMatrix& A, const Matrix& Y_train) {
  if (Y_train.rows() != M.rows() || A.rows() != M.rows())
    throw ShapeError("label re-use: labels have " + std::to_string(Y_train.rows()) +
                     " rows and adjacency " + std::to_string(A.rows()) + ", design has " +
                     std::to_string(M.rows()));
  if (Y_train.cols() == 0) throw ShapeError("label re-use: label matrix has no columns");

  const LinOp P = leaf(leak_free_propagation(A));
  const LinOp y = leaf(Y_train);
  std::vector<LinOp> blocks;
  if (M.kind() == OpKind::ConcatCols)
    blocks.assign(M.children().begin(), M.children().end());
  else
    blocks.push_back(M);
  blocks.push_back(P * y);
  blocks.push_back(product({P, P, y}));
  return concat_cols(std::move(blocks));
}

PseudoDropout pseudo_dropout(const LinOp& M, double rate, std::uint64_t seed,
                             const std::vector<Index>& train, int replicas) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must lie in (0, 1)");
  if (replicas < 1) throw std::invalid_argument("dropout replicas must be >= 1");
  const Index n = M.rows();
  for (Index t : train)
    if (t < 0 || t >= n) throw ShapeError("pseudo-dropout: train index " + std::to_string(t) + " out of range");

  std::vector<LinOp> blocks;
  if (M.kind() == OpKind::ConcatCols)
    blocks.assign(M.children().begin(), M.children().end());
  else
    blocks.push_back(M);

  PseudoDropout out;
  std::vector<LinOp> stack{M};
  Rng rng(seed);
  for (int r = 0; r < replicas; ++r) {
    std::vector<Vector> masks;
    std::vector<LinOp> masked;
    for (const LinOp& b : blocks) {
      Vector keep(n);
      for (Index i = 0; i < n; ++i) keep[i] = rng.bernoulli(rate) ? 0.0 : 1.0;
      SparseMatrix D(n, n);
      D.reserve(Eigen::VectorXi::Constant(n, 1));
      for (Index i = 0; i < n; ++i)
        if (keep[i] != 0.0) D.insert(i, i) = 1.0;
      D.makeCompressed();
      masked.push_back(leaf(std::move(D)) * b);
      masks.push_back(std::move(keep));
    }
    stack.push_back(masked.size() == 1 ? masked.front() : concat_cols(std::move(masked)));
    out.masks.push_back(std::move(masks));
  }
  out.op = concat_rows(std::move(stack));

  out.train_rows.reserve(train.size() * (replicas + 1));
  for (int r = 0; r <= replicas; ++r)
    for (Index t : train) out.train_rows.push_back(t + r * n);
  return out;
}

Matrix replicate_rows(const Matrix& Y, int copies) {
  if (copies < 1) throw std::invalid_argument("replicate_rows: copies must be >= 1");
  return Y.replicate(copies, 1);
}

void to_json(nlohmann::json& j, const NeSpec& s) {
  j = {{"lambda", s.lambda}, {"C", s.context}, {"symmetric", s.symmetric}};
}

void from_json(const nlohmann::json& j, NeSpec& s) {
  s = NeSpec{};
  s.lambda = j.value("lambda", s.lambda);
  s.context = j.value("C", s.context);
  s.symmetric = j.value("symmetric", s.symmetric);
  s.validate();
}

void to_json(nlohmann::json& j, const DropoutSpec& s) {
  j = {{"enabled", s.enabled}, {"rate", s.rate}, {"seed", s.seed}, {"replicas", s.replicas}};
}

void from_json(const nlohmann::json& j, DropoutSpec& s) {
  s = DropoutSpec{};
  s.enabled = j.value("enabled", s.enabled);
  s.rate = j.value("rate", s.rate);
  s.seed = j.value("seed", s.seed);
  s.replicas = j.value("replicas", s.replicas);
  s.validate();
}

void to_json(nlohmann::json& j, const NcSpec& s) {
  j = {{"L", s.layers}, {"label_reuse", s.label_reuse}, {"dropout", s.dropout}};
}

void from_json(const nlohmann::json& j, NcSpec& s) {
  s = NcSpec{};
  s.layers = j.value("L", s.layers);
  s.label_reuse = j.value("label_reuse", s.label_reuse);
  if (j.contains("dropout")) s.dropout = j.at("dropout").get<DropoutSpec>();
  s.validate();
}

void to_json(nlohmann::json& j, const DesignSpec& s) {
  j = nlohmann::json::object();
  if (s.ne) j["ne"] = *s.ne;
  if (s.nc) j["nc"] = *s.nc;
}

void from_json(const nlohmann::json& j, DesignSpec& s) {
  s = DesignSpec{};
  if (!j.is_object()) throw std::invalid_argument("design spec must be a JSON object");
  if (j.contains("ne")) s.ne = j.at("ne").get<NeSpec>();
  if (j.contains("nc")) s.nc = j.at("nc").get<NcSpec>();
  if (!s.ne && !s.nc) throw std::invalid_argument("design spec needs an \"ne\" or \"nc\" entry");
}

}  // namespace isvd
