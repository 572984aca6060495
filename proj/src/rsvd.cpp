#include "isvd/rsvd.hpp"

#include "isvd/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace isvd {

const char* to_string(Orthonorm o) { return o == Orthonorm::Cholesky ? "cholesky" : "qr"; }

Orthonorm parse_orthonorm(const std::string& name) {
  if (name == "cholesky") return Orthonorm::Cholesky;
  if (name == "qr") return Orthonorm::Qr;
  throw std::invalid_argument("unknown orthonormalization '" + name + "' (expected cholesky or qr)");
}

void SvdConfig::validate() const {
  if (rank < 1) throw std::invalid_argument("svd: rank must be >= 1");
  if (iterations < 1) throw std::invalid_argument("svd: iterations must be >= 1");
  if (oversample_factor < 1) throw std::invalid_argument("svd: oversample factor must be >= 1");
}

namespace {

// Pivot spread beyond which the Gram matrix is treated as singular, and beyond
// which a second pass is needed to reach orthonormality near machine precision.
constexpr double kSingularPivotRatio = 1e-6;
constexpr double kRefinePivotRatio = 1e-2;

struct CholeskyPass {
  Matrix q;
  double pivot_ratio = 0.0;
};

std::optional<CholeskyPass> cholesky_pass(const Matrix& Q, double jitter) {
  const Index k = Q.cols();
  Matrix gram = Matrix::Zero(k, k);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Q.transpose());
  if (jitter > 0.0) gram.diagonal().array() += jitter;

  Eigen::LLT<Matrix, Eigen::Lower> llt(gram);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix upper = llt.matrixU();
  const auto diag = upper.diagonal().cwiseAbs();
  const double dmax = diag.maxCoeff();
  const double dmin = diag.minCoeff();
  if (!(dmax > 0.0) || !std::isfinite(dmax)) return std::nullopt;
  const double ratio = dmin / dmax;
  if (ratio < kSingularPivotRatio) return std::nullopt;

  CholeskyPass out;
  out.q = Q;
  upper.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(out.q);
  out.pivot_ratio = ratio;
  return out;
}

}  // namespace

std::optional<Matrix> orthonorm_cholesky(const Matrix& Q, double jitter) {
  auto pass = cholesky_pass(Q, jitter);
  if (!pass) return std::nullopt;
  return std::move(pass->q);
}

Matrix orthonorm_qr(const Matrix& Q) {
  Eigen::HouseholderQR<Matrix> qr(Q);
  return qr.householderQ() * Matrix::Identity(Q.rows(), Q.cols());
}

Matrix orthonormalize(const Matrix& Q, Orthonorm method, SvdStats* stats) {
  if (stats) ++stats->orthonormalizations;
  if (Q.cols() > Q.rows())
    throw ShapeError("orthonormalize: " + std::to_string(Q.cols()) + " columns exceed " +
                     std::to_string(Q.rows()) + " rows");
  if (method == Orthonorm::Qr) return orthonorm_qr(Q);

  if (auto pass = cholesky_pass(Q, 0.0)) {
    if (pass->pivot_ratio >= kRefinePivotRatio) return std::move(pass->q);
    if (auto refined = cholesky_pass(pass->q, 0.0)) {
      if (stats) ++stats->cholesky_refinements;
      return std::move(refined->q);
    }
  }

  if (stats) ++stats->jitter_retries;
  const double jitter = 1e-10 * Q.colwise().squaredNorm().sum() / static_cast<double>(Q.cols());
  if (jitter > 0.0) {
    if (auto pass = cholesky_pass(Q, jitter)) {
      // The jittered factor is only accepted if an exact pass on its output succeeds.
      if (auto refined = cholesky_pass(pass->q, 0.0)) {
        if (stats) ++stats->cholesky_refinements;
        return std::move(refined->q);
      }
    }
  }

  if (stats) ++stats->qr_fallbacks;
  return orthonorm_qr(Q);
}

void canonicalize_signs(SvdResult& r) {
  for (Index j = 0; j < r.U.cols(); ++j) {
    Index arg = 0;
    r.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (r.U(arg, j) < 0.0) {
      r.U.col(j) *= -1.0;
      r.V.col(j) *= -1.0;
    }
  }
}

SvdResult isvd(const LinOp& op, const SvdConfig& cfg, SvdStats* stats) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index r = op.rows();
  const Index c = op.cols();
  const Index k = cfg.rank;
  if (k > std::min(r, c))
    throw std::invalid_argument("svd: rank " + std::to_string(k) + " exceeds min dimension of " +
                                to_string(op.shape()));
  const Index work = std::min<Index>(static_cast<Index>(cfg.oversample_factor) * k, std::min(r, c));

  SvdStats local;
  SvdStats& st = stats ? *stats : local;
  st.working_rank = work;
  EvalCounters counters;

  const LinOp opT = transpose(op);
  auto apply = [&](const LinOp& m, const Matrix& g) {
    if (!cfg.use_cache) return evaluate(m, g, nullptr, &counters);
    EvalCache cache;
    Matrix out = evaluate(m, g, &cache, &counters);
    st.cache_hits += cache.hit_count();
    st.cache_misses += cache.miss_count();
    return out;
  };

  Rng rng(cfg.seed);
  Matrix Q = gaussian_matrix(c, work, rng);
  for (int i = 0; i < cfg.iterations; ++i) {
    Q = orthonormalize(apply(op, Q), cfg.orthonorm, &st);
    Q = orthonormalize(apply(opT, Q), cfg.orthonorm, &st);
  }
  Q = orthonormalize(apply(op, Q), cfg.orthonorm, &st);

  // B^T = M^T Q is c x work; decompose it instead of the wide B.
  const Matrix Bt = apply(opT, Q);
  Eigen::JacobiSVD<Matrix> svd(Bt, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdResult out;
  out.s = svd.singularValues().head(k);
  out.V = svd.matrixU().leftCols(k);
  out.U = Q * svd.matrixV().leftCols(k);
  canonicalize_signs(out);

  st.leaf_multiplications += counters.leaf_multiplications;
  st.product_requests += counters.product_requests;
  st.wall_time_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

nlohmann::json svd_report(const SvdConfig& cfg, const SvdStats& stats) {
  return {
      {"rank", cfg.rank},
      {"iterations", cfg.iterations},
      {"oversample_factor", cfg.oversample_factor},
      {"working_rank", stats.working_rank},
      {"orthonorm", to_string(cfg.orthonorm)},
      {"seed", cfg.seed},
      {"generator", std::string(kGeneratorName)},
      {"cache", cfg.use_cache},
      {"wall_time_ms", stats.wall_time_ms},
      {"leaf_multiplications", stats.leaf_multiplications},
      {"product_requests", stats.product_requests},
      {"cache_hits", stats.cache_hits},
      {"cache_misses", stats.cache_misses},
      {"cholesky_refinements", stats.cholesky_refinements},
      {"jitter_retries", stats.jitter_retries},
      {"qr_fallbacks", stats.qr_fallbacks},
  };
}

}  // namespace isvd
