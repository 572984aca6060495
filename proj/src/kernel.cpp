#include "isvd/kernel.hpp"

#include <cmath>
#include <string>

namespace isvd {

const std::array<double, kKernelGridSize>& kernel_grid() {
  static const auto grid = [] {
    std::array<double, kKernelGridSize> g{};
    for (int i = 0; i < kKernelGridSize; ++i) g[i] = (100 + i) / 200.0;
    return g;
  }();
  return grid;
}

double sbar_from_width(double s) { return std::log(1.0 / (2.0 * s * s)); }

namespace {

Vector logits(const KernelParams& p) {
  const auto& grid = kernel_grid();
  const double scale = std::exp(p.sbar);
  Vector z(kKernelGridSize);
  for (int g = 0; g < kKernelGridSize; ++g) z[g] = -(grid[g] - p.mu) * (grid[g] - p.mu) * scale;
  return z;
}

Vector softmax(const Vector& z) {
  Vector w = (z.array() - z.maxCoeff()).exp().matrix();
  return w / w.sum();
}

// k x grid table of s_k^x.
Matrix power_table(const Vector& s) {
  const auto& grid = kernel_grid();
  Matrix P(s.size(), kKernelGridSize);
  for (Index k = 0; k < s.size(); ++k) {
    if (s[k] < 0.0) throw std::invalid_argument("kernel: singular values must be non-negative");
    for (int g = 0; g < kKernelGridSize; ++g) P(k, g) = s[k] == 0.0 ? 0.0 : std::pow(s[k], grid[g]);
  }
  return P;
}

// pairs x k matrix of U_i * V_j (element-wise).
Matrix pair_products(const NeModel& ne, const std::vector<Edge>& pairs) {
  const Index k = ne.svd.rank();
  Matrix A(pairs.size(), k);
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const auto [i, j] = pairs[e];
    if (i < 0 || i >= ne.svd.U.rows() || j < 0 || j >= ne.svd.V.rows())
      throw ShapeError("kernel: pair (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    A.row(e) = ne.svd.U.row(i).cwiseProduct(ne.svd.V.row(j));
  }
  return A;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Vector kernel_weights(const KernelParams& p) { return softmax(logits(p)); }

Vector kernel_spectrum(const Vector& s, const KernelParams& p) { return power_table(s) * kernel_weights(p); }

Vector kernel_scores(const NeModel& ne, const std::vector<Edge>& pairs, const KernelParams& p) {
  return pair_products(ne, pairs) * kernel_spectrum(ne.svd.s, p);
}

KernelLoss kernel_loss(const NeModel& ne, const std::vector<Edge>& pos, const std::vector<Edge>& neg,
                       double k_n, const KernelParams& p) {
  if (pos.empty() || neg.empty()) throw std::invalid_argument("kernel loss needs positive and negative pairs");
  const auto& grid = kernel_grid();
  const Matrix P = power_table(ne.svd.s);
  const Vector z = logits(p);
  const Vector w = softmax(z);

  // dz/dmu and dz/dsbar, then the softmax Jacobian applied to each.
  const double scale = std::exp(p.sbar);
  Vector dz_mu(kKernelGridSize);
  for (int g = 0; g < kKernelGridSize; ++g) dz_mu[g] = 2.0 * (grid[g] - p.mu) * scale;
  const Vector dw_mu = w.cwiseProduct((dz_mu.array() - w.dot(dz_mu)).matrix());
  const Vector dw_sbar = w.cwiseProduct((z.array() - w.dot(z)).matrix());

  // Each score is linear in w through the per-pair grid row C = A P.
  Matrix basis(kKernelGridSize, 3);
  basis << w, dw_mu, dw_sbar;
  const Matrix Fp = pair_products(ne, pos) * (P * basis);
  const Matrix Fn = pair_products(ne, neg) * (P * basis);

  KernelLoss out;
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());
  for (Index e = 0; e < Fp.rows(); ++e) {
    const double f = Fp(e, 0);
    out.loss += softplus(-f) / np;
    const double g = -sigmoid(-f) / np;
    out.d_mu += g * Fp(e, 1);
    out.d_sbar += g * Fp(e, 2);
  }
  for (Index e = 0; e < Fn.rows(); ++e) {
    const double f = Fn(e, 0);
    out.loss += k_n * softplus(f) / nn;
    const double g = k_n * sigmoid(f) / nn;
    out.d_mu += g * Fn(e, 1);
    out.d_sbar += g * Fn(e, 2);
  }
  return out;
}

FinetuneResult finetune_kernel(const NeModel& ne, const std::vector<Edge>& pos, const NegativeSampler& sampler,
                               const FinetuneConfig& cfg, KernelParams init) {
  if (cfg.k_n < 1.0) throw std::invalid_argument("finetune: k_n must be >= 1");
  if (cfg.steps < 0) throw std::invalid_argument("finetune: steps must be >= 0");
  if (pos.empty()) throw std::invalid_argument("finetune: no positive edges");
  const auto count = static_cast<Index>(std::ceil(cfg.k_n * static_cast<double>(pos.size())));
  const std::vector<Edge> neg = sampler(count);

  FinetuneResult out;
  out.params = init;
  for (int step = 0; step <= cfg.steps; ++step) {
    const KernelLoss l = kernel_loss(ne, pos, neg, cfg.k_n, out.params);
    if (!std::isfinite(l.loss) || !std::isfinite(l.d_mu) || !std::isfinite(l.d_sbar))
      throw NumericalError("finetune: non-finite loss at step " + std::to_string(step) + " (mu=" +
                           std::to_string(out.params.mu) + ", sbar=" + std::to_string(out.params.sbar) + ")");
    out.loss_trace.push_back(l.loss);
    if (step == cfg.steps) break;
    out.params.mu -= cfg.lr * l.d_mu;
    out.params.sbar -= cfg.lr * l.d_sbar;
  }
  return out;
}

}  // namespace isvd
