#pragma once

// Gaussian spectral kernel for edge scoring.
//
//   f(i, j) = U_i^T diag(E_x[s^x]) V_j,  x ~ N(mu, 1 / (2 exp(sbar))) restricted to [0.5, 2]
//
// The expectation is a softmax-weighted sum over a fixed 301-point grid.

#include "isvd/graph.hpp"
#include "isvd/models.hpp"

#include <array>
#include <functional>
#include <vector>

namespace isvd {

inline constexpr int kKernelGridSize = 301;

/// Grid points 0.5, 0.505, ..., 2.0.
const std::array<double, kKernelGridSize>& kernel_grid();

/// sbar for a given kernel width s (sbar = log(1 / (2 s^2))).
double sbar_from_width(double s);

struct KernelParams {
  double mu = 1.0;
  double sbar = sbar_from_width(0.01);
};

/// Softmax over the grid of -(x - mu)^2 exp(sbar).
Vector kernel_weights(const KernelParams& p);

/// Element-wise sum_x w_x s^x.
Vector kernel_spectrum(const Vector& s, const KernelParams& p);

/// Kernel-reweighted scores U_i^T diag(f(s)) V_j.
Vector kernel_scores(const NeModel& ne, const std::vector<Edge>& pairs, const KernelParams& p);

struct KernelLoss {
  double loss = 0.0;
  double d_mu = 0.0;
  double d_sbar = 0.0;
};

/// Cross-entropy E_pos[-log sig(f)] - k_n E_neg[log(1 - sig(f))] and its
/// gradient in (mu, sbar).
KernelLoss kernel_loss(const NeModel& ne, const std::vector<Edge>& pos, const std::vector<Edge>& neg,
                       double k_n, const KernelParams& p);

struct FinetuneConfig {
  int steps = 100;
  double lr = 1e-2;
  double k_n = 10.0;
};

struct FinetuneResult {
  KernelParams params;
  std::vector<double> loss_trace;  // loss before each step, then the final loss
};

using NegativeSampler = std::function<std::vector<Edge>(Index count)>;

/// Gradient descent on (mu, sbar). Negatives are drawn once (k_n per positive)
/// and kept fixed. Throws NumericalError on a non-finite loss.
FinetuneResult finetune_kernel(const NeModel& ne, const std::vector<Edge>& pos, const NegativeSampler& sampler,
                               const FinetuneConfig& cfg, KernelParams init = {});

}  // namespace isvd
