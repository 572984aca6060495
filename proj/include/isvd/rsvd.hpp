#pragma once

#include "isvd/linop.hpp"
#include "isvd/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace isvd {

enum class Orthonorm { Cholesky, Qr };

const char* to_string(Orthonorm o);
Orthonorm parse_orthonorm(const std::string& name);

struct SvdConfig {
  Index rank = 1;
  int iterations = 8;
  int oversample_factor = 2;  // working rank = oversample_factor * rank, clamped
  std::uint64_t seed = 0;
  Orthonorm orthonorm = Orthonorm::Cholesky;
  bool use_cache = true;

  void validate() const;
};

/// Truncated factors: U (r x k) and V (c x k) have orthonormal columns, s is
/// non-negative and non-increasing.
struct SvdResult {
  Matrix U;
  Vector s;
  Matrix V;

  Index rank() const { return s.size(); }
};

struct SvdStats {
  double wall_time_ms = 0.0;
  std::uint64_t leaf_multiplications = 0;
  std::uint64_t product_requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t orthonormalizations = 0;
  std::uint64_t cholesky_refinements = 0;
  std::uint64_t jitter_retries = 0;
  std::uint64_t qr_fallbacks = 0;
  Index working_rank = 0;
};

/// One Cholesky orthonormalization pass: returns Q * L^-T with L = chol(Q^T Q + jitter*I).
/// Returns nullopt when Q^T Q is not numerically positive definite, i.e. when
/// the factorization breaks down or its pivots span more than six orders of
/// magnitude.
std::optional<Matrix> orthonorm_cholesky(const Matrix& Q, double jitter = 0.0);

/// Thin Q factor of a Householder QR.
Matrix orthonorm_qr(const Matrix& Q);

/// Orthonormalizes with the requested method. The Cholesky path retries once
/// with diagonal jitter and then falls back to QR, so it never fails.
Matrix orthonormalize(const Matrix& Q, Orthonorm method, SvdStats* stats = nullptr);

/// Rank-k SVD of an implicit matrix via randomized subspace iteration.
SvdResult isvd(const LinOp& op, const SvdConfig& cfg, SvdStats* stats = nullptr);

/// Flips each (U, V) column pair so the largest-magnitude entry of U's column is positive.
void canonicalize_signs(SvdResult& r);

nlohmann::json svd_report(const SvdConfig& cfg, const SvdStats& stats);

}  // namespace isvd
