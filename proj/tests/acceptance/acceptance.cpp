// Acceptance checks. Prints one PASS/FAIL/SKIP line per check and exits
// nonzero when any check fails.

#include "isvd/cli.hpp"
#include "isvd/design.hpp"
#include "isvd/kernel.hpp"
#include "isvd/models.hpp"
#include "isvd/rsvd.hpp"
#include "isvd/sampling.hpp"
#include "isvd/splitrelu.hpp"
#include "isvd/synthetic.hpp"

#include "oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace isvd;
using namespace isvd::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::Fail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return {ok ? Status::Pass : Status::Fail, std::move(d)}; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

double residual(const Matrix& M, const SvdResult& r) {
  return (M - r.U * r.s.asDiagonal() * r.V.transpose()).norm();
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

SparseMatrix random_adjacency(Index n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return adjacency_from_edges(n, edges);
}

Matrix mpow(const Matrix& B, int q) {
  Matrix out = Matrix::Identity(B.rows(), B.cols());
  for (int i = 0; i < q; ++i) out = out * B;
  return out;
}

Matrix dense_adj_hat(const Matrix& A) {
  const Vector s = (A.rowwise().sum().array() + 1.0).pow(-0.5);
  return s.asDiagonal() * (A + Matrix::Identity(A.rows(), A.cols())) * s.asDiagonal();
}

Matrix dense_transition(const Matrix& A) {
  Matrix T = A;
  for (Index i = 0; i < A.rows(); ++i) {
    const double d = A.row(i).sum();
    if (d > 0) T.row(i) /= d;
  }
  return T;
}

Outcome svd_oracle() {
  Rng rng(101);
  double worst_sv = 0, worst_res = 0;
  for (int t = 0; t < 20; ++t) {
    const Index rows = 8 + rng.below(57), cols = 8 + rng.below(57);
    const Index rank = 1 + rng.below(std::min<Index>(24, std::min(rows, cols)));
    Vector s(rank);
    for (Index i = 0; i < rank; ++i) s[i] = 10.0 * std::pow(0.6, static_cast<double>(i));
    const Matrix M = with_spectrum(rows, cols, s, rng);
    const Index k = 1 + rng.below(std::min(rows, cols));
    SvdConfig cfg;
    cfg.rank = k;
    cfg.iterations = 8;
    cfg.seed = t;
    const SvdResult r = isvd::isvd(leaf(M), cfg);
    const Vector ref = oracle_singular_values(M);
    for (Index i = 0; i < std::min(k, rank); ++i) worst_sv = std::max(worst_sv, std::abs(r.s[i] - ref[i]) / ref[i]);
    for (Index i = rank; i < k; ++i) worst_sv = std::max(worst_sv, std::abs(r.s[i]) / ref[0]);
    if (k >= rank) worst_res = std::max(worst_res, residual(M, r));
  }
  return verdict(worst_sv <= 1e-6 && worst_res <= 1e-6,
                 "max relative sv error " + fmt(worst_sv) + ", max residual " + fmt(worst_res));
}

Outcome gap_decay() {
  Rng rng(202);
  const Index k = 6;
  std::vector<Matrix> mats;
  for (int m = 0; m < 10; ++m) {
    Vector s(k);
    for (Index i = 0; i < k; ++i) s[i] = 10.0 - static_cast<double>(i);
    mats.push_back(with_spectrum(64, 48, s, rng) + 0.5 * random_matrix(64, 48, rng));
  }
  std::vector<double> medians;
  for (int it : {1, 2, 4, 8}) {
    std::vector<double> gaps;
    for (int seed = 0; seed < 10; ++seed) {
      SvdConfig cfg;
      cfg.rank = k;
      cfg.iterations = it;
      cfg.seed = seed;
      gaps.push_back(residual(mats[seed], isvd::isvd(leaf(mats[seed]), cfg)) - optimal_residual(mats[seed], k));
    }
    std::sort(gaps.begin(), gaps.end());
    medians.push_back((gaps[4] + gaps[5]) / 2);
  }
  bool ok = true;
  std::string d = "median gaps";
  for (std::size_t i = 0; i < medians.size(); ++i) {
    d += " " + fmt(medians[i]);
    if (i && medians[i] > medians[i - 1]) ok = false;
  }
  return verdict(ok, d);
}

Outcome min_norm() {
  Rng rng(303);
  double worst_fit = 0;
  int violations = 0;
  for (int t = 0; t < 20; ++t) {
    const Index r = 3 + rng.below(8), c = r + 2 + rng.below(20), y = 1 + rng.below(4);
    const Matrix M = random_matrix(r, c, rng);
    const Matrix Y = random_matrix(r, y, rng);
    std::vector<Index> rows(r);
    for (Index i = 0; i < r; ++i) rows[i] = i;
    SvdConfig cfg;
    cfg.rank = r;
    cfg.seed = t;
    const Matrix W = solve_least_norm(leaf(M), Y, rows, cfg);
    worst_fit = std::max(worst_fit, (M * W - Y).norm());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const Matrix N = svd.matrixV().rightCols(c - r);
    for (int p = 0; p < 100; ++p) {
      const Matrix other = W + N * random_matrix(c - r, y, rng);
      if (other.norm() < W.norm()) ++violations;
    }
  }
  return verdict(worst_fit <= 1e-8 && violations == 0,
                 "max fit error " + fmt(worst_fit) + ", " + std::to_string(violations) + " smaller perturbed solutions");
}

Outcome splitrelu_equivalence() {
  Rng rng(404);
  double worst = 0;
  const int layers[] = {1, 2, 4};
  for (int t = 0; t < 10; ++t) {
    const Index n = 10 + rng.below(41), d = 2 + rng.below(5), y = 2 + rng.below(3);
    const int L = layers[t % 3];
    const SparseMatrix A = random_adjacency(n, 0.15, rng);
    const Matrix X = random_matrix(n, d, rng);
    const Matrix W = random_matrix(d * (L + 1), y, rng);
    const LinOp adj = sym_norm_adj(A);
    const Matrix linear = evaluate(build_nc(adj, X, L), W);
    const Matrix net = splitrelu_forward(splitrelu_init(W, d, L), adj, X);
    worst = std::max(worst, max_abs(linear - net));
  }
  return verdict(worst <= 1e-8, "max abs difference " + fmt(worst));
}

Outcome design_oracles() {
  Rng rng(505);
  double ne = 0, nc = 0, reuse = 0, dropout = 0;
  for (int t = 0; t < 10; ++t) {
    const Index n = 4 + rng.below(9);
    const SparseMatrix A = random_adjacency(n, 0.4, rng);
    const Matrix Ad(A);
    const int C = 1 + static_cast<int>(rng.below(5));
    const double lambda = 0.1 * rng.uniform();
    const bool symmetric = t % 2;
    const Matrix B = symmetric ? dense_adj_hat(Ad) : dense_transition(Ad);
    const auto w = context_weights(C);
    Matrix ref = -lambda * (Matrix::Ones(n, n) - Ad);
    for (int q = 1; q <= C; ++q) ref += w[q - 1] * mpow(B, q);
    ne = std::max(ne, max_abs(dense_of(build_ne(A, NeSpec{lambda, C, symmetric})) - ref));

    const Index d = 1 + rng.below(3);
    const int L = static_cast<int>(rng.below(4));
    const Matrix X = random_matrix(n, d, rng);
    const Matrix H = dense_adj_hat(Ad);
    Matrix nref(n, d * (L + 1));
    for (int q = 0; q <= L; ++q) nref.middleCols(q * d, d) = mpow(H, q) * X;
    const LinOp M = build_nc(sym_norm_adj(A), X, L);
    nc = std::max(nc, max_abs(dense_of(M) - nref));

    Matrix Y = Matrix::Zero(n, 2);
    for (Index i = 0; i < n; i += 2) Y(i, rng.below(2)) = 1;
    const Matrix P = H - Matrix((Ad.rowwise().sum().array() + 1.0).inverse().matrix().asDiagonal());
    Matrix rref(n, nref.cols() + 4);
    rref << nref, P * Y, P * P * Y;
    reuse = std::max(reuse, max_abs(dense_of(add_label_reuse(M, A, Y)) - rref));

    const PseudoDropout pd = pseudo_dropout(M, 0.5, 900 + t, {0, 1});
    Matrix masked = nref;
    for (int q = 0; q <= L; ++q) masked.middleCols(q * d, d) = pd.masks[0][q].asDiagonal() * nref.middleCols(q * d, d);
    Matrix dref(2 * n, nref.cols());
    dref << nref, masked;
    dropout = std::max(dropout, max_abs(dense_of(pd.op) - dref));
  }
  return verdict(std::max({ne, nc, reuse, dropout}) <= 1e-10,
                 "max abs error ne " + fmt(ne) + ", nc " + fmt(nc) + ", label reuse " + fmt(reuse) + ", dropout " +
                     fmt(dropout));
}

Outcome cache_effect() {
  Rng rng(606);
  const GraphData g = random_graph(300, 1500, 7);
  const Matrix G = random_matrix(300, 8, rng);
  bool identical = true, counts = true;
  std::string d = "leaf products (cached/uncached):";
  for (int C : {1, 2, 5, 10}) {
    const LinOp M = build_ne(g.adjacency, NeSpec{0.0, C, false});
    EvalCache cache;
    EvalCounters with, without;
    const Matrix a = evaluate(M, G, &cache, &with);
    const Matrix b = evaluate(M, G, nullptr, &without);
    identical = identical && a == b;
    counts = counts && with.leaf_multiplications == static_cast<std::uint64_t>(C) &&
             without.leaf_multiplications == static_cast<std::uint64_t>(C * (C + 1) / 2);
    d += " C=" + std::to_string(C) + " " + std::to_string(with.leaf_multiplications) + "/" +
         std::to_string(without.leaf_multiplications);
  }
  return verdict(identical && counts, d + (identical ? ", bit-identical" : ", results differ"));
}

Outcome kernel_gradient() {
  Rng rng(707);
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    NeModel m;
    const Index n = 20, k = 5;
    m.svd.U = orthonorm_qr(random_matrix(n, k, rng));
    m.svd.V = orthonorm_qr(random_matrix(n, k, rng));
    m.svd.s = Vector(k);
    for (Index i = 0; i < k; ++i) m.svd.s[i] = 2.5 - 0.4 * static_cast<double>(i);
    std::vector<Edge> pos, neg;
    for (int i = 0; i < 15; ++i) pos.emplace_back(rng.below(n), rng.below(n));
    for (int i = 0; i < 40; ++i) neg.emplace_back(rng.below(n), rng.below(n));
    const KernelParams p{0.8 + 0.5 * rng.uniform(), 1.0 + 4.0 * rng.uniform()};
    const KernelLoss l = kernel_loss(m, pos, neg, 10.0, p);
    const double h = 1e-5;
    const double fd_mu = (kernel_loss(m, pos, neg, 10.0, {p.mu + h, p.sbar}).loss -
                          kernel_loss(m, pos, neg, 10.0, {p.mu - h, p.sbar}).loss) / (2 * h);
    const double fd_sbar = (kernel_loss(m, pos, neg, 10.0, {p.mu, p.sbar + h}).loss -
                            kernel_loss(m, pos, neg, 10.0, {p.mu, p.sbar - h}).loss) / (2 * h);
    worst = std::max(worst, std::abs(l.d_mu - fd_mu) / std::max(1e-12, std::abs(fd_mu)));
    worst = std::max(worst, std::abs(l.d_sbar - fd_sbar) / std::max(1e-12, std::abs(fd_sbar)));
  }
  const GraphData g = random_graph(40, 120, 3);
  SvdConfig cfg;
  cfg.rank = 6;
  const NeModel m = train_ne(build_ne(g.adjacency, NeSpec{0.05, 3, false}), cfg);
  const auto pairs = g.edges();
  const double noop = max_abs(kernel_scores(m, pairs, KernelParams{1.0, 30.0}) - m.scores(pairs));
  return verdict(worst <= 1e-5 && noop <= 1e-6,
                 "max relative gradient error " + fmt(worst) + ", no-op score difference " + fmt(noop));
}

// Runs the CLI with a report file and returns the parsed report.
nlohmann::json run_cli(std::vector<std::string> args, const fs::path& report) {
  args.insert(args.begin(), "isvd");
  args.push_back("--report");
  args.push_back(report.string());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::cout.setstate(std::ios::failbit);
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.clear();
  if (rc != 0) throw std::runtime_error("isvd " + args[1] + " exited with " + std::to_string(rc));
  std::ifstream in(report);
  return nlohmann::json::parse(in);
}

Outcome reference_datasets() {
  const char* root = std::getenv("ISVD_DATA_DIR");
  if (!root || !*root) return {Status::Skip, "set ISVD_DATA_DIR to a directory with ppi/ and cora/ exports"};
  const fs::path data(root);
  const fs::path tmp = fs::temp_directory_path();
  std::string d;
  bool ok = true;

  auto t = Clock::now();
  const auto lp = run_cli({"lp", "--graph", (data / "ppi").string(), "--rank", "32", "--lambda", "0.02", "--C", "10"},
                          tmp / "isvd-acceptance-ppi.json");
  const double lp_s = seconds_since(t);
  const double auc = lp.at("metrics").at("auc").get<double>();
  ok = ok && std::abs(auc - 0.893) <= 0.015 && lp_s < 60;
  d += "PPI auc " + fmt(auc) + " in " + fmt(lp_s) + "s";

  t = Clock::now();
  const auto nc = run_cli({"nc", "--graph", (data / "cora").string(), "--layers", "15", "--rank", "100", "--ne-augment",
                           "--lambda", "0.05", "--C", "3"},
                          tmp / "isvd-acceptance-cora.json");
  const double nc_s = seconds_since(t);
  const double acc = nc.at("metrics").at("test_accuracy").get<double>();
  ok = ok && std::abs(acc - 0.820) <= 0.02 && nc_s < 60;
  d += ", Cora accuracy " + fmt(acc) + " in " + fmt(nc_s) + "s";
  return verdict(ok, d);
}

Outcome scaling() {
  Rng rng(909);
  std::vector<double> logm, logt;
  std::string d = "times";
  for (Index m : {Index(10000), Index(100000), Index(1000000)}) {
    const Index n = m / 5;
    const GraphData g = random_graph(n, m, 11);
    const LinOp M = build_ne(g.adjacency, NeSpec{0.05, 3, false});
    const Matrix G = random_matrix(n, 16, rng);
    double best = 1e300;
    for (int r = 0; r < 3; ++r) {
      const auto t = Clock::now();
      EvalCache cache;
      const Matrix out = evaluate(M, G, &cache);
      best = std::min(best, seconds_since(t));
      if (!out.allFinite()) return fail("non-finite output");
    }
    logm.push_back(std::log(static_cast<double>(m)));
    logt.push_back(std::log(best));
    d += " " + fmt(best * 1e3) + "ms";
  }
  const double mx = (logm[0] + logm[1] + logm[2]) / 3, my = (logt[0] + logt[1] + logt[2]) / 3;
  double num = 0, den = 0;
  for (int i = 0; i < 3; ++i) {
    num += (logm[i] - mx) * (logt[i] - my);
    den += (logm[i] - mx) * (logm[i] - mx);
  }
  const double slope = num / den;
  return verdict(slope <= 1.3, d + ", log-log slope " + fmt(slope));
}

Outcome ortho_speed() {
  Rng rng(1010);
  const Matrix Q = random_matrix(512, 64, rng);
  auto best_of = [](const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < 30; ++r) {
      const auto t = Clock::now();
      f();
      best = std::min(best, seconds_since(t));
    }
    return best;
  };
  Matrix sink;
  const double chol = best_of([&] { sink = orthonormalize(Q, Orthonorm::Cholesky); });
  const double qr = best_of([&] { sink = orthonormalize(Q, Orthonorm::Qr); });

  double worst = 0;
  const Matrix M = random_matrix(512, 300, rng);
  for (Orthonorm o : {Orthonorm::Cholesky, Orthonorm::Qr}) {
    SvdConfig cfg;
    cfg.rank = 32;
    cfg.orthonorm = o;
    const SvdResult r = isvd::isvd(leaf(M), cfg);
    worst = std::max({worst, orthonormality_error(r.U), orthonormality_error(r.V)});
  }
  return verdict(chol < qr && worst <= 1e-8, "cholesky " + fmt(chol * 1e3) + "ms, qr " + fmt(qr * 1e3) +
                                                 "ms, max orthonormality error " + fmt(worst));
}

Outcome finetune_decrease() {
  const GraphData g = random_graph(200, 500, 5);
  SvdConfig cfg;
  cfg.rank = 8;
  const NeModel m = train_ne(build_ne(g.adjacency, NeSpec{0.05, 3, false}), cfg);
  const NegativeSampler sampler = [&](Index count) { return sample_negatives(g, count, 21); };
  FinetuneConfig fc;
  fc.steps = 50;
  const FinetuneResult r = finetune_kernel(m, g.edges(), sampler, fc);
  for (std::size_t i = 1; i < r.loss_trace.size(); ++i)
    if (!(r.loss_trace[i] < r.loss_trace[i - 1])) return fail("loss rose at step " + std::to_string(i));
  return pass("loss " + fmt(r.loss_trace.front()) + " -> " + fmt(r.loss_trace.back()) + " over 50 steps");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"1 svd-oracle", svd_oracle},
      {"2 iteration-gap-decay", gap_decay},
      {"3 min-norm-solution", min_norm},
      {"4 splitrelu-equivalence", splitrelu_equivalence},
      {"5 design-oracles", design_oracles},
      {"6 cache", cache_effect},
      {"7 kernel-gradient", kernel_gradient},
      {"8 reference-datasets", reference_datasets},
      {"9 linear-scaling", scaling},
      {"10 orthonormalization-speed", ortho_speed},
      {"finetune-loss-decrease", finetune_decrease},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    failures += o.status == Status::Fail;
    std::printf("%s %s: %s\n", tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
