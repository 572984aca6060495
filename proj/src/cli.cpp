#include "isvd/cli.hpp"

#include "isvd/config.hpp"
#include "isvd/design.hpp"
#include "isvd/io.hpp"
#include "isvd/kernel.hpp"
#include "isvd/metrics.hpp"
#include "isvd/models.hpp"
#include "isvd/random.hpp"
#include "isvd/sampling.hpp"
#include "isvd/serialize.hpp"
#include "isvd/splitrelu.hpp"
#include "isvd/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace isvd {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr const char* kReportSchema = "isvd-report/1";

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

struct Run {
  RunConfig cfg;
  json report = json::object();
  json timings = json::object();
  json metrics = json::object();
  std::vector<std::string> warnings;

  void metric(const std::string& name, double v) {
    if (!std::isfinite(v)) throw NumericalError("metric " + name + " is not finite");
    metrics[name] = v;
  }
};

// Options that only steer the benchmark; recorded in its report.
struct BenchOptions {
  Index nodes = 20000;
  double degree = 10.0;
  Index ortho_rows = 512;
  Index ortho_cols = 64;
  int repeats = 5;
};

GraphPaths graph_paths(const RunConfig& c) {
  GraphPaths p;
  if (!c.paths.graph_dir.empty()) p = paths_in_directory(c.paths.graph_dir);
  if (!c.paths.edges.empty()) p.edges = c.paths.edges;
  if (!c.paths.features.empty()) p.features = c.paths.features;
  if (!c.paths.labels.empty()) p.labels = c.paths.labels;
  if (!c.paths.splits.empty()) p.splits = c.paths.splits;
  if (p.edges.empty()) throw std::invalid_argument("no graph given (use --edges or --graph)");
  p.directed = c.directed;
  return p;
}

GraphData load(Run& run, const GraphPaths& paths) {
  const auto t = Clock::now();
  GraphData g = load_graph(paths, &run.warnings);
  run.timings["load_ms"] = ms_since(t);
  run.report["graph"] = {{"nodes", g.num_nodes()}, {"edges", g.num_edges()}, {"directed", g.directed}};
  return g;
}

void write_report(const Run& run, const std::string& command) {
  json out = run.report;
  out["schema"] = kReportSchema;
  out["command"] = command;
  out["config"] = run.cfg;
  out["generator"] = std::string(kGeneratorName);
  out["metrics"] = run.metrics;
  out["timings_ms"] = run.timings;
  out["warnings"] = run.warnings;
  const std::string text = out.dump(2);
  std::cout << text << '\n';
  if (!run.cfg.paths.report.empty()) {
    std::ofstream f(run.cfg.paths.report);
    if (!f) throw std::runtime_error(run.cfg.paths.report + ": cannot write report");
    f << text << '\n';
  }
}

void ensure_output_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

// Dense row index -> node token from the input files.
void save_node_map(const std::string& dir, const GraphData& g) {
  const fs::path path = fs::path(dir) / "nodes.tsv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  for (std::size_t i = 0; i < g.node_names.size(); ++i) out << i << '\t' << g.node_names[i] << '\n';
}

// Picks the rank with the best ROC-AUC when trained on one half of the
// training edges and scored on the other half. One SVD at the largest
// candidate rank is truncated for the smaller ones.
Index search_rank(Run& run, const GraphData& train_graph, const SvdConfig& base) {
  const std::vector<Index> candidates{8, 16, 32, 128, 256};
  auto [fit, held] = halve_edges(train_graph.edges(), derive_seed(run.cfg.seed, "rank-search"));
  if (fit.empty() || held.empty()) throw std::invalid_argument("rank search: too few edges");
  GraphData half;
  half.directed = train_graph.directed;
  half.adjacency = adjacency_from_edges(train_graph.num_nodes(), fit, {}, train_graph.directed);
  const auto negatives = sample_negatives(train_graph, static_cast<Index>(held.size()),
                                          derive_seed(run.cfg.seed, "rank-search-negatives"));

  Index top = 0;
  for (Index r : candidates)
    if (r <= train_graph.num_nodes()) top = r;
  if (top == 0) throw std::invalid_argument("rank search: graph smaller than the smallest candidate rank");
  SvdConfig cfg = base;
  cfg.rank = top;
  const NeModel full = train_ne(build_ne(half.adjacency, run.cfg.ne), cfg);

  json table = json::array();
  Index best = candidates.front();
  double best_auc = -1.0;
  for (Index r : candidates) {
    if (r > top) break;
    NeModel m{SvdResult{full.svd.U.leftCols(r), full.svd.s.head(r), full.svd.V.leftCols(r)}};
    const double auc = roc_auc(to_std(m.scores(held)), to_std(m.scores(negatives)));
    table.push_back({{"rank", r}, {"auc", auc}});
    if (auc > best_auc) {
      best_auc = auc;
      best = r;
    }
  }
  run.report["rank_search"] = {{"candidates", table}, {"selected", best}};
  return best;
}

int run_lp(Run& run) {
  RunConfig& c = run.cfg;
  c.svd.seed = derive_seed(c.seed, "svd");
  GraphData g = load(run, graph_paths(c));

  const auto t_split = Clock::now();
  std::vector<Edge> test_pos = g.edge_splits.test_pos;
  std::vector<Edge> test_neg = g.edge_splits.test_neg;
  GraphData train;
  train.directed = g.directed;
  if (!test_pos.empty()) {
    train.adjacency = g.adjacency;
    run.report["split"] = "file";
  } else {
    LinkSplit split = split_edges(g, c.test_fraction, derive_seed(c.seed, "split"));
    train.adjacency = std::move(split.train_adjacency);
    test_pos = std::move(split.held_out);
    run.report["split"] = "spanning-forest";
  }
  if (test_pos.empty()) throw std::invalid_argument("no test edges (graph may be a forest)");
  if (test_neg.empty()) {
    GraphData all = g;
    if (run.report["split"] == "file") {
      auto edges = g.edges();
      edges.insert(edges.end(), test_pos.begin(), test_pos.end());
      all.adjacency = adjacency_from_edges(g.num_nodes(), edges, {}, g.directed);
    }
    test_neg = sample_negatives(all, static_cast<Index>(test_pos.size()), derive_seed(c.seed, "negatives"));
  }
  run.timings["split_ms"] = ms_since(t_split);
  run.report["test_edges"] = {{"positive", test_pos.size()}, {"negative", test_neg.size()}};

  if (c.rank_search) {
    const auto t = Clock::now();
    c.svd.rank = search_rank(run, train, c.svd);
    run.timings["rank_search_ms"] = ms_since(t);
  }

  const auto t_train = Clock::now();
  const LinOp M = build_ne(train.adjacency, c.ne);
  SvdStats stats;
  const NeModel model = train_ne(M, c.svd, &stats);
  run.timings["train_ms"] = ms_since(t_train);
  run.report["svd"] = svd_report(c.svd, stats);

  const auto t_eval = Clock::now();
  const auto pos = to_std(model.scores(test_pos));
  const auto neg = to_std(model.scores(test_neg));
  run.metric("auc", roc_auc(pos, neg));
  if (static_cast<int>(neg.size()) >= c.hits_k) run.metric("hits@" + std::to_string(c.hits_k), hits_at_k(pos, neg, c.hits_k));
  run.timings["score_ms"] = ms_since(t_eval);

  SavedModel saved{model, std::nullopt, std::nullopt};
  if (c.finetune) {
    const auto t = Clock::now();
    const auto train_pos = train.edges();
    std::vector<Edge> exclude = test_pos;
    const std::uint64_t neg_seed = derive_seed(c.seed, "finetune-negatives");
    // Small graphs may have fewer non-edges than requested; the loss weights
    // negatives by k_n rather than by their count.
    const Index available = count_non_edges(train, exclude);
    const NegativeSampler sampler = [&](Index count) {
      return sample_negatives(train, std::min(count, available), neg_seed, exclude);
    };
    const FinetuneResult ft = finetune_kernel(model, train_pos, sampler, c.finetune_cfg);
    const auto kpos = to_std(kernel_scores(model, test_pos, ft.params));
    const auto kneg = to_std(kernel_scores(model, test_neg, ft.params));
    run.metric("kernel_auc", roc_auc(kpos, kneg));
    if (static_cast<int>(kneg.size()) >= c.hits_k)
      run.metric("kernel_hits@" + std::to_string(c.hits_k), hits_at_k(kpos, kneg, c.hits_k));
    run.report["kernel"] = {{"mu", ft.params.mu},
                            {"sbar", ft.params.sbar},
                            {"initial_loss", ft.loss_trace.front()},
                            {"final_loss", ft.loss_trace.back()}};
    run.timings["finetune_ms"] = ms_since(t);
    saved.kernel = ft.params;
  }

  if (!c.paths.output.empty()) {
    ensure_output_dir(c.paths.output);
    save_node_map(c.paths.output, g);
    save_model((fs::path(c.paths.output) / "model.json").string(), saved);
  }
  return 0;
}

// Linear model output and Split-ReLu forward pass at its initialization.
void verify_splitrelu(Run& run, const GraphData& g, const NcModel& model) {
  const Index d = g.features->cols();
  const int L = model.spec.layers;
  const Matrix W = model.W.topRows(d * (L + 1));
  const LinOp adj = sym_norm_adj(g.adjacency);
  const Matrix linear = evaluate(build_nc(adj, *g.features, L), W);
  const Matrix net = splitrelu_forward(splitrelu_init(W, d, L), adj, *g.features);
  const double diff = (linear - net).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, linear.cwiseAbs().maxCoeff());
  const bool ok = diff <= 1e-8 * scale;
  run.report["splitrelu_init"] = {{"max_abs_diff", diff}, {"scale", scale}, {"pass", ok}};
  if (!ok) throw NumericalError("Split-ReLu forward pass at initialization deviates from the linear model by " + std::to_string(diff));
}

int run_nc(Run& run) {
  RunConfig& c = run.cfg;
  c.svd.seed = derive_seed(c.seed, "svd");
  c.nc.dropout.seed = derive_seed(c.seed, "dropout");
  GraphData g = load(run, graph_paths(c));
  if (!g.features) throw std::invalid_argument("node classification needs --features (or features.csv in --graph)");
  if (!g.labels) throw std::invalid_argument("node classification needs --labels (or labels.tsv in --graph)");
  if (g.node_splits.train.empty()) throw std::invalid_argument("node classification needs a train split");

  if (c.ne_augment) {
    const auto t = Clock::now();
    SvdConfig ne_cfg = c.svd;
    ne_cfg.rank = std::min<Index>(c.ne_rank, g.num_nodes());
    ne_cfg.seed = derive_seed(c.seed, "ne");
    const NeModel ne = train_ne(build_ne(g.adjacency, c.ne), ne_cfg);
    Matrix X(g.num_nodes(), g.features->cols() + 2 * ne_cfg.rank);
    X << *g.features, ne.left(), ne.right();
    if (X.cols() > c.pca_dim) {
      SvdConfig pca_cfg = c.svd;
      pca_cfg.seed = derive_seed(c.seed, "pca");
      X = pca(X, c.pca_dim, pca_cfg);
    }
    g.features = std::move(X);
    run.timings["augment_ms"] = ms_since(t);
    run.report["features"] = {{"augmented_width", g.features->cols()}};
  }

  const auto t_train = Clock::now();
  const LinOp M = nc_design(g, c.nc);
  const Matrix& Y = *g.labels;
  SvdStats stats;
  SvdConfig cfg = c.svd;
  NcModel model;
  if (c.nc.dropout.enabled) {
    const PseudoDropout pd = pseudo_dropout(M, c.nc.dropout.rate, c.nc.dropout.seed, g.node_splits.train,
                                            c.nc.dropout.replicas);
    model.W = solve_least_norm(pd.op, replicate_rows(Y, c.nc.dropout.replicas + 1), pd.train_rows, cfg, &stats);
    model.spec = c.nc;
    model.feature_dim = g.features->cols();
    model.label_dim = Y.cols();
  } else {
    model = solve_nc(M, Y, g.node_splits.train, c.nc, cfg, &stats);
  }
  run.timings["train_ms"] = ms_since(t_train);
  cfg.rank = std::min<Index>(cfg.rank, stats.working_rank);
  run.report["svd"] = svd_report(cfg, stats);
  run.report["design"] = {{"rows", M.rows()}, {"cols", M.cols()}};

  const auto t_eval = Clock::now();
  const std::vector<int> pred = argmax_rows(infer_nc(model, g));
  auto labeled = [&](const std::vector<Index>& idx, const char* name) {
    std::vector<Index> out;
    for (Index i : idx)
      if (g.label_index[i] >= 0) out.push_back(i);
    if (out.size() != idx.size())
      run.warnings.push_back(std::string(name) + " split has " + std::to_string(idx.size() - out.size()) +
                             " unlabeled nodes; they are ignored");
    return out;
  };
  for (const auto& [name, idx] : {std::pair<const char*, const std::vector<Index>*>{"train", &g.node_splits.train},
                                  {"validation", &g.node_splits.validation},
                                  {"test", &g.node_splits.test}}) {
    const auto mask = labeled(*idx, name);
    if (!mask.empty()) run.metric(std::string(name) + "_accuracy", accuracy(pred, g.label_index, mask));
  }
  run.timings["infer_ms"] = ms_since(t_eval);

  if (c.verify_splitrelu) verify_splitrelu(run, g, model);

  if (!c.paths.output.empty()) {
    ensure_output_dir(c.paths.output);
    save_node_map(c.paths.output, g);
    save_model((fs::path(c.paths.output) / "model.json").string(), SavedModel{std::nullopt, std::nullopt, model});
  }
  return 0;
}

int run_svd(Run& run) {
  RunConfig& c = run.cfg;
  c.svd.seed = derive_seed(c.seed, "svd");
  if (c.paths.spec.empty()) throw std::invalid_argument("svd needs --spec");
  if (c.paths.output.empty()) throw std::invalid_argument("svd needs --output for the factor files");

  std::ifstream in(c.paths.spec);
  if (!in) throw ParseError(c.paths.spec + ": cannot open file");
  json spec_json;
  try {
    spec_json = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(c.paths.spec + ": " + e.what());
  }
  const DesignSpec spec = spec_json.get<DesignSpec>();
  if (spec.ne && spec.nc) throw std::invalid_argument("svd: spec must describe exactly one design matrix");

  // Graph files named in the spec are relative to the spec file.
  if (spec_json.contains("graph")) {
    const fs::path base = fs::path(c.paths.spec).parent_path();
    auto resolve = [&](const char* key, std::string& target) {
      if (target.empty() && spec_json["graph"].contains(key))
        target = (base / spec_json["graph"][key].get<std::string>()).string();
    };
    resolve("edges", c.paths.edges);
    resolve("features", c.paths.features);
    resolve("labels", c.paths.labels);
    resolve("splits", c.paths.splits);
    c.directed = c.directed || spec_json["graph"].value("directed", false);
  }
  GraphData g = load(run, graph_paths(c));

  LinOp M;
  if (spec.ne) {
    c.ne = *spec.ne;
    M = build_ne(g.adjacency, c.ne);
  } else {
    c.nc = *spec.nc;
    M = nc_design(g, c.nc);
  }
  run.report["design"] = {{"spec", spec}, {"rows", M.rows()}, {"cols", M.cols()}};

  SvdStats stats;
  const SvdResult r = isvd(M, c.svd, &stats);
  run.report["svd"] = svd_report(c.svd, stats);
  run.timings["svd_ms"] = stats.wall_time_ms;
  run.report["singular_values"] = to_std(r.s);

  ensure_output_dir(c.paths.output);
  save_node_map(c.paths.output, g);
  const fs::path out(c.paths.output);
  save_matrix_csv((out / "U.csv").string(), r.U);
  save_matrix_csv((out / "s.csv").string(), r.s);
  save_matrix_csv((out / "V.csv").string(), r.V);
  return 0;
}

template <class F>
double best_of(int repeats, F&& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < repeats; ++i) {
    const auto t = Clock::now();
    f();
    best = std::min(best, ms_since(t));
  }
  return best;
}

int run_bench(Run& run, const BenchOptions& b) {
  RunConfig& c = run.cfg;
  c.svd.seed = derive_seed(c.seed, "svd");
  if (b.nodes < 2 || b.degree <= 0.0 || b.repeats < 1) throw std::invalid_argument("bench: invalid size options");
  const Index m = static_cast<Index>(b.nodes * b.degree / 2.0);
  const GraphData g = random_graph(b.nodes, m, derive_seed(c.seed, "bench-graph"));
  const LinOp M = build_ne(g.adjacency, c.ne);
  run.report["graph"] = {{"nodes", g.num_nodes()}, {"edges", g.num_edges()}, {"synthetic", true}};
  run.report["bench"] = {{"nodes", b.nodes},
                         {"degree", b.degree},
                         {"ortho_rows", b.ortho_rows},
                         {"ortho_cols", b.ortho_cols},
                         {"repeats", b.repeats}};

  Rng rng(derive_seed(c.seed, "bench"));
  const Index width = std::min<Index>(c.svd.oversample_factor * c.svd.rank, b.nodes);
  const Matrix G = gaussian_matrix(b.nodes, width, rng);

  json evals = json::object();
  for (bool cached : {false, true}) {
    EvalCounters counters;
    EvalCache cache;
    const auto t = Clock::now();
    const Matrix out = evaluate(M, G, cached ? &cache : nullptr, &counters);
    const double ms = ms_since(t);
    evals[cached ? "cache_on" : "cache_off"] = {{"wall_time_ms", ms},
                                                {"leaf_multiplications", counters.leaf_multiplications},
                                                {"cache_hits", cache.hit_count()},
                                                {"cache_misses", cache.miss_count()}};
  }
  run.report["evaluate"] = evals;

  const Matrix Q = gaussian_matrix(b.ortho_rows, b.ortho_cols, rng);
  Matrix sink;
  const double chol_ms = best_of(b.repeats, [&] { sink = orthonormalize(Q, Orthonorm::Cholesky); });
  const double chol_err = (sink.transpose() * sink - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
  const double qr_ms = best_of(b.repeats, [&] { sink = orthonormalize(Q, Orthonorm::Qr); });
  const double qr_err = (sink.transpose() * sink - Matrix::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
  run.report["orthonormalize"] = {{"cholesky_ms", chol_ms},
                                  {"qr_ms", qr_ms},
                                  {"cholesky_orthogonality_error", chol_err},
                                  {"qr_orthogonality_error", qr_err}};

  json svds = json::array();
  for (const auto& [cached, method] : {std::pair{true, Orthonorm::Cholesky},
                                       std::pair{true, Orthonorm::Qr},
                                       std::pair{false, Orthonorm::Cholesky}}) {
    SvdConfig cfg = c.svd;
    cfg.use_cache = cached;
    cfg.orthonorm = method;
    SvdStats st;
    isvd(M, cfg, &st);
    svds.push_back(svd_report(cfg, st));
  }
  run.report["isvd"] = svds;
  run.metric("cache_speedup", evals["cache_off"]["wall_time_ms"].get<double>() /
                                  std::max(1e-9, evals["cache_on"]["wall_time_ms"].get<double>()));
  run.metric("cholesky_speedup", qr_ms / std::max(1e-9, chol_ms));
  return 0;
}

// Returns the value of --config if present, so the file can seed defaults
// before the command line is parsed.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  // A previous run report carries its configuration under "config".
  if (j.contains("config") && j.contains("schema")) j = j.at("config");
  return j.get<RunConfig>();
}

void add_svd_options(CLI::App* app, RunConfig& c, std::string& orthonorm) {
  app->add_option("--rank,-k", c.svd.rank, "Truncation rank k");
  app->add_option("--iterations", c.svd.iterations, "Subspace iterations");
  app->add_option("--oversample", c.svd.oversample_factor, "Working rank = oversample * k");
  app->add_option("--orthonorm", orthonorm, "cholesky or qr")->check(CLI::IsMember({"cholesky", "qr"}));
  app->add_flag("!--no-cache", c.svd.use_cache, "Disable lazy caching of intermediate products");
}

void add_common_options(CLI::App* app, RunConfig& c, std::string& config_path) {
  app->add_option("--config", config_path, "RunConfig JSON (or a previous report) providing defaults");
  app->add_option("--seed", c.seed, "Root seed (default from ISVD_SEED, else 0)");
  app->add_option("--report", c.paths.report, "Also write the JSON report to this file");
  app->add_option("--output", c.paths.output, "Directory for model or factor files");
}

void add_graph_options(CLI::App* app, RunConfig& c) {
  app->add_option("--graph", c.paths.graph_dir, "Directory with edges.tsv [features.csv labels.tsv splits.json]");
  app->add_option("--edges", c.paths.edges, "Edge list: 'src dst [weight]' per line");
  app->add_option("--features", c.paths.features, "Node features CSV");
  app->add_option("--labels", c.paths.labels, "'node class' per line");
  app->add_option("--splits", c.paths.splits, "Split JSON");
  app->add_flag("--directed", c.directed, "Do not symmetrize the adjacency");
}

void add_ne_options(CLI::App* app, RunConfig& c) {
  app->add_option("--lambda", c.ne.lambda, "Negative coefficient");
  app->add_option("--C", c.ne.context, "Context window");
  app->add_flag("--symmetric", c.ne.symmetric, "Use the symmetrically normalized adjacency instead of D^-1 A");
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Matrix-free SVD training for graph models", "isvd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("isvd ") + kReportSchema);

  RunConfig c;
  std::string config_path;
  std::string orthonorm;
  BenchOptions bench;
  try {
    c.seed = default_seed();
    const std::string pre = find_config_arg(argc, argv);
    if (!pre.empty()) c = load_run_config(pre);
  } catch (const std::exception& e) {
    std::cerr << "isvd: " << e.what() << '\n';
    return 1;
  }
  orthonorm = to_string(c.svd.orthonorm);

  auto* lp = app.add_subcommand("lp", "Link prediction with network embeddings");
  add_common_options(lp, c, config_path);
  add_graph_options(lp, c);
  add_ne_options(lp, c);
  add_svd_options(lp, c, orthonorm);
  lp->add_flag("--finetune-kernel", c.finetune, "Fit the Gaussian spectral kernel (mu, sbar)");
  lp->add_option("--finetune-steps", c.finetune_cfg.steps, "Gradient steps");
  lp->add_option("--finetune-lr", c.finetune_cfg.lr, "Step size");
  lp->add_option("--kn", c.finetune_cfg.k_n, "Negatives per positive");
  lp->add_option("--hits-k", c.hits_k, "K for Hits@K");
  lp->add_option("--test-fraction", c.test_fraction, "Held-out fraction when no split file is given");
  lp->add_flag("--rank-search", c.rank_search, "Choose the rank from {8,16,32,128,256} on half the training edges");

  auto* nc = app.add_subcommand("nc", "Semi-supervised node classification");
  add_common_options(nc, c, config_path);
  add_graph_options(nc, c);
  add_ne_options(nc, c);
  add_svd_options(nc, c, orthonorm);
  nc->add_option("--layers,-L", c.nc.layers, "Propagation depth L");
  nc->add_flag("--label-reuse", c.nc.label_reuse, "Append leak-free propagated training labels");
  nc->add_flag("--dropout", c.nc.dropout.enabled, "Pseudo-dropout row augmentation");
  nc->add_option("--dropout-rate", c.nc.dropout.rate, "Drop probability per row and column block");
  nc->add_option("--dropout-replicas", c.nc.dropout.replicas, "Number of masked copies");
  nc->add_flag("--ne-augment", c.ne_augment, "Concatenate network embeddings to the features");
  nc->add_option("--ne-rank", c.ne_rank, "Embedding rank for --ne-augment");
  nc->add_option("--pca-dim", c.pca_dim, "Project augmented features to this many principal components");
  nc->add_flag("--verify-splitrelu-init", c.verify_splitrelu, "Check the Split-ReLu forward pass at initialization");

  auto* svd = app.add_subcommand("svd", "Decompose a design matrix described by a spec file");
  add_common_options(svd, c, config_path);
  add_graph_options(svd, c);
  add_svd_options(svd, c, orthonorm);
  svd->add_option("--spec", c.paths.spec, "Design spec JSON")->required();

  auto* bn = app.add_subcommand("bench", "Cache and orthonormalization benchmark on a synthetic graph");
  add_common_options(bn, c, config_path);
  add_ne_options(bn, c);
  add_svd_options(bn, c, orthonorm);
  bn->add_option("--nodes", bench.nodes, "Synthetic graph size");
  bn->add_option("--degree", bench.degree, "Average degree");
  bn->add_option("--ortho-rows", bench.ortho_rows, "Rows of the orthonormalization test matrix");
  bn->add_option("--ortho-cols", bench.ortho_cols, "Columns of the orthonormalization test matrix");
  bn->add_option("--repeats", bench.repeats, "Timing repetitions (best is reported)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  Run run;
  std::string command;
  try {
    c.svd.orthonorm = parse_orthonorm(orthonorm);
    c.svd.validate();
    c.ne.validate();
    c.nc.validate();
    if (const auto threads = apply_thread_override()) run.report["threads"] = *threads;
    run.cfg = c;
    const auto start = Clock::now();
    int rc = 0;
    if (lp->parsed()) {
      command = "lp";
      run.cfg.task = Task::LinkPredict;
      rc = run_lp(run);
    } else if (nc->parsed()) {
      command = "nc";
      run.cfg.task = Task::NodeClassify;
      rc = run_nc(run);
    } else if (svd->parsed()) {
      command = "svd";
      run.cfg.task = Task::SvdOnly;
      rc = run_svd(run);
    } else {
      command = "bench";
      run.cfg.task = Task::Bench;
      rc = run_bench(run, bench);
    }
    run.timings["total_ms"] = ms_since(start);
    write_report(run, command);
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "isvd: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace isvd
