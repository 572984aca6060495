#include "isvd/config.hpp"

#include <Eigen/Core>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace isvd {

const char* to_string(Task t) {
  switch (t) {
    case Task::LinkPredict: return "link-predict";
    case Task::NodeClassify: return "node-classify";
    case Task::SvdOnly: return "svd-only";
    case Task::Bench: return "bench";
  }
  return "?";
}

Task parse_task(const std::string& name) {
  if (name == "link-predict") return Task::LinkPredict;
  if (name == "node-classify") return Task::NodeClassify;
  if (name == "svd-only") return Task::SvdOnly;
  if (name == "bench") return Task::Bench;
  throw std::invalid_argument("unknown task '" + name + "'");
}

void to_json(nlohmann::json& j, const SvdConfig& c) {
  j = {{"rank", c.rank},
       {"iterations", c.iterations},
       {"oversample_factor", c.oversample_factor},
       {"seed", c.seed},
       {"orthonorm", to_string(c.orthonorm)},
       {"cache", c.use_cache}};
}

void from_json(const nlohmann::json& j, SvdConfig& c) {
  c = SvdConfig{};
  c.rank = j.value("rank", c.rank);
  c.iterations = j.value("iterations", c.iterations);
  c.oversample_factor = j.value("oversample_factor", c.oversample_factor);
  c.seed = j.value("seed", c.seed);
  c.orthonorm = parse_orthonorm(j.value("orthonorm", std::string(to_string(c.orthonorm))));
  c.use_cache = j.value("cache", c.use_cache);
  c.validate();
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {
      {"task", to_string(c.task)},
      {"seed", c.seed},
      {"directed", c.directed},
      {"ne", c.ne},
      {"nc", c.nc},
      {"svd", c.svd},
      {"finetune",
       {{"enabled", c.finetune}, {"steps", c.finetune_cfg.steps}, {"lr", c.finetune_cfg.lr}, {"k_n", c.finetune_cfg.k_n}}},
      {"hits_k", c.hits_k},
      {"test_fraction", c.test_fraction},
      {"rank_search", c.rank_search},
      {"ne_augment", c.ne_augment},
      {"ne_rank", c.ne_rank},
      {"pca_dim", c.pca_dim},
      {"verify_splitrelu", c.verify_splitrelu},
      {"paths",
       {{"edges", c.paths.edges},
        {"features", c.paths.features},
        {"labels", c.paths.labels},
        {"splits", c.paths.splits},
        {"graph_dir", c.paths.graph_dir},
        {"spec", c.paths.spec},
        {"output", c.paths.output},
        {"report", c.paths.report}}},
  };
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  c = RunConfig{};
  if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
  c.seed = j.value("seed", c.seed);
  c.directed = j.value("directed", c.directed);
  // Partial sections fill in from the run defaults, not the library defaults.
  auto merged = [&j](const char* key, const auto& base) {
    nlohmann::json out = base;
    out.update(j.at(key), true);
    return out;
  };
  if (j.contains("ne")) c.ne = merged("ne", c.ne).get<NeSpec>();
  if (j.contains("nc")) c.nc = merged("nc", c.nc).get<NcSpec>();
  if (j.contains("svd")) c.svd = merged("svd", c.svd).get<SvdConfig>();
  if (j.contains("finetune")) {
    const auto& f = j.at("finetune");
    c.finetune = f.value("enabled", c.finetune);
    c.finetune_cfg.steps = f.value("steps", c.finetune_cfg.steps);
    c.finetune_cfg.lr = f.value("lr", c.finetune_cfg.lr);
    c.finetune_cfg.k_n = f.value("k_n", c.finetune_cfg.k_n);
  }
  c.hits_k = j.value("hits_k", c.hits_k);
  c.test_fraction = j.value("test_fraction", c.test_fraction);
  c.rank_search = j.value("rank_search", c.rank_search);
  c.ne_augment = j.value("ne_augment", c.ne_augment);
  c.ne_rank = j.value("ne_rank", c.ne_rank);
  c.pca_dim = j.value("pca_dim", c.pca_dim);
  c.verify_splitrelu = j.value("verify_splitrelu", c.verify_splitrelu);
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    c.paths.edges = p.value("edges", "");
    c.paths.features = p.value("features", "");
    c.paths.labels = p.value("labels", "");
    c.paths.splits = p.value("splits", "");
    c.paths.graph_dir = p.value("graph_dir", "");
    c.paths.spec = p.value("spec", "");
    c.paths.output = p.value("output", "");
    c.paths.report = p.value("report", "");
  }
}

namespace {

std::optional<long long> env_integer(const char* name) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return std::nullopt;
  long long v = 0;
  const auto [p, ec] = std::from_chars(raw, raw + std::strlen(raw), v);
  if (ec != std::errc() || *p != '\0') throw std::invalid_argument(std::string(name) + "='" + raw + "' is not an integer");
  return v;
}

}  // namespace

std::uint64_t default_seed() {
  const auto v = env_integer("ISVD_SEED");
  if (!v) return 0;
  if (*v < 0) throw std::invalid_argument("ISVD_SEED must be non-negative");
  return static_cast<std::uint64_t>(*v);
}

std::optional<int> apply_thread_override() {
  const auto v = env_integer("ISVD_THREADS");
  if (!v) return std::nullopt;
  if (*v < 1) throw std::invalid_argument("ISVD_THREADS must be >= 1");
  Eigen::setNbThreads(static_cast<int>(*v));
  return static_cast<int>(*v);
}

}  // namespace isvd
