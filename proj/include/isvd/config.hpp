#pragma once

#include "isvd/design.hpp"
#include "isvd/kernel.hpp"
#include "isvd/rsvd.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace isvd {

enum class Task { LinkPredict, NodeClassify, SvdOnly, Bench };

const char* to_string(Task t);
Task parse_task(const std::string& name);

struct RunPaths {
  std::string edges;
  std::string features;
  std::string labels;
  std::string splits;
  std::string graph_dir;
  std::string spec;
  std::string output;  // directory for factor / model files
  std::string report;  // JSON report path; empty means stdout only
};

struct RunConfig {
  static SvdConfig default_svd() {
    SvdConfig s;
    s.rank = 32;
    return s;
  }

  Task task = Task::SvdOnly;
  std::uint64_t seed = 0;
  bool directed = false;

  NeSpec ne{0.02, 10, false};
  NcSpec nc;
  SvdConfig svd = default_svd();

  // Link prediction.
  bool finetune = false;
  FinetuneConfig finetune_cfg;
  int hits_k = 20;
  double test_fraction = 0.2;
  bool rank_search = false;

  // Node classification.
  bool ne_augment = false;
  Index ne_rank = 32;
  Index pca_dim = 1000;
  bool verify_splitrelu = false;

  RunPaths paths;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const SvdConfig& c);
void from_json(const nlohmann::json& j, SvdConfig& c);

/// ISVD_SEED, when set, replaces the built-in default root seed.
std::uint64_t default_seed();

/// ISVD_THREADS, when set, caps the threads used by dense kernels. Returns the
/// value applied, or nullopt when the variable is absent.
std::optional<int> apply_thread_override();

}  // namespace isvd
