#pragma once

// Versioned JSON container for trained models. Doubles are written with
// round-trip precision, so save/load is lossless.

#include "isvd/kernel.hpp"
#include "isvd/models.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace isvd {

inline constexpr const char* kModelFormat = "isvd-model/1";

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

struct SavedModel {
  std::optional<NeModel> ne;
  std::optional<KernelParams> kernel;
  std::optional<NcModel> nc;
};

nlohmann::json model_to_json(const SavedModel& m);
SavedModel model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const SavedModel& m);
SavedModel load_model(const std::string& path);

}  // namespace isvd
