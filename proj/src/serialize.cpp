#include "isvd/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace isvd {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const Index r = j.at("rows").get<Index>();
  const Index c = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (r < 0 || c < 0 || data.size() != static_cast<std::size_t>(r))
    throw ParseError("matrix: expected " + std::to_string(r) + " rows");
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = data[i];
    if (row.size() != static_cast<std::size_t>(c)) throw ParseError("matrix: row " + std::to_string(i) + " has the wrong length");
    for (Index k = 0; k < c; ++k) m(i, k) = row[k].get<double>();
  }
  return m;
}

nlohmann::json model_to_json(const SavedModel& m) {
  nlohmann::json j = {{"format", kModelFormat}};
  if (m.ne)
    j["ne"] = {{"U", matrix_to_json(m.ne->svd.U)}, {"s", matrix_to_json(m.ne->svd.s)}, {"V", matrix_to_json(m.ne->svd.V)}};
  if (m.kernel) j["kernel"] = {{"mu", m.kernel->mu}, {"sbar", m.kernel->sbar}};
  if (m.nc)
    j["nc"] = {{"W", matrix_to_json(m.nc->W)},
               {"spec", m.nc->spec},
               {"feature_dim", m.nc->feature_dim},
               {"label_dim", m.nc->label_dim}};
  return j;
}

SavedModel model_from_json(const nlohmann::json& j) {
  const std::string format = j.value("format", "");
  if (format != kModelFormat)
    throw ParseError("model: unsupported format '" + format + "' (expected " + kModelFormat + ")");
  SavedModel m;
  try {
    if (j.contains("ne")) {
      const auto& e = j.at("ne");
      NeModel ne;
      ne.svd.U = matrix_from_json(e.at("U"));
      ne.svd.s = matrix_from_json(e.at("s"));
      ne.svd.V = matrix_from_json(e.at("V"));
      if (ne.svd.U.cols() != ne.svd.s.size() || ne.svd.V.cols() != ne.svd.s.size())
        throw ParseError("model: factor shapes disagree");
      m.ne = std::move(ne);
    }
    if (j.contains("kernel")) m.kernel = KernelParams{j.at("kernel").at("mu").get<double>(), j.at("kernel").at("sbar").get<double>()};
    if (j.contains("nc")) {
      const auto& c = j.at("nc");
      NcModel nc;
      nc.W = matrix_from_json(c.at("W"));
      nc.spec = c.at("spec").get<NcSpec>();
      nc.feature_dim = c.at("feature_dim").get<Index>();
      nc.label_dim = c.at("label_dim").get<Index>();
      m.nc = std::move(nc);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  return m;
}

void save_model(const std::string& path, const SavedModel& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  out << model_to_json(m).dump() << '\n';
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace isvd
