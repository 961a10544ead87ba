#include <fstream>
#include <iterator>

#include "json_util.hpp"
#include "swstab/bellman.hpp"
#include "swstab/errors.hpp"

namespace swstab {

using detail::json;

std::string certificate_to_json(const Certificate& cert) {
  json doc;
  doc["system_hash"] = cert.system_hash;
  doc["mode_dependent"] = cert.mode_dependent;
  doc["status"] = to_string(cert.status);
  doc["iterations"] = cert.iterations;
  doc["rho"] = cert.rho ? json(*cert.rho) : json(nullptr);
  doc["c2"] = cert.c2 ? json(*cert.c2) : json(nullptr);
  json verts = json::array();
  for (const auto& v : cert.norm.vertices()) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
    verts.push_back(std::move(row));
  }
  doc["vertices"] = std::move(verts);
  doc["directions"] = cert.directions;
  doc["tol"] = cert.tol;
  doc["sampled"] = cert.sampled;
  return doc.dump(2) + "\n";
}

Certificate certificate_from_json(std::string_view text) {
  const json doc = detail::parse_json(text, "certificate file");
  if (!doc.is_object()) throw ValidationError("certificate: expected a JSON object");

  const json& hash = detail::require(doc, "system_hash", "");
  if (!hash.is_string()) throw ValidationError("system_hash: expected a string");
  const json& md = detail::require(doc, "mode_dependent", "");
  if (!md.is_boolean()) throw ValidationError("mode_dependent: expected a boolean");
  const json& status = detail::require(doc, "status", "");
  if (!status.is_string()) throw ValidationError("status: expected a string");

  const json& verts = detail::require(doc, "vertices", "");
  if (!verts.is_array() || verts.empty()) throw ValidationError("vertices: expected a nonempty list");
  const json& first = verts[0];
  if (!first.is_array() || first.empty()) throw ValidationError("vertices[0]: expected a nonempty list");
  const Eigen::Index dim = static_cast<Eigen::Index>(first.size());
  const Eigen::MatrixXd rows = detail::as_matrix(verts, static_cast<Eigen::Index>(verts.size()), dim, "vertices");
  std::vector<Eigen::VectorXd> vs;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) vs.emplace_back(rows.row(r).transpose());

  auto optional_real = [&](const char* key) -> std::optional<double> {
    const json& v = detail::require(doc, key, "");
    if (v.is_null()) return std::nullopt;
    return detail::as_real(v, key);
  };

  bool sampled = dim >= 3;
  if (auto it = doc.find("sampled"); it != doc.end()) {
    if (!it->is_boolean()) throw ValidationError("sampled: expected a boolean");
    sampled = it->get<bool>();
  }

  Certificate cert{hash.get<std::string>(),
                   md.get<bool>(),
                   BalancedPolytopeNorm(dim, std::move(vs)),
                   static_cast<int>(detail::as_integer(detail::require(doc, "iterations", ""), "iterations")),
                   synthesis_status_from_string(status.get<std::string>()),
                   optional_real("rho"),
                   optional_real("c2"),
                   static_cast<int>(detail::as_integer(detail::require(doc, "directions", ""), "directions")),
                   detail::as_real(detail::require(doc, "tol", ""), "tol"),
                   sampled};
  if (cert.converged() && (!cert.rho || !cert.c2)) {
    throw ValidationError("certificate: converged certificate without rho/c2");
  }
  return cert;
}

Certificate load_certificate_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open certificate file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return certificate_from_json(text);
}

}  // namespace swstab
