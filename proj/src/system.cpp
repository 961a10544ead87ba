#include "swstab/system.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "swstab/errors.hpp"

namespace swstab {

using detail::json;

SwitchedSystem::SwitchedSystem(Eigen::Index n, Eigen::Index m, std::vector<ModeDynamics> modes)
    : n_(n), m_(m), modes_(std::move(modes)) {
  if (n_ < 1) throw ValidationError("n: state dimension must be positive");
  if (m_ < 0) throw ValidationError("m: input dimension must be non-negative");
  if (modes_.empty()) throw ValidationError("modes: empty mode list");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const std::string path = "modes[" + std::to_string(i) + "]";
    const auto& md = modes_[i];
    if (md.A.rows() != n_ || md.A.cols() != n_) {
      throw ValidationError(path + ".A: dimension mismatch, expected " + std::to_string(n_) + "x" +
                            std::to_string(n_));
    }
    if (md.B.rows() != n_ || md.B.cols() != m_) {
      throw ValidationError(path + ".B: dimension mismatch, expected " + std::to_string(n_) + "x" +
                            std::to_string(m_));
    }
    if (!md.A.allFinite()) throw ValidationError(path + ".A: non-finite entry");
    if (!md.B.allFinite()) throw ValidationError(path + ".B: non-finite entry");
    if (!labels.insert(md.name).second) {
      throw ValidationError(path + ".name: duplicate mode label '" + md.name + "'");
    }
  }
}

Eigen::VectorXd SwitchedSystem::step(std::size_t i, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& u) const {
  const auto& md = modes_.at(i);
  Eigen::VectorXd next = md.A * x;
  if (m_ > 0) next.noalias() += md.B * u;
  return next;
}

bool operator==(const SwitchedSystem& a, const SwitchedSystem& b) {
  if (a.n_ != b.n_ || a.m_ != b.m_ || a.modes_.size() != b.modes_.size()) return false;
  for (std::size_t i = 0; i < a.modes_.size(); ++i) {
    const auto& x = a.modes_[i];
    const auto& y = b.modes_[i];
    if (x.name != y.name || x.A != y.A || x.B != y.B) return false;
  }
  return true;
}

namespace {

SwitchedSystem system_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("system: expected a JSON object");
  const long long n = detail::as_integer(detail::require(doc, "n", ""), "n");
  const long long m = detail::as_integer(detail::require(doc, "m", ""), "m");
  if (n < 1) throw ValidationError("n: state dimension must be positive");
  if (m < 0) throw ValidationError("m: input dimension must be non-negative");
  const json& modes = detail::require(doc, "modes", "");
  if (!modes.is_array()) throw ValidationError("modes: expected a list");
  if (modes.empty()) throw ValidationError("modes: empty mode list");

  std::vector<ModeDynamics> out;
  out.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string path = "modes[" + std::to_string(i) + "]";
    const json& md = modes[i];
    const json& name = detail::require(md, "name", path);
    if (!name.is_string()) throw ValidationError(path + ".name: expected a string");
    ModeDynamics dyn;
    dyn.name = name.get<std::string>();
    dyn.A = detail::as_matrix(detail::require(md, "A", path), n, n, path + ".A");
    dyn.B = detail::as_matrix(detail::require(md, "B", path), n, m, path + ".B");
    out.push_back(std::move(dyn));
  }
  return SwitchedSystem(n, m, std::move(out));
}

}  // namespace

SwitchedSystem load_system_text(std::string_view text) {
  return system_from_json(detail::parse_json(text, "system file"));
}

SwitchedSystem load_system(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_system_text(text);
}

SwitchedSystem load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open system file '" + path + "'");
  return load_system(in);
}

std::string save_system(const SwitchedSystem& system) {
  json doc;
  doc["n"] = system.n();
  doc["m"] = system.m();
  json modes = json::array();
  for (const auto& md : system.modes()) {
    json j;
    j["name"] = md.name;
    j["A"] = detail::matrix_to_json(md.A);
    j["B"] = detail::matrix_to_json(md.B);
    modes.push_back(std::move(j));
  }
  doc["modes"] = std::move(modes);
  return doc.dump();
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string system_hash(const SwitchedSystem& system) { return content_hash(save_system(system)); }

}  // namespace swstab
