#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "swstab/errors.hpp"

namespace swstab::detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError((path.empty() ? std::string(key) : path + "." + key) + ": missing field");
  }
  return *it;
}

inline double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(path + ": non-finite entry");
  return d;
}

inline long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer");
  return v.get<long long>();
}

// Row-major list of lists with exactly `rows` rows of `cols` entries.
inline Eigen::MatrixXd as_matrix(const json& v, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& path) {
  if (!v.is_array()) throw ValidationError(path + ": expected a list of rows");
  if (static_cast<Eigen::Index>(v.size()) != rows) {
    throw ValidationError(path + ": dimension mismatch, expected " + std::to_string(rows) +
                          " rows, got " + std::to_string(v.size()));
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!row.is_array()) throw ValidationError(rpath + ": expected a row list");
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(rpath + ": dimension mismatch, expected " + std::to_string(cols) +
                            " columns, got " + std::to_string(row.size()));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = as_real(row[static_cast<std::size_t>(c)], rpath + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace swstab::detail
