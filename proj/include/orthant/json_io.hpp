#pragma once

#include "orthant/types.hpp"

#include <json.hpp>

#include <vector>

namespace orthant {

using Json = nlohmann::json;

inline Json to_json_array(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Vector vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Json to_json_array(const std::vector<std::size_t>& v) { return Json(v); }

}  // namespace orthant
