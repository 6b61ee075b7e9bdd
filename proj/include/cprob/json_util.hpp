#pragma once

#include <cstdint>

#include <json.hpp>

#include "cprob/egyptian.hpp"
#include "cprob/rational.hpp"

namespace cprob::detail {

/// JSON integer when it fits in int64, decimal string otherwise.
inline nlohmann::json big_to_json(const BigInt& v) {
  if (v <= BigInt(INT64_MAX) && v >= BigInt(INT64_MIN)) return static_cast<std::int64_t>(v);
  return v.str();
}

inline nlohmann::json denominators_json(const EgyptianRep& rep) {
  auto out = nlohmann::json::array();
  for (const auto& d : rep.denominators()) out.push_back(big_to_json(d));
  return out;
}

}  // namespace cprob::detail
