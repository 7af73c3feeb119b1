#include "nomiclaw/common.hpp"

namespace nomiclaw {

std::string to_string(Condition c) {
  return c == Condition::homogeneous ? "homogeneous" : "heterogeneous";
}

std::string condition_short_name(Condition c) {
  return c == Condition::homogeneous ? "homo" : "hetero";
}

Condition condition_from_string(const std::string& s) {
  if (s == "homogeneous" || s == "homo") return Condition::homogeneous;
  if (s == "heterogeneous" || s == "hetero") return Condition::heterogeneous;
  throw ConfigError("unknown condition: " + s);
}

}  // namespace nomiclaw
