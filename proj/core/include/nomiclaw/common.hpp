#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nomiclaw {

using AgentId = std::string;
using ModelId = std::string;

/// Invalid configuration (roster/condition mismatch, bad manifest, unknown policy).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Violation of the game protocol (duplicate voter, unknown vote target).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Data that fails its structural invariants (e.g. a run log whose scores
/// do not sum to the per-round deltas).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Condition { homogeneous, heterogeneous };

std::string to_string(Condition c);
std::string condition_short_name(Condition c);
Condition condition_from_string(const std::string& s);

/// Roster entry binding an agent slot to a model and behavior.
struct AgentBinding {
  AgentId agent_id;
  ModelId model_id;
  enum class Kind { scripted, stochastic, backend } kind = Kind::scripted;
  std::map<std::string, std::string> policy_params;
};

/// Lightweight value-or-error carrier used on expected failure paths
/// (agent replies, backend calls) where exceptions would be noise.
template <typename T>
class Result {
 public:
  static Result ok(T value) {
    Result r;
    r.has_ = true;
    r.value_ = std::move(value);
    return r;
  }
  static Result fail(std::string reason) {
    Result r;
    r.has_ = false;
    r.error_ = std::move(reason);
    return r;
  }
  bool has_value() const { return has_; }
  explicit operator bool() const { return has_; }
  const T& value() const { return value_; }
  T& value() { return value_; }
  const std::string& error() const { return error_; }

 private:
  Result() = default;
  bool has_ = false;
  T value_{};
  std::string error_;
};

/// Deterministic splitmix64 generator. Used everywhere a seeded draw is
/// needed so identical seeds replay bit-identically on any platform
/// (std::uniform_*_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  /// Mixes two seeds into one; order-sensitive.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    Rng r(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
    return r.next();
  }

  static std::uint64_t hash_string(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

 private:
  std::uint64_t state_;
};

}  // namespace nomiclaw
