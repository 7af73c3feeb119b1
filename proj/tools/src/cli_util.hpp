#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nomiclaw/agents.hpp"
#include "nomiclaw/protocol.hpp"
#include "nomiclaw/table.hpp"

namespace nomiclaw::cli {

// Stable process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kInputFailure = 2;

/// Simulation batch description, read from a key = value manifest file
/// (# starts a comment). Paths are resolved relative to the manifest.
struct RunManifest {
  Condition condition = Condition::heterogeneous;
  std::filesystem::path vignettes;
  std::filesystem::path roster;      // fixed-roster mode
  std::filesystem::path model_pool;  // homogeneous group mode
  int group_size = 5;
  std::string pool_agent_kind = "backend";
  std::string pool_policy = "uniform_random";
  int runs_per_vignette = 1;
  std::filesystem::path out_dir = "logs";
  int jobs = 1;
  std::uint64_t seed = 42;
  int rounds = 5;
  int points_win = 10;
  int points_tie = 5;
  bool rotate_seats = true;
  std::string backend_url;
  double temperature = 0.7;
  int timeout_ms = 30000;
  int retries = 3;
  double rate_per_sec = 0.0;
  std::filesystem::path templates;
};

RunManifest read_manifest(const std::filesystem::path& path);

std::vector<Vignette> load_vignettes(const std::filesystem::path& path);
std::vector<AgentBinding> load_roster(const std::filesystem::path& path);
std::vector<std::string> load_model_pool(const std::filesystem::path& path);

std::string format_double(double v, const char* fmt = "%.6g");
std::string format_rate3(double v);  // fixed 3 decimals

/// Writes rows (header first) to the path, or stdout when path is empty.
void emit_csv(const std::filesystem::path& path,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

Table load_table_or_fail(const std::filesystem::path& csv_path);

/// Win counts per model plus round-level decided/undecided tallies.
struct WinSummary {
  std::vector<std::pair<std::string, int>> wins_per_model;  // sorted: wins desc, name asc
  std::map<std::string, int> rounds_per_model;              // agent-rounds
  int total_rounds = 0;    // distinct (run, round)
  int undecided_rounds = 0;
};

WinSummary summarize_wins(const Table& table);

}  // namespace nomiclaw::cli
