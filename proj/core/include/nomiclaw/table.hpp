#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nomiclaw/common.hpp"

namespace nomiclaw {

/// One agent-round observation of the flat analysis table. Theme and
/// mention columns stay empty until annotation.
struct InteractionRow {
  std::string run_id;
  std::string vignette_id;
  int round = 0;
  AgentId agent_id;
  ModelId model_id;
  int seat = 0;
  AgentId vote_target;
  bool self_vote = false;
  bool won = false;
  bool tied = false;
  int points = 0;
  std::string rule_text;
  std::string reasoning_text;
  std::string vote_justification;
  std::string rule_theme;       // theme code or empty
  std::string reasoning_theme;  // theme code or empty
  std::string vote_theme;       // theme code or empty
  std::optional<bool> peer_mentioned;
  std::optional<bool> winner_mentioned;
};

using Table = std::vector<InteractionRow>;

/// Fixed column order of the analysis CSV.
const std::vector<std::string>& table_columns();

void write_table_csv(const Table& table, const std::filesystem::path& path);
std::string table_to_csv(const Table& table);
Table read_table_csv(const std::filesystem::path& path);

/// Condition encoded in the run id prefix ("hetero_..." / "homo_...").
Condition condition_of_run(const std::string& run_id);

/// Rows of one run grouped for metric computations; orders runs, rounds
/// and seats deterministically.
std::vector<Table> group_by_run(const Table& table);

}  // namespace nomiclaw
