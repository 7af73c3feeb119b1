#include "nomiclaw/table.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nomiclaw/csv.hpp"

namespace nomiclaw {

namespace {

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string tri_str(const std::optional<bool>& b) {
  return b.has_value() ? bool_str(*b) : "";
}

bool parse_bool(const std::string& s, const char* what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ValidationError(std::string("bad boolean for ") + what + ": '" + s + "'");
}

std::optional<bool> parse_tri(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  return parse_bool(s, what);
}

}  // namespace

const std::vector<std::string>& table_columns() {
  static const std::vector<std::string> cols = {
      "run_id",         "vignette_id",   "round",
      "agent_id",       "model_id",      "seat",
      "vote_target",    "self_vote",     "won",
      "tied",           "points",        "rule_text",
      "reasoning_text", "vote_justification", "rule_theme",
      "reasoning_theme", "vote_theme",   "peer_mentioned",
      "winner_mentioned"};
  return cols;
}

std::string table_to_csv(const Table& table) {
  std::ostringstream out;
  csv::write_row(out, table_columns());
  for (const auto& r : table) {
    csv::write_row(out, {r.run_id, r.vignette_id, std::to_string(r.round),
                         r.agent_id, r.model_id, std::to_string(r.seat),
                         r.vote_target, bool_str(r.self_vote), bool_str(r.won),
                         bool_str(r.tied), std::to_string(r.points), r.rule_text,
                         r.reasoning_text, r.vote_justification, r.rule_theme,
                         r.reasoning_theme, r.vote_theme, tri_str(r.peer_mentioned),
                         tri_str(r.winner_mentioned)});
  }
  return out.str();
}

void write_table_csv(const Table& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV file: " + path.string());
  out << table_to_csv(table);
}

Table read_table_csv(const std::filesystem::path& path) {
  csv::Document doc = csv::read_file(path);
  const auto& cols = table_columns();
  if (doc.header.size() < cols.size())
    throw ValidationError("analysis CSV has " + std::to_string(doc.header.size()) +
                          " columns, expected at least " + std::to_string(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (doc.header[i] != cols[i])
      throw ValidationError("analysis CSV column " + std::to_string(i) + " is '" +
                            doc.header[i] + "', expected '" + cols[i] + "'");

  Table table;
  table.reserve(doc.rows.size());
  for (const auto& row : doc.rows) {
    if (row.size() < cols.size())
      throw ValidationError("analysis CSV row with " + std::to_string(row.size()) +
                            " fields");
    try {
    InteractionRow r;
    r.run_id = row[0];
    r.vignette_id = row[1];
    r.round = std::stoi(row[2]);
    r.agent_id = row[3];
    r.model_id = row[4];
    r.seat = std::stoi(row[5]);
    r.vote_target = row[6];
    r.self_vote = parse_bool(row[7], "self_vote");
    r.won = parse_bool(row[8], "won");
    r.tied = parse_bool(row[9], "tied");
    r.points = std::stoi(row[10]);
    r.rule_text = row[11];
    r.reasoning_text = row[12];
    r.vote_justification = row[13];
    r.rule_theme = row[14];
    r.reasoning_theme = row[15];
    r.vote_theme = row[16];
    r.peer_mentioned = parse_tri(row[17], "peer_mentioned");
    r.winner_mentioned = parse_tri(row[18], "winner_mentioned");
    table.push_back(std::move(r));
    } catch (const std::invalid_argument&) {
      throw ValidationError("analysis CSV row with non-numeric field (run " +
                            row[0] + ")");
    } catch (const std::out_of_range&) {
      throw ValidationError("analysis CSV row with out-of-range number (run " +
                            row[0] + ")");
    }
  }
  return table;
}

Condition condition_of_run(const std::string& run_id) {
  if (run_id.rfind("homo_", 0) == 0) return Condition::homogeneous;
  if (run_id.rfind("hetero_", 0) == 0) return Condition::heterogeneous;
  // Unknown prefix: treat as heterogeneous, the permissive default.
  return Condition::heterogeneous;
}

std::vector<Table> group_by_run(const Table& table) {
  std::map<std::string, Table> by_run;
  for (const auto& r : table) by_run[r.run_id].push_back(r);
  std::vector<Table> out;
  out.reserve(by_run.size());
  for (auto& [id, rows] : by_run) {
    std::sort(rows.begin(), rows.end(),
              [](const InteractionRow& a, const InteractionRow& b) {
                return std::tie(a.round, a.seat) < std::tie(b.round, b.seat);
              });
    out.push_back(std::move(rows));
  }
  return out;
}

}  // namespace nomiclaw
