#include "cli_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nomiclaw/csv.hpp"

namespace nomiclaw::cli {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("invalid JSON in " + path.string());
  return j;
}

}  // namespace

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());

  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  RunManifest m;
  std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  try {
    if (auto v = get("condition")) m.condition = condition_from_string(*v);
    if (auto v = get("vignettes")) m.vignettes = resolve(*v);
    if (auto v = get("roster")) m.roster = resolve(*v);
    if (auto v = get("model_pool")) m.model_pool = resolve(*v);
    if (auto v = get("group_size")) m.group_size = std::stoi(*v);
    if (auto v = get("pool_agent_kind")) m.pool_agent_kind = *v;
    if (auto v = get("pool_policy")) m.pool_policy = *v;
    if (auto v = get("runs_per_vignette")) m.runs_per_vignette = std::stoi(*v);
    if (auto v = get("out_dir")) m.out_dir = resolve(*v);
    if (auto v = get("jobs")) m.jobs = std::stoi(*v);
    if (auto v = get("seed")) m.seed = std::stoull(*v);
    if (auto v = get("rounds")) m.rounds = std::stoi(*v);
    if (auto v = get("points_win")) m.points_win = std::stoi(*v);
    if (auto v = get("points_tie")) m.points_tie = std::stoi(*v);
    if (auto v = get("rotate_seats")) m.rotate_seats = *v == "true" || *v == "1";
    if (auto v = get("backend_url")) m.backend_url = *v;
    if (auto v = get("temperature")) m.temperature = std::stod(*v);
    if (auto v = get("timeout_ms")) m.timeout_ms = std::stoi(*v);
    if (auto v = get("retries")) m.retries = std::stoi(*v);
    if (auto v = get("rate_per_sec")) m.rate_per_sec = std::stod(*v);
    if (auto v = get("templates")) m.templates = resolve(*v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("manifest " + path.string() + " has a non-numeric value");
  } catch (const std::out_of_range&) {
    throw ConfigError("manifest " + path.string() + " has an out-of-range value");
  }

  if (m.vignettes.empty())
    throw ConfigError("manifest must name a vignette set ('vignettes = ...')");
  if (m.roster.empty() && m.model_pool.empty())
    throw ConfigError("manifest needs either 'roster' or 'model_pool'");
  return m;
}

std::vector<Vignette> load_vignettes(const std::filesystem::path& path) {
  json j = parse_json_file(path);
  if (!j.is_array() || j.empty())
    throw ConfigError("vignette set must be a non-empty JSON array");
  std::vector<Vignette> out;
  std::set<std::string> ids;
  for (const auto& vj : j) {
    Vignette v;
    v.id = vj.at("id").get<std::string>();
    v.title = vj.value("title", v.id);
    v.body = vj.at("body").get<std::string>();
    v.legal_domain = vj.value("legal_domain", "");
    if (v.body.empty()) throw ConfigError("vignette " + v.id + " has an empty body");
    if (!ids.insert(v.id).second)
      throw ConfigError("duplicate vignette id " + v.id);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<AgentBinding> load_roster(const std::filesystem::path& path) {
  json j = parse_json_file(path);
  if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty())
    throw ConfigError("roster file needs a non-empty 'agents' array");
  std::vector<AgentBinding> out;
  for (const auto& aj : j["agents"]) {
    AgentBinding b;
    b.agent_id = aj.at("agent_id").get<std::string>();
    b.model_id = aj.at("model_id").get<std::string>();
    std::string kind = aj.value("kind", "backend");
    if (kind == "backend") b.kind = AgentBinding::Kind::backend;
    else if (kind == "scripted") b.kind = AgentBinding::Kind::scripted;
    else if (kind == "stochastic") b.kind = AgentBinding::Kind::stochastic;
    else throw ConfigError("unknown agent kind '" + kind + "' for " + b.agent_id);
    if (aj.contains("policy"))
      b.policy_params = aj["policy"].get<std::map<std::string, std::string>>();
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<std::string> load_model_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model pool " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  if (out.empty()) throw ConfigError("model pool " + path.string() + " is empty");
  return out;
}

std::string format_double(double v, const char* fmt) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string format_rate3(double v) { return format_double(v, "%.3f"); }

void emit_csv(const std::filesystem::path& path,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  if (path.empty()) {
    csv::write_row(std::cout, header);
    for (const auto& row : rows) csv::write_row(std::cout, row);
    return;
  }
  csv::Document doc;
  doc.header = header;
  doc.rows = rows;
  csv::write_file(path, doc);
}

Table load_table_or_fail(const std::filesystem::path& csv_path) {
  if (!std::filesystem::is_regular_file(csv_path))
    throw ValidationError("analysis CSV not found: " + csv_path.string());
  Table table = read_table_csv(csv_path);
  if (table.empty())
    throw ValidationError("analysis CSV " + csv_path.string() + " has no rows");
  return table;
}

WinSummary summarize_wins(const Table& table) {
  WinSummary s;
  std::map<std::string, int> wins;
  std::set<std::pair<std::string, int>> rounds;
  std::set<std::pair<std::string, int>> decided;
  for (const auto& r : table) {
    wins[r.model_id] += r.won ? 1 : 0;
    s.rounds_per_model[r.model_id] += 1;
    rounds.insert({r.run_id, r.round});
    if (r.won) decided.insert({r.run_id, r.round});
  }
  s.total_rounds = static_cast<int>(rounds.size());
  s.undecided_rounds = s.total_rounds - static_cast<int>(decided.size());
  for (const auto& [model, w] : wins) s.wins_per_model.push_back({model, w});
  std::sort(s.wins_per_model.begin(), s.wins_per_model.end(),
            [](const auto& a, const auto& b) {
              return std::tie(b.second, a.first) < std::tie(a.second, b.first);
            });
  return s;
}

}  // namespace nomiclaw::cli
