#include "nomiclaw/ledger.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nomiclaw {

namespace {

using nlohmann::json;  // keys serialize sorted, so dumps are reproducible

json config_to_json(const GameConfig& c) {
  json j;
  j["num_agents"] = c.num_agents;
  j["num_rounds"] = c.num_rounds;
  j["points_win"] = c.points_win;
  j["points_tie"] = c.points_tie;
  j["condition"] = to_string(c.condition);
  j["seat_order"] = c.seat_order;
  j["rng_seed"] = c.rng_seed;
  j["backend_params"] = c.backend_params;
  return j;
}

GameConfig config_from_json(const json& j) {
  GameConfig c;
  c.num_agents = j.at("num_agents").get<int>();
  c.num_rounds = j.at("num_rounds").get<int>();
  c.points_win = j.at("points_win").get<int>();
  c.points_tie = j.at("points_tie").get<int>();
  c.condition = condition_from_string(j.at("condition").get<std::string>());
  c.seat_order = j.at("seat_order").get<std::vector<std::string>>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  if (j.contains("backend_params"))
    c.backend_params = j.at("backend_params").get<std::map<std::string, std::string>>();
  return c;
}

json outcome_to_json(const Outcome& o) {
  json j;
  j["kind"] = to_string(o.kind);
  j["winners"] = std::vector<std::string>(o.winners.begin(), o.winners.end());
  j["vote_counts"] = o.vote_counts;
  return j;
}

Outcome outcome_from_json(const json& j) {
  Outcome o;
  o.kind = outcome_kind_from_string(j.at("kind").get<std::string>());
  for (const auto& w : j.at("winners")) o.winners.insert(w.get<std::string>());
  o.vote_counts = j.at("vote_counts").get<std::map<std::string, int>>();
  return o;
}

json round_to_json(const RoundRecord& r) {
  json j;
  j["round"] = r.round;
  j["excluded"] = r.excluded;
  json props = json::array();
  for (const auto& p : r.proposals)
    props.push_back({{"round", p.round},
                     {"proposer", p.proposer},
                     {"rule_text", p.rule_text},
                     {"reasoning_text", p.reasoning_text},
                     {"parse_ok", p.parse_ok}});
  j["proposals"] = std::move(props);
  json ballots = json::array();
  for (const auto& b : r.ballots)
    ballots.push_back({{"round", b.round},
                       {"voter", b.voter},
                       {"target", b.target},
                       {"justification_text", b.justification_text}});
  j["ballots"] = std::move(ballots);
  j["outcome"] = outcome_to_json(r.outcome);
  j["point_deltas"] = r.point_deltas;
  return j;
}

RoundRecord round_from_json(const json& j) {
  RoundRecord r;
  r.round = j.at("round").get<int>();
  r.excluded = j.at("excluded").get<bool>();
  for (const auto& pj : j.at("proposals")) {
    Proposal p;
    p.round = pj.at("round").get<int>();
    p.proposer = pj.at("proposer").get<std::string>();
    p.rule_text = pj.at("rule_text").get<std::string>();
    p.reasoning_text = pj.at("reasoning_text").get<std::string>();
    p.parse_ok = pj.at("parse_ok").get<bool>();
    r.proposals.push_back(std::move(p));
  }
  for (const auto& bj : j.at("ballots")) {
    Ballot b;
    b.round = bj.at("round").get<int>();
    b.voter = bj.at("voter").get<std::string>();
    b.target = bj.at("target").get<std::string>();
    b.justification_text = bj.at("justification_text").get<std::string>();
    r.ballots.push_back(std::move(b));
  }
  r.outcome = outcome_from_json(j.at("outcome"));
  r.point_deltas = j.at("point_deltas").get<std::map<std::string, int>>();
  return r;
}

std::string two_digit(int n) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", n);
  return buf;
}

struct FilenameFields {
  std::string condition;
  std::string vignette_id;
  int run_index = 0;
};

// nomiclaw_<cond>_<vignette>_run<NN>.json; vignette ids may contain '_',
// so the run suffix anchors the parse.
bool parse_filename(const std::string& name, FilenameFields& out) {
  if (name.rfind("nomiclaw_", 0) != 0) return false;
  if (name.size() < 6 || name.substr(name.size() - 5) != ".json") return false;
  std::string stem = name.substr(9, name.size() - 9 - 5);
  auto run_pos = stem.rfind("_run");
  if (run_pos == std::string::npos) return false;
  std::string run_digits = stem.substr(run_pos + 4);
  if (run_digits.empty() ||
      run_digits.find_first_not_of("0123456789") != std::string::npos)
    return false;
  auto cond_end = stem.find('_');
  if (cond_end == std::string::npos || cond_end >= run_pos) return false;
  out.condition = stem.substr(0, cond_end);
  out.vignette_id = stem.substr(cond_end + 1, run_pos - cond_end - 1);
  out.run_index = std::stoi(run_digits);
  return !out.vignette_id.empty();
}

}  // namespace

std::string make_run_id(Condition condition, const std::string& vignette_id,
                        int run_index) {
  return condition_short_name(condition) + "_" + vignette_id + "_run" +
         two_digit(run_index);
}

std::string run_log_filename(Condition condition, const std::string& vignette_id,
                             int run_index) {
  return "nomiclaw_" + condition_short_name(condition) + "_" + vignette_id +
         "_run" + two_digit(run_index) + ".json";
}

std::string run_log_to_json(const RunLog& log) {
  json j;
  j["schema_version"] = kRunLogSchemaVersion;
  j["run_id"] = log.run_id;
  j["run_index"] = log.run_index;
  j["vignette_id"] = log.vignette_id;
  j["config"] = config_to_json(log.config);
  json roster = json::array();
  for (const auto& s : log.roster)
    roster.push_back(
        {{"agent_id", s.agent_id}, {"model_id", s.model_id}, {"seat", s.seat}});
  j["roster"] = std::move(roster);
  json rounds = json::array();
  for (const auto& r : log.rounds) rounds.push_back(round_to_json(r));
  j["rounds"] = std::move(rounds);
  j["final_scores"] = log.final_scores;
  return j.dump(2) + "\n";
}

RunLog run_log_from_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("schema_version"))
    throw ValidationError("run log lacks schema_version");
  int version = j.at("schema_version").get<int>();
  if (version != kRunLogSchemaVersion)
    throw ValidationError("unsupported run log schema_version " +
                          std::to_string(version));
  RunLog log;
  log.run_id = j.at("run_id").get<std::string>();
  log.run_index = j.at("run_index").get<int>();
  log.vignette_id = j.at("vignette_id").get<std::string>();
  log.config = config_from_json(j.at("config"));
  for (const auto& sj : j.at("roster")) {
    SeatAssignment s;
    s.agent_id = sj.at("agent_id").get<std::string>();
    s.model_id = sj.at("model_id").get<std::string>();
    s.seat = sj.at("seat").get<int>();
    log.roster.push_back(std::move(s));
  }
  for (const auto& rj : j.at("rounds")) log.rounds.push_back(round_from_json(rj));
  log.final_scores = j.at("final_scores").get<std::map<std::string, int>>();
  return log;
}

std::filesystem::path write_run_log(const RunLog& log,
                                    const std::filesystem::path& dir) {
  validate_run_log(log);
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError("not a directory: " + dir.string());

  std::filesystem::path final_path =
      dir / run_log_filename(log.config.condition, log.vignette_id, log.run_index);
  std::filesystem::path tmp_path = final_path;
  tmp_path += ".tmp";

  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp_path.string());
    out << run_log_to_json(log);
    if (!out.good()) throw IoError("short write to " + tmp_path.string());
  }
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) throw IoError("rename to " + final_path.string() + " failed: " + ec.message());
  return final_path;
}

LoadResult load_run_logs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("not a directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("nomiclaw_", 0) == 0 && name.size() > 5 &&
        name.substr(name.size() - 5) == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  LoadResult result;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      FilenameFields fields;
      if (!parse_filename(name, fields))
        throw ValidationError("filename does not match the run log grammar");
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      RunLog log = run_log_from_json(ss.str());
      if (condition_short_name(log.config.condition) != fields.condition)
        throw ValidationError("filename condition '" + fields.condition +
                              "' disagrees with body '" +
                              to_string(log.config.condition) + "'");
      if (log.vignette_id != fields.vignette_id)
        throw ValidationError("filename vignette '" + fields.vignette_id +
                              "' disagrees with body '" + log.vignette_id + "'");
      if (log.run_index != fields.run_index)
        throw ValidationError("filename run index " +
                              std::to_string(fields.run_index) +
                              " disagrees with body " +
                              std::to_string(log.run_index));
      validate_run_log(log);
      result.logs.push_back(std::move(log));
    } catch (const std::exception& e) {
      result.errors.push_back({name, e.what()});
    }
  }
  std::sort(result.logs.begin(), result.logs.end(),
            [](const RunLog& a, const RunLog& b) { return a.run_id < b.run_id; });
  return result;
}

Table export_rows(const std::vector<RunLog>& logs) {
  std::vector<const RunLog*> ordered;
  for (const auto& log : logs) ordered.push_back(&log);
  std::sort(ordered.begin(), ordered.end(),
            [](const RunLog* a, const RunLog* b) { return a->run_id < b->run_id; });

  Table table;
  for (const RunLog* log : ordered) {
    std::map<AgentId, const SeatAssignment*> seats;
    for (const auto& s : log->roster) seats[s.agent_id] = &s;
    for (const auto& round : log->rounds) {
      if (round.excluded) continue;
      std::map<AgentId, const Proposal*> proposals;
      for (const auto& p : round.proposals) proposals[p.proposer] = &p;
      std::map<AgentId, const Ballot*> ballots;
      for (const auto& b : round.ballots) ballots[b.voter] = &b;

      std::vector<const SeatAssignment*> by_seat;
      for (const auto& s : log->roster) by_seat.push_back(&s);
      std::sort(by_seat.begin(), by_seat.end(),
                [](const SeatAssignment* a, const SeatAssignment* b) {
                  return a->seat < b->seat;
                });

      for (const SeatAssignment* seat : by_seat) {
        InteractionRow row;
        row.run_id = log->run_id;
        row.vignette_id = log->vignette_id;
        row.round = round.round;
        row.agent_id = seat->agent_id;
        row.model_id = seat->model_id;
        row.seat = seat->seat;
        const Ballot* ballot = ballots.count(seat->agent_id)
                                   ? ballots.at(seat->agent_id)
                                   : nullptr;
        if (ballot) {
          row.vote_target = ballot->target;
          row.self_vote = ballot->target == seat->agent_id;
          row.vote_justification = ballot->justification_text;
        }
        bool in_winners = round.outcome.winners.count(seat->agent_id) > 0;
        row.won = round.outcome.kind == OutcomeKind::winner && in_winners;
        row.tied = round.outcome.kind == OutcomeKind::tie && in_winners;
        auto delta = round.point_deltas.find(seat->agent_id);
        row.points = delta == round.point_deltas.end() ? 0 : delta->second;
        if (const Proposal* p =
                proposals.count(seat->agent_id) ? proposals.at(seat->agent_id) : nullptr) {
          row.rule_text = p->rule_text;
          row.reasoning_text = p->reasoning_text;
        }
        table.push_back(std::move(row));
      }
    }
  }
  return table;
}

BalanceReport verify_balance(const Table& table,
                             const std::map<std::string, int>* expected_rounds) {
  BalanceReport report;
  // "Equal rounds per agent" holds per condition: an excluded round drops
  // one row from every roster member alike, so uniform gaps stay
  // balanced, while a missing single agent-round (or runs of unequal
  // roster under shared agent ids) breaks it.
  std::map<std::string, std::map<std::string, int>> per_condition_agent;
  std::map<std::string, std::set<int>> rounds_seen;
  for (const auto& row : table) {
    std::string cond = condition_short_name(condition_of_run(row.run_id));
    per_condition_agent[cond][row.agent_id] += 1;
    rounds_seen[row.run_id].insert(row.round);
    report.rows_per_run[row.run_id] += 1;
  }

  for (const auto& [cond, agents] : per_condition_agent) {
    int reference = -1;
    for (const auto& [agent_id, count] : agents) {
      report.rows_per_agent[cond + "/" + agent_id] = count;
      if (reference < 0) reference = count;
    }
    for (const auto& [agent_id, count] : agents) {
      if (count != reference) {
        report.is_balanced = false;
        report.offenders.push_back(cond + "/" + agent_id);
      }
    }
  }

  for (const auto& [run_id, rounds] : rounds_seen) {
    int present = static_cast<int>(rounds.size());
    if (expected_rounds && expected_rounds->count(run_id)) {
      report.excluded_rounds += expected_rounds->at(run_id) - present;
    } else {
      // Without log context only gaps below the highest seen round are
      // visible.
      int max_round = rounds.empty() ? 0 : *rounds.rbegin();
      report.excluded_rounds += max_round - present;
    }
  }
  return report;
}

}  // namespace nomiclaw
