#include "nomiclaw/protocol.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nomiclaw/agents.hpp"

namespace nomiclaw {

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::winner: return "winner";
    case OutcomeKind::tie: return "tie";
    case OutcomeKind::undecided: return "undecided";
  }
  return "undecided";
}

OutcomeKind outcome_kind_from_string(const std::string& s) {
  if (s == "winner") return OutcomeKind::winner;
  if (s == "tie") return OutcomeKind::tie;
  if (s == "undecided") return OutcomeKind::undecided;
  throw ValidationError("unknown outcome kind: " + s);
}

GameState new_game(const GameConfig& config, const Vignette& vignette,
                   const std::vector<AgentBinding>& roster) {
  if (config.num_agents <= 0)
    throw ConfigError("num_agents must be positive");
  if (config.num_rounds < 1)
    throw ConfigError("num_rounds must be at least 1");
  if (!(config.points_win > config.points_tie && config.points_tie > 0))
    throw ConfigError("point scheme must satisfy points_win > points_tie > 0");
  if (static_cast<int>(roster.size()) != config.num_agents)
    throw ConfigError("roster size " + std::to_string(roster.size()) +
                      " does not match num_agents " +
                      std::to_string(config.num_agents));
  if (vignette.body.empty()) throw ConfigError("vignette body is empty");

  std::set<AgentId> ids;
  std::set<ModelId> models;
  for (const auto& b : roster) {
    if (!ids.insert(b.agent_id).second)
      throw ConfigError("duplicate agent id: " + b.agent_id);
    models.insert(b.model_id);
  }
  if (config.condition == Condition::homogeneous && models.size() != 1)
    throw ConfigError("homogeneous condition requires a single model");
  if (config.condition == Condition::heterogeneous &&
      models.size() != roster.size())
    throw ConfigError("heterogeneous condition requires all-distinct models");

  std::vector<AgentId> seats = config.seat_order;
  if (seats.empty()) {
    for (const auto& b : roster) seats.push_back(b.agent_id);
  }
  if (seats.size() != roster.size())
    throw ConfigError("seat_order size does not match roster");
  std::set<AgentId> seat_set(seats.begin(), seats.end());
  if (seat_set != ids)
    throw ConfigError("seat_order is not a permutation of the roster");

  GameState state;
  state.config = config;
  state.config.seat_order = seats;
  state.vignette = vignette;
  for (int i = 0; i < static_cast<int>(seats.size()); ++i) {
    auto it = std::find_if(roster.begin(), roster.end(), [&](const AgentBinding& b) {
      return b.agent_id == seats[i];
    });
    state.roster.push_back({it->agent_id, it->model_id, i + 1});
  }
  for (const auto& b : roster) state.scores[b.agent_id] = 0;
  state.next_round = 1;
  return state;
}

Outcome tally(const std::vector<Ballot>& ballots,
              const std::vector<AgentId>& roster) {
  std::set<AgentId> roster_set(roster.begin(), roster.end());
  std::set<AgentId> seen_voters;
  Outcome out;
  for (const auto& id : roster) out.vote_counts[id] = 0;
  for (const auto& b : ballots) {
    if (!roster_set.count(b.voter))
      throw ProtocolError("ballot from non-roster voter " + b.voter);
    if (!seen_voters.insert(b.voter).second)
      throw ProtocolError("duplicate ballot from voter " + b.voter);
    if (!roster_set.count(b.target))
      throw ProtocolError("ballot target " + b.target + " not in roster");
    out.vote_counts[b.target] += 1;
  }
  if (seen_voters.size() != roster_set.size())
    throw ProtocolError("expected one ballot per roster member");

  int max_count = 0;
  for (const auto& [id, c] : out.vote_counts) max_count = std::max(max_count, c);
  for (const auto& [id, c] : out.vote_counts)
    if (c == max_count && max_count > 0) out.winners.insert(id);
  out.kind = out.winners.size() == 1 ? OutcomeKind::winner : OutcomeKind::tie;
  return out;
}

std::map<AgentId, int> award_points(const Outcome& outcome,
                                    const GameConfig& config) {
  std::map<AgentId, int> deltas;
  for (const auto& [id, c] : outcome.vote_counts) deltas[id] = 0;
  if (outcome.kind == OutcomeKind::winner) {
    deltas[*outcome.winners.begin()] = config.points_win;
  } else if (outcome.kind == OutcomeKind::tie) {
    for (const auto& id : outcome.winners) deltas[id] = config.points_tie;
  }
  return deltas;
}

namespace {

PromptContext base_context(const GameState& state, const AgentId& self) {
  PromptContext ctx;
  ctx.vignette = &state.vignette;
  ctx.transcript = &state.rounds;
  ctx.roster = &state.roster;
  ctx.scores = state.scores;
  ctx.self_id = self;
  ctx.round = state.next_round;
  ctx.num_rounds = state.config.num_rounds;
  ctx.points_win = state.config.points_win;
  ctx.points_tie = state.config.points_tie;
  return ctx;
}

}  // namespace

RoundRecord run_round(GameState& state, const AgentSet& agents) {
  if (state.next_round > state.config.num_rounds)
    throw ProtocolError("game already has " +
                        std::to_string(state.config.num_rounds) + " rounds");

  RoundRecord record;
  record.round = state.next_round;
  std::vector<AgentId> roster_ids;
  for (const auto& seat : state.roster) roster_ids.push_back(seat.agent_id);

  bool excluded = false;

  // Phase 1: proposals in seat order; earlier proposals of this round are
  // visible to later seats.
  for (const auto& seat : state.roster) {
    Agent* agent = agents.at(seat.agent_id);
    PromptContext ctx = base_context(state, seat.agent_id);
    ctx.phase = Phase::propose;
    ctx.current_proposals = record.proposals;
    auto acceptable = [](const Result<Proposal>& r) {
      return r.has_value() && r.value().parse_ok && !r.value().rule_text.empty() &&
             !r.value().reasoning_text.empty();
    };
    Result<Proposal> got = Result<Proposal>::fail("not attempted");
    for (int attempt = 0; attempt <= kAgentRetryBudget; ++attempt) {
      got = agent->propose(ctx);
      if (acceptable(got)) break;
    }
    if (!acceptable(got)) {
      excluded = true;
      Proposal failed;
      failed.round = record.round;
      failed.proposer = seat.agent_id;
      failed.parse_ok = false;
      record.proposals.push_back(failed);
      break;
    }
    Proposal p = got.value();
    p.round = record.round;
    p.proposer = seat.agent_id;
    record.proposals.push_back(p);
  }

  // Phase 2: ballots in seat order once every proposal exists.
  if (!excluded) {
    std::vector<AgentId> targets;
    for (const auto& p : record.proposals) targets.push_back(p.proposer);
    for (const auto& seat : state.roster) {
      Agent* agent = agents.at(seat.agent_id);
      PromptContext ctx = base_context(state, seat.agent_id);
      ctx.phase = Phase::vote;
      ctx.current_proposals = record.proposals;
      ctx.valid_targets = targets;
      Result<Ballot> got = Result<Ballot>::fail("not attempted");
      for (int attempt = 0; attempt <= kAgentRetryBudget; ++attempt) {
        got = agent->vote(ctx);
        if (got && std::find(targets.begin(), targets.end(),
                             got.value().target) != targets.end())
          break;
        got = Result<Ballot>::fail(got ? "target not in valid set" : got.error());
      }
      if (!got) {
        excluded = true;
        break;
      }
      Ballot b = got.value();
      b.round = record.round;
      b.voter = seat.agent_id;
      record.ballots.push_back(b);
    }
  }

  record.excluded = excluded;
  if (excluded) {
    record.outcome.kind = OutcomeKind::undecided;
    for (const auto& id : roster_ids) record.point_deltas[id] = 0;
  } else {
    record.outcome = tally(record.ballots, roster_ids);
    record.point_deltas = award_points(record.outcome, state.config);
    for (const auto& [id, d] : record.point_deltas) state.scores[id] += d;
  }

  state.rounds.push_back(record);
  state.next_round += 1;
  return record;
}

RunLog run_game(GameState state, const AgentSet& agents,
                const std::string& run_id, int run_index) {
  while (state.next_round <= state.config.num_rounds) run_round(state, agents);

  RunLog log;
  log.run_id = run_id;
  log.run_index = run_index;
  log.vignette_id = state.vignette.id;
  log.config = state.config;
  log.roster = state.roster;
  log.rounds = state.rounds;
  log.final_scores = state.scores;
  return log;
}

void validate_run_log(const RunLog& log) {
  auto fail = [&](const std::string& why) {
    throw ValidationError("run log " + log.run_id + ": " + why);
  };
  if (static_cast<int>(log.rounds.size()) != log.config.num_rounds)
    fail("round count " + std::to_string(log.rounds.size()) +
         " != configured " + std::to_string(log.config.num_rounds));
  if (log.roster.empty()) fail("empty roster");

  std::vector<AgentId> roster_ids;
  std::map<AgentId, int> sums;
  for (const auto& seat : log.roster) {
    roster_ids.push_back(seat.agent_id);
    sums[seat.agent_id] = 0;
  }

  for (const auto& r : log.rounds) {
    int delta_sum = 0;
    for (const auto& [id, d] : r.point_deltas) {
      if (!sums.count(id)) fail("delta for unknown agent " + id);
      sums[id] += d;
      delta_sum += d;
    }
    if (r.excluded) {
      if (delta_sum != 0)
        fail("excluded round " + std::to_string(r.round) + " carries points");
      continue;
    }
    int ballots = static_cast<int>(r.ballots.size());
    int counted = 0;
    for (const auto& [id, c] : r.outcome.vote_counts) counted += c;
    if (counted != ballots)
      fail("round " + std::to_string(r.round) + " vote counts sum to " +
           std::to_string(counted) + ", ballots " + std::to_string(ballots));
    Outcome again = tally(r.ballots, roster_ids);
    if (again.kind != r.outcome.kind || again.winners != r.outcome.winners ||
        again.vote_counts != r.outcome.vote_counts)
      fail("round " + std::to_string(r.round) + " outcome does not re-tally");
    bool is_win = r.outcome.kind == OutcomeKind::winner;
    int expected = is_win ? log.config.points_win
                          : static_cast<int>(r.outcome.winners.size()) *
                                log.config.points_tie;
    if (delta_sum != expected)
      fail("round " + std::to_string(r.round) + " awards " +
           std::to_string(delta_sum) + ", expected " + std::to_string(expected));
  }

  for (const auto& [id, total] : sums) {
    auto it = log.final_scores.find(id);
    if (it == log.final_scores.end() || it->second != total)
      fail("final score of " + id + " does not equal the delta sum");
  }
}

}  // namespace nomiclaw
