#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "nomiclaw/common.hpp"

namespace nomiclaw {

struct GameConfig {
  int num_agents = 0;
  int num_rounds = 5;
  int points_win = 10;
  int points_tie = 5;
  Condition condition = Condition::heterogeneous;
  std::vector<AgentId> seat_order;
  std::uint64_t rng_seed = 0;
  std::map<std::string, std::string> backend_params;
};

struct Vignette {
  std::string id;
  std::string title;
  std::string body;
  std::string legal_domain;
};

struct Proposal {
  int round = 0;
  AgentId proposer;
  std::string rule_text;
  std::string reasoning_text;
  bool parse_ok = false;
};

struct Ballot {
  int round = 0;
  AgentId voter;
  AgentId target;
  std::string justification_text;
};

enum class OutcomeKind { winner, tie, undecided };

std::string to_string(OutcomeKind k);
OutcomeKind outcome_kind_from_string(const std::string& s);

struct Outcome {
  OutcomeKind kind = OutcomeKind::undecided;
  std::set<AgentId> winners;
  std::map<AgentId, int> vote_counts;
};

struct RoundRecord {
  int round = 0;
  std::vector<Proposal> proposals;
  std::vector<Ballot> ballots;
  Outcome outcome;
  std::map<AgentId, int> point_deltas;
  bool excluded = false;
};

struct SeatAssignment {
  AgentId agent_id;
  ModelId model_id;
  int seat = 0;  // 1-based; seat 1 is the first mover
};

struct RunLog {
  std::string run_id;
  int run_index = 0;
  std::string vignette_id;
  GameConfig config;
  std::vector<SeatAssignment> roster;
  std::vector<RoundRecord> rounds;
  std::map<AgentId, int> final_scores;
};

/// Mutable state of one game in progress. Rounds append in order; scores
/// are cumulative over the appended rounds.
struct GameState {
  GameConfig config;
  Vignette vignette;
  std::vector<SeatAssignment> roster;
  std::vector<RoundRecord> rounds;
  std::map<AgentId, int> scores;
  int next_round = 1;
};

class Agent;
using AgentSet = std::map<AgentId, Agent*>;

/// Validates config + roster and returns the initial state (empty
/// transcript, zero scores, round counter at 1). Throws ConfigError when
/// the roster contradicts the condition, seats are not a permutation of
/// the roster, or the point scheme is non-positive / non-ordered.
GameState new_game(const GameConfig& config, const Vignette& vignette,
                   const std::vector<AgentBinding>& roster);

/// Plurality tally over one round's ballots. Requires exactly one ballot
/// per roster member and targets inside the roster; throws ProtocolError
/// otherwise. Unique maximal count -> winner, shared maximum -> tie with
/// every maximal target in the winner set.
Outcome tally(const std::vector<Ballot>& ballots,
              const std::vector<AgentId>& roster);

/// Points for a tallied outcome: the winner takes points_win, every
/// member of a tie set takes points_tie, everyone else zero.
std::map<AgentId, int> award_points(const Outcome& outcome,
                                    const GameConfig& config);

/// Number of retries after the first failed attempt before a round is
/// marked excluded (four attempts in total).
inline constexpr int kAgentRetryBudget = 3;

/// Plays one round: proposals in seat order (earlier proposals of the
/// same round visible to later seats), then ballots in seat order with
/// all proposals visible, then tally/award. An agent that fails every
/// attempt marks the round excluded (zero deltas, outcome undecided);
/// the game continues.
RoundRecord run_round(GameState& state, const AgentSet& agents);

/// Runs num_rounds rounds from a fresh state and assembles the RunLog.
/// Agents must be freshly constructed per run (memories start empty).
RunLog run_game(GameState state, const AgentSet& agents,
                const std::string& run_id, int run_index);

/// Checks RunLog invariants: round count, score conservation, per-round
/// outcome consistency with stored ballots, excluded rounds carrying zero
/// deltas. Throws ValidationError with a description on failure.
void validate_run_log(const RunLog& log);

}  // namespace nomiclaw
