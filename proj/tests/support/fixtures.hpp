#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "nomiclaw/agents.hpp"
#include "nomiclaw/ledger.hpp"
#include "nomiclaw/protocol.hpp"

namespace nomiclaw::testing {

inline Vignette test_vignette(const std::string& id = "vtest") {
  Vignette v;
  v.id = id;
  v.title = "Test Scenario " + id;
  v.body = "A synthetic regulatory dilemma used by the test suite (" + id + ").";
  v.legal_domain = "test";
  return v;
}

/// Wraps another agent and fails a configured number of times per round
/// before delegating; lets tests drive the retry/exclusion path.
class FlakyAgent final : public Agent {
 public:
  FlakyAgent(std::unique_ptr<Agent> inner, int failures_per_round,
             std::set<int> failing_rounds)
      : inner_(std::move(inner)),
        failures_per_round_(failures_per_round),
        failing_rounds_(std::move(failing_rounds)) {}

  const AgentId& id() const override { return inner_->id(); }

  Result<Proposal> propose(const PromptContext& ctx) override {
    if (should_fail(ctx.round))
      return Result<Proposal>::fail("scripted flake (propose)");
    return inner_->propose(ctx);
  }

  Result<Ballot> vote(const PromptContext& ctx) override {
    if (should_fail(ctx.round)) return Result<Ballot>::fail("scripted flake (vote)");
    return inner_->vote(ctx);
  }

 private:
  bool should_fail(int round) {
    if (!failing_rounds_.count(round)) return false;
    int key = round;
    int& used = failures_used_[key];
    if (used >= failures_per_round_) return false;
    ++used;
    return true;
  }

  std::unique_ptr<Agent> inner_;
  int failures_per_round_;
  std::set<int> failing_rounds_;
  std::map<int, int> failures_used_;
};

struct FixtureSpec {
  int num_agents = 5;
  int num_rounds = 5;
  std::uint64_t seed = 1;
  bool heterogeneous = true;
  /// Rounds whose first-seat agent fails every attempt (round excluded).
  std::set<int> excluded_rounds;
  std::string vignette_id = "vtest";
  int run_index = 1;
};

/// Random mixed-policy roster: mostly uniform_random with occasional
/// self-voters, seat loyalists, and reciprocators.
inline std::vector<AgentBinding> fixture_roster(const FixtureSpec& spec) {
  Rng rng(Rng::mix(spec.seed, 0xf1c5));
  std::vector<AgentBinding> roster;
  for (int i = 1; i <= spec.num_agents; ++i) {
    AgentBinding b;
    char buf[24];
    std::snprintf(buf, sizeof buf, "agent_%02d", i);
    b.agent_id = buf;
    b.model_id = spec.heterogeneous ? "model_" + std::string(buf + 6)
                                    : "model_shared";
    b.kind = AgentBinding::Kind::scripted;
    switch (rng.below(6)) {
      case 0:
        b.policy_params["policy"] = "always_self_vote";
        break;
      case 1:
        b.policy_params["policy"] = "vote_for_seat";
        b.policy_params["seat"] =
            std::to_string(1 + rng.below(static_cast<std::uint64_t>(spec.num_agents)));
        break;
      case 2:
        b.policy_params["policy"] = "vote_previous_supporter";
        break;
      default:
        b.policy_params["policy"] = "uniform_random";
        b.policy_params["seed"] = std::to_string(rng.next());
    }
    roster.push_back(std::move(b));
  }
  return roster;
}

inline GameConfig fixture_config(const FixtureSpec& spec,
                                 const std::vector<AgentBinding>& roster) {
  GameConfig config;
  config.num_agents = spec.num_agents;
  config.num_rounds = spec.num_rounds;
  config.condition =
      spec.heterogeneous ? Condition::heterogeneous : Condition::homogeneous;
  for (const auto& b : roster) config.seat_order.push_back(b.agent_id);
  config.rng_seed = spec.seed;
  return config;
}

/// Plays one seeded fixture game through the real engine; excluded_rounds
/// are forced by making the first-seat agent fail its whole retry budget.
inline RunLog play_fixture(const FixtureSpec& spec) {
  std::vector<AgentBinding> roster = fixture_roster(spec);
  GameConfig config = fixture_config(spec, roster);
  AgentFactory base = scripted_agent_factory();
  AgentFactory factory = [&](const AgentBinding& binding, const GameConfig& cfg)
      -> std::unique_ptr<Agent> {
    auto inner = base(binding, cfg);
    if (binding.agent_id == roster.front().agent_id && !spec.excluded_rounds.empty())
      return std::make_unique<FlakyAgent>(std::move(inner), kAgentRetryBudget + 1,
                                          spec.excluded_rounds);
    return inner;
  };
  std::string run_id = make_run_id(config.condition, spec.vignette_id, spec.run_index);
  return play_run(config, test_vignette(spec.vignette_id), roster, factory, run_id,
                  spec.run_index);
}

/// Win counts of the ten-model heterogeneous batch, by model name.
inline const std::vector<std::pair<std::string, int>>& reference_win_counts() {
  static const std::vector<std::pair<std::string, int>> counts = {
      {"deepseek-r1", 21}, {"llama2", 16},
      {"phi4-reasoning", 13}, {"granite3.3", 12},
      {"phi4-mini-reasoning", 12}, {"phi4", 8},
      {"gemma2", 4}, {"qwen3", 2},
      {"gemma3", 1}, {"llama3", 1}};
  return counts;
}

/// Reconstructed heterogeneous analysis table: 24 runs x 5 rounds x 10
/// model-agents (1200 rows). Per-model round wins follow
/// reference_win_counts() exactly, the remaining 30 rounds are two-way ties,
/// and decided rounds are scattered across runs/vignettes by a seeded
/// shuffle.
inline Table reference_batch_table(std::uint64_t seed = 0x9e17) {
  const auto& counts = reference_win_counts();
  std::vector<std::string> models;
  for (const auto& [m, w] : counts) models.push_back(m);
  std::sort(models.begin(), models.end());

  // 120 round outcomes: the winner's model name, or "" for a tie.
  std::vector<std::string> outcome;
  for (const auto& [m, w] : counts)
    for (int i = 0; i < w; ++i) outcome.push_back(m);
  while (outcome.size() < 120) outcome.push_back("");
  Rng rng(seed);
  for (std::size_t i = outcome.size() - 1; i > 0; --i) {
    std::size_t j = rng.below(i + 1);
    std::swap(outcome[i], outcome[j]);
  }

  Table table;
  for (int slot = 0; slot < 120; ++slot) {
    int run = slot / 5 + 1;          // 1..24
    int round = slot % 5 + 1;        // 1..5
    int vignette = (run - 1) / 6 + 1;  // 6 runs per vignette
    int run_in_vignette = (run - 1) % 6 + 1;
    std::string vignette_id = "v" + std::to_string(vignette);
    std::string run_id = make_run_id(Condition::heterogeneous, vignette_id,
                                     run_in_vignette);
    const std::string& winner = outcome[slot];
    // Two-way tie between the first two seats when no winner.
    int rotation = (run - 1) % 10;
    std::vector<std::string> seats;
    for (int s = 0; s < 10; ++s) seats.push_back(models[(s + rotation) % 10]);

    for (int s = 0; s < 10; ++s) {
      const std::string& model = seats[s];
      InteractionRow row;
      row.run_id = run_id;
      row.vignette_id = vignette_id;
      row.round = round;
      row.agent_id = model;
      row.model_id = model;
      row.seat = s + 1;
      if (!winner.empty()) {
        row.vote_target = winner;
        row.won = model == winner;
        row.points = row.won ? 10 : 0;
      } else {
        row.vote_target = s < 5 ? seats[0] : seats[1];
        row.tied = model == seats[0] || model == seats[1];
        row.points = row.tied ? 5 : 0;
      }
      row.self_vote = row.vote_target == row.agent_id;
      row.rule_text = "Rule of " + model + " in round " + std::to_string(round);
      row.reasoning_text = "Reasoning of " + model;
      row.vote_justification = "I back " + row.vote_target + " here.";
      table.push_back(std::move(row));
    }
  }
  return table;
}

/// Seeded random theme labels over the closed alphabet (plus occasional
/// UNKNOWN) for consistency-metric fixtures.
inline void random_themes(Table& table, std::uint64_t seed) {
  static const char* kCodes[] = {"JUST", "LEG", "ACC",  "TRAN", "CONS", "HARM",
                                 "RGHT", "UTIL", "RESP", "SOLI", "UNKNOWN"};
  Rng rng(seed);
  for (auto& row : table) {
    row.rule_theme = kCodes[rng.below(11)];
    row.reasoning_theme = kCodes[rng.below(11)];
    row.vote_theme = kCodes[rng.below(11)];
  }
}

}  // namespace nomiclaw::testing
