#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nomiclaw/backend.hpp"
#include "nomiclaw/parsing.hpp"
#include "nomiclaw/prompts.hpp"
#include "nomiclaw/protocol.hpp"

namespace nomiclaw {

/// Per-agent conversation buffer. Cleared implicitly by constructing a
/// fresh agent per run; grows append-only within a run.
struct AgentMemory {
  std::vector<ChatMessage> messages;
  void append(std::string role, std::string content) {
    messages.push_back({std::move(role), std::move(content)});
  }
};

/// The agent contract: produce a proposal or a ballot for the given
/// context, or report failure. Agents never touch shared game state; the
/// orchestrator owns retries and exclusion.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual const AgentId& id() const = 0;
  virtual Result<Proposal> propose(const PromptContext& ctx) = 0;
  virtual Result<Ballot> vote(const PromptContext& ctx) = 0;
  /// Conversation buffer, when the agent keeps one (backend agents do).
  virtual const AgentMemory* memory() const { return nullptr; }
};

/// Deterministic (or seed-deterministic) test agents.
///
/// Policies, selected by policy_params["policy"]:
///   always_self_vote          — votes for itself every round
///   vote_for_seat             — votes for the agent at seat policy_params["seat"]
///   vote_previous_supporter   — votes for the lowest-seat agent that voted
///                               for it last round; self when none exists
///   uniform_random            — seeded uniform target choice
///                               (policy_params["seed"], mixed with the
///                               game seed and the agent's seat)
///   replay                    — replays policy_params["targets"], a
///                               comma-separated target per round
///
/// Unknown policy names throw ConfigError.
std::unique_ptr<Agent> make_scripted_agent(const AgentBinding& binding,
                                           const GameConfig& config);

/// Chat-backed agent: renders the phase prompt, keeps a conversation
/// buffer, calls the transport, parses the reply. params are shared by
/// every backend agent of a game (identical settings except model_id).
std::unique_ptr<Agent> make_backend_agent(const AgentBinding& binding,
                                          std::shared_ptr<ChatTransport> transport,
                                          const BackendParams& params,
                                          const TemplateSet& templates);

using AgentFactory =
    std::function<std::unique_ptr<Agent>(const AgentBinding&, const GameConfig&)>;

/// Factory for scripted/stochastic bindings; throws ConfigError for
/// backend bindings (those need a transport).
AgentFactory scripted_agent_factory();

/// Factory covering all binding kinds: backend bindings go through the
/// transport, scripted/stochastic ones through their policies.
AgentFactory mixed_agent_factory(std::shared_ptr<ChatTransport> transport,
                                 BackendParams params,
                                 TemplateSet templates);

/// Builds agents for a roster, plays one full game, and returns the log.
/// A fresh agent (fresh memory) is constructed for every run.
RunLog play_run(const GameConfig& config, const Vignette& vignette,
                const std::vector<AgentBinding>& roster,
                const AgentFactory& factory, const std::string& run_id,
                int run_index);

}  // namespace nomiclaw
