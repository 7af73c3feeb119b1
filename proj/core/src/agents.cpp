#include "nomiclaw/agents.hpp"

#include <algorithm>
#include <sstream>

namespace nomiclaw {

namespace {

int seat_of(const PromptContext& ctx, const AgentId& id) {
  for (const auto& s : *ctx.roster)
    if (s.agent_id == id) return s.seat;
  return 0;
}

const AgentId& agent_at_seat(const PromptContext& ctx, int seat) {
  for (const auto& s : *ctx.roster)
    if (s.seat == seat) return s.agent_id;
  throw ConfigError("no agent at seat " + std::to_string(seat));
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

/// Deterministic proposal text, varied over a small bank so the theme
/// pipeline sees every code. Pure in (round, agent): retries must not
/// change the reply.
Proposal scripted_proposal(const PromptContext& ctx, const AgentId& self) {
  static const char* kRules[] = {
      "deployments require prior review so that no one faces unjust bias",
      "operators must comply with regulation before any rollout",
      "every automated decision requires oversight by a named official",
      "decision systems must be explainable to the people they affect",
      "data use without user consent is prohibited",
      "systems shown to create future risk are suspended until it prevents harm",
      "no measure may restrict freedom of association or expression",
      "rules are chosen by whichever option reduces cost for the public",
      "the deploying party is liable for failure of its system",
      "licensing fees fund programs that benefit society as a whole",
  };
  static const char* kReasons[] = {
      "This ensures fair access for everyone affected.",
      "A codified standard keeps the process lawful and predictable.",
      "Someone must be accountable when systems misbehave.",
      "Opaque systems are unjust to those they judge.",
      "Informed choice requires an explicit opt-in.",
      "Acting early reduces future risk at low cost.",
      "The right to privacy outweighs administrative convenience.",
      "The greatest good for most people favors this trade-off.",
      "Shared responsibility collapses without a liable party.",
      "Protecting future generations is the common good at stake.",
  };
  constexpr std::size_t kBank = sizeof(kRules) / sizeof(kRules[0]);
  std::size_t pick =
      (Rng::hash_string(self) + static_cast<std::size_t>(ctx.round)) % kBank;

  Proposal p;
  p.round = ctx.round;
  p.proposer = self;
  std::ostringstream rule;
  rule << "Rule " << ctx.round << " by " << self << " for '" << ctx.vignette->id
       << "': " << kRules[pick];
  std::ostringstream reason;
  reason << kReasons[(pick + static_cast<std::size_t>(ctx.round)) % kBank];
  p.rule_text = rule.str();
  p.reasoning_text = reason.str();
  p.parse_ok = true;
  return p;
}

Ballot make_ballot(const PromptContext& ctx, const AgentId& self,
                   const AgentId& target, std::string justification) {
  Ballot b;
  b.round = ctx.round;
  b.voter = self;
  b.target = target;
  b.justification_text = std::move(justification);
  return b;
}

enum class Policy {
  always_self_vote,
  vote_for_seat,
  vote_previous_supporter,
  uniform_random,
  replay,
};

Policy policy_from_string(const std::string& name) {
  if (name == "always_self_vote") return Policy::always_self_vote;
  if (name == "vote_for_seat") return Policy::vote_for_seat;
  if (name == "vote_previous_supporter") return Policy::vote_previous_supporter;
  if (name == "uniform_random") return Policy::uniform_random;
  if (name == "replay") return Policy::replay;
  throw ConfigError("unknown scripted policy: " + name);
}

class ScriptedAgent final : public Agent {
 public:
  ScriptedAgent(AgentBinding binding, const GameConfig& config)
      : binding_(std::move(binding)),
        rng_(Rng::mix(Rng::mix(config.rng_seed, Rng::hash_string(binding_.agent_id)),
                      policy_seed())) {
    auto it = binding_.policy_params.find("policy");
    if (it == binding_.policy_params.end()) {
      if (binding_.kind == AgentBinding::Kind::stochastic)
        policy_ = Policy::uniform_random;
      else
        throw ConfigError("scripted binding for " + binding_.agent_id +
                          " has no policy");
    } else {
      policy_ = policy_from_string(it->second);
    }
    if (policy_ == Policy::vote_for_seat) {
      auto s = binding_.policy_params.find("seat");
      if (s == binding_.policy_params.end())
        throw ConfigError("vote_for_seat policy needs a 'seat' parameter");
      try {
        target_seat_ = std::stoi(s->second);
      } catch (const std::exception&) {
        throw ConfigError("vote_for_seat seat parameter is not a number: " +
                          s->second);
      }
    }
    if (policy_ == Policy::replay) {
      auto t = binding_.policy_params.find("targets");
      if (t == binding_.policy_params.end())
        throw ConfigError("replay policy needs a 'targets' parameter");
      replay_targets_ = split_csv_list(t->second);
    }
  }

  const AgentId& id() const override { return binding_.agent_id; }

  Result<Proposal> propose(const PromptContext& ctx) override {
    return Result<Proposal>::ok(scripted_proposal(ctx, binding_.agent_id));
  }

  Result<Ballot> vote(const PromptContext& ctx) override {
    const AgentId& self = binding_.agent_id;
    switch (policy_) {
      case Policy::always_self_vote:
        return Result<Ballot>::ok(
            make_ballot(ctx, self, self, "My own rule fits the scenario best."));
      case Policy::vote_for_seat:
        return Result<Ballot>::ok(make_ballot(
            ctx, self, agent_at_seat(ctx, target_seat_),
            "The proposal from seat " + std::to_string(target_seat_) +
                " is the soundest."));
      case Policy::vote_previous_supporter: {
        AgentId target = self;
        if (!ctx.transcript->empty()) {
          const RoundRecord& prev = ctx.transcript->back();
          int best_seat = 0;
          if (!prev.excluded) {
            for (const auto& b : prev.ballots) {
              if (b.target != self || b.voter == self) continue;
              int seat = seat_of(ctx, b.voter);
              if (best_seat == 0 || seat < best_seat) {
                best_seat = seat;
                target = b.voter;
              }
            }
          }
        }
        std::string why = target == self
                              ? "No one backed me last round, so I back myself."
                              : "I support " + target + ", who supported my rule last round.";
        return Result<Ballot>::ok(make_ballot(ctx, self, target, why));
      }
      case Policy::uniform_random: {
        const AgentId& target =
            ctx.valid_targets[rng_.below(ctx.valid_targets.size())];
        // Half of the justifications name the target so that mention
        // detection has organic positives and negatives.
        std::string why = rng_.chance(0.5)
                              ? "I support " + target + " because the rule is concrete."
                              : "This proposal balances the competing interests best.";
        return Result<Ballot>::ok(make_ballot(ctx, self, target, why));
      }
      case Policy::replay: {
        std::size_t idx = static_cast<std::size_t>(ctx.round - 1);
        if (idx >= replay_targets_.size())
          return Result<Ballot>::fail("replay fixture exhausted at round " +
                                      std::to_string(ctx.round));
        return Result<Ballot>::ok(make_ballot(ctx, self, replay_targets_[idx],
                                              "Replaying the recorded ballot."));
      }
    }
    return Result<Ballot>::fail("unreachable");
  }

 private:
  std::uint64_t policy_seed() const {
    auto it = binding_.policy_params.find("seed");
    if (it == binding_.policy_params.end()) return 0;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("policy seed is not a number: " + it->second);
    }
  }

  AgentBinding binding_;
  Policy policy_ = Policy::always_self_vote;
  int target_seat_ = 1;
  std::vector<std::string> replay_targets_;
  Rng rng_;
};

class BackendAgent final : public Agent {
 public:
  BackendAgent(AgentBinding binding, std::shared_ptr<ChatTransport> transport,
               BackendParams params, TemplateSet templates)
      : binding_(std::move(binding)),
        transport_(std::move(transport)),
        params_(std::move(params)),
        templates_(std::move(templates)) {}

  const AgentId& id() const override { return binding_.agent_id; }

  Result<Proposal> propose(const PromptContext& ctx) override {
    Result<std::string> reply = exchange(ctx);
    if (!reply) return Result<Proposal>::fail(reply.error());
    ProposalParse parsed = parse_proposal(reply.value(), ctx.round, binding_.agent_id);
    if (auto* failure = std::get_if<ParseFailure>(&parsed))
      return Result<Proposal>::fail(failure->reason);
    return Result<Proposal>::ok(std::get<Proposal>(parsed));
  }

  Result<Ballot> vote(const PromptContext& ctx) override {
    Result<std::string> reply = exchange(ctx);
    if (!reply) return Result<Ballot>::fail(reply.error());
    BallotParse parsed =
        parse_ballot(reply.value(), ctx.round, binding_.agent_id, ctx.valid_targets);
    if (auto* failure = std::get_if<ParseFailure>(&parsed))
      return Result<Ballot>::fail(failure->reason);
    return Result<Ballot>::ok(std::get<Ballot>(parsed));
  }

  const AgentMemory* memory() const override { return &memory_; }

 private:
  Result<std::string> exchange(const PromptContext& ctx) {
    RenderedPrompt prompt = render_prompt(ctx, templates_);
    if (memory_.messages.empty()) memory_.append("system", prompt.system);
    memory_.append("user", prompt.user);
    Result<std::string> reply =
        transport_->complete(binding_.model_id, memory_.messages, params_);
    if (reply) memory_.append("assistant", reply.value());
    return reply;
  }

  AgentBinding binding_;
  std::shared_ptr<ChatTransport> transport_;
  BackendParams params_;
  TemplateSet templates_;
  AgentMemory memory_;
};

}  // namespace

std::unique_ptr<Agent> make_scripted_agent(const AgentBinding& binding,
                                           const GameConfig& config) {
  return std::make_unique<ScriptedAgent>(binding, config);
}

std::unique_ptr<Agent> make_backend_agent(const AgentBinding& binding,
                                          std::shared_ptr<ChatTransport> transport,
                                          const BackendParams& params,
                                          const TemplateSet& templates) {
  return std::make_unique<BackendAgent>(binding, std::move(transport), params,
                                        templates);
}

AgentFactory scripted_agent_factory() {
  return [](const AgentBinding& binding, const GameConfig& config) {
    if (binding.kind == AgentBinding::Kind::backend)
      throw ConfigError("backend binding " + binding.agent_id +
                        " needs a transport; use mixed_agent_factory");
    return make_scripted_agent(binding, config);
  };
}

AgentFactory mixed_agent_factory(std::shared_ptr<ChatTransport> transport,
                                 BackendParams params, TemplateSet templates) {
  return [transport = std::move(transport), params = std::move(params),
          templates = std::move(templates)](const AgentBinding& binding,
                                            const GameConfig& config) {
    if (binding.kind == AgentBinding::Kind::backend) {
      // Invocation settings are shared; only model_id varies per agent.
      return make_backend_agent(binding, transport, params, templates);
    }
    return make_scripted_agent(binding, config);
  };
}

RunLog play_run(const GameConfig& config, const Vignette& vignette,
                const std::vector<AgentBinding>& roster,
                const AgentFactory& factory, const std::string& run_id,
                int run_index) {
  GameState state = new_game(config, vignette, roster);
  std::vector<std::unique_ptr<Agent>> agents;
  AgentSet set;
  for (const auto& binding : roster) {
    agents.push_back(factory(binding, state.config));
    set[binding.agent_id] = agents.back().get();
  }
  return run_game(std::move(state), set, run_id, run_index);
}

}  // namespace nomiclaw
