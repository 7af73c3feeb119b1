#include "nomiclaw/prompts.hpp"

#include <fstream>
#include <sstream>

#include "nomiclaw/common.hpp"

namespace nomiclaw {

namespace {

constexpr const char* kProposeSystem =
    "You are {{agent_id}}, a legislator in a {{num_agents}}-member assembly "
    "drafting rules for the scenario below. Each of {{num_rounds}} rounds you "
    "propose one rule, justify it, and vote on the round's proposals. A winning "
    "proposal earns its author {{points_win}} points; a tied round earns each "
    "tied author {{points_tie}} points. Maximize the acceptance of your own "
    "rules.\n\nScenario: {{vignette_title}} ({{legal_domain}})\n{{vignette_body}}\n";

constexpr const char* kProposeUser =
    "Round {{round}} of {{num_rounds}} — proposal phase.\n\n"
    "History so far:\n{{transcript}}\n\n"
    "Cumulative scores: {{scores}}\n\n"
    "Proposals already made this round:\n{{current_proposals}}\n\n"
    "Propose one new legal rule addressing the scenario and justify it.\n"
    "Answer with a single JSON object and nothing else:\n"
    "{\"rule\": \"<the rule text>\", \"reasoning\": \"<why this rule>\"}\n";

constexpr const char* kVoteSystem = kProposeSystem;

constexpr const char* kVoteUser =
    "Round {{round}} of {{num_rounds}} — voting phase.\n\n"
    "History so far:\n{{transcript}}\n\n"
    "Cumulative scores: {{scores}}\n\n"
    "This round's proposals:\n{{current_proposals}}\n\n"
    "Vote for exactly one proposer (voting for yourself is allowed). Valid "
    "targets: {{valid_targets}}\n"
    "Answer with a single JSON object and nothing else:\n"
    "{\"vote_target\": \"<agent id>\", \"justification\": \"<why this vote>\"}\n";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("missing prompt template: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string render_scores(const PromptContext& ctx) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [id, score] : ctx.scores) {
    if (!first) out << ", ";
    out << id << "=" << score;
    first = false;
  }
  return out.str();
}

std::string render_current_proposals(const PromptContext& ctx) {
  if (ctx.current_proposals.empty()) return "(none yet)";
  std::ostringstream out;
  for (const auto& p : ctx.current_proposals) {
    out << "- " << p.proposer << ": " << p.rule_text << "\n  reasoning: "
        << p.reasoning_text << "\n";
  }
  return out.str();
}

}  // namespace

TemplateSet TemplateSet::builtin() {
  return {kProposeSystem, kProposeUser, kVoteSystem, kVoteUser};
}

TemplateSet TemplateSet::load_dir(const std::filesystem::path& dir) {
  TemplateSet t;
  t.propose_system = read_file(dir / "propose_system.txt");
  t.propose_user = read_file(dir / "propose_user.txt");
  t.vote_system = read_file(dir / "vote_system.txt");
  t.vote_user = read_file(dir / "vote_user.txt");
  return t;
}

std::string interpolate(const std::string& tmpl,
                        const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    auto open = tmpl.find("{{", i);
    if (open == std::string::npos) {
      out.append(tmpl, i, std::string::npos);
      break;
    }
    out.append(tmpl, i, open - i);
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(tmpl, open, std::string::npos);
      break;
    }
    std::string key = tmpl.substr(open + 2, close - open - 2);
    auto it = values.find(key);
    if (it != values.end())
      out += it->second;
    else
      out += tmpl.substr(open, close + 2 - open);  // unknown key kept verbatim
    i = close + 2;
  }
  return out;
}

std::string render_transcript(const PromptContext& ctx) {
  if (!ctx.transcript || ctx.transcript->empty()) return "(no prior rounds)";
  std::ostringstream out;
  for (const auto& r : *ctx.transcript) {
    out << "Round " << r.round << ":\n";
    if (r.excluded) {
      out << "  (round excluded: a participant failed to produce a valid reply)\n";
      continue;
    }
    for (const auto& p : r.proposals)
      out << "  proposal by " << p.proposer << ": " << p.rule_text
          << "\n    reasoning: " << p.reasoning_text << "\n";
    for (const auto& b : r.ballots)
      out << "  vote " << b.voter << " -> " << b.target << ": "
          << b.justification_text << "\n";
    out << "  outcome: " << to_string(r.outcome.kind);
    if (!r.outcome.winners.empty()) {
      out << " [";
      bool first = true;
      for (const auto& w : r.outcome.winners) {
        if (!first) out << ", ";
        out << w;
        first = false;
      }
      out << "]";
    }
    out << "\n";
  }
  return out.str();
}

RenderedPrompt render_prompt(const PromptContext& ctx, const TemplateSet& templates) {
  if (!ctx.vignette) throw ConfigError("prompt context missing vignette");
  if (ctx.phase == Phase::vote && ctx.valid_targets.empty())
    throw ConfigError("vote phase requires valid targets");

  std::string targets;
  for (std::size_t i = 0; i < ctx.valid_targets.size(); ++i) {
    if (i) targets += ", ";
    targets += ctx.valid_targets[i];
  }

  std::map<std::string, std::string> values = {
      {"agent_id", ctx.self_id},
      {"round", std::to_string(ctx.round)},
      {"num_rounds", std::to_string(ctx.num_rounds)},
      {"num_agents", std::to_string(ctx.roster ? ctx.roster->size() : 0)},
      {"vignette_id", ctx.vignette->id},
      {"vignette_title", ctx.vignette->title},
      {"vignette_body", ctx.vignette->body},
      {"legal_domain", ctx.vignette->legal_domain},
      {"transcript", render_transcript(ctx)},
      {"scores", render_scores(ctx)},
      {"current_proposals", render_current_proposals(ctx)},
      {"valid_targets", targets},
      {"points_win", std::to_string(ctx.points_win)},
      {"points_tie", std::to_string(ctx.points_tie)},
  };

  RenderedPrompt out;
  if (ctx.phase == Phase::propose) {
    out.system = interpolate(templates.propose_system, values);
    out.user = interpolate(templates.propose_user, values);
  } else {
    out.system = interpolate(templates.vote_system, values);
    out.user = interpolate(templates.vote_user, values);
  }
  return out;
}

}  // namespace nomiclaw
