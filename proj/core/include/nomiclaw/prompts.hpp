#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nomiclaw/protocol.hpp"

namespace nomiclaw {

enum class Phase { propose, vote };

/// Everything an agent may see when asked to act: the vignette, all prior
/// rounds, cumulative scores, and (vote phase) the current round's
/// proposals with the legal vote targets.
struct PromptContext {
  const Vignette* vignette = nullptr;
  const std::vector<RoundRecord>* transcript = nullptr;
  const std::vector<SeatAssignment>* roster = nullptr;
  std::map<AgentId, int> scores;
  Phase phase = Phase::propose;
  AgentId self_id;
  int round = 1;
  int num_rounds = 5;
  int points_win = 10;
  int points_tie = 5;
  /// Proposals already made this round (earlier seats in the propose
  /// phase; all of them in the vote phase).
  std::vector<Proposal> current_proposals;
  std::vector<AgentId> valid_targets;  // vote phase only
};

struct RenderedPrompt {
  std::string system;
  std::string user;
};

/// Template texts for both phases. Placeholders use {{name}} syntax; see
/// docs/formats.md for the full placeholder list.
struct TemplateSet {
  std::string propose_system;
  std::string propose_user;
  std::string vote_system;
  std::string vote_user;

  /// Built-in templates, identical to the files shipped under templates/.
  static TemplateSet builtin();
  /// Loads {propose,vote}_{system,user}.txt from a directory; missing
  /// file throws ConfigError.
  static TemplateSet load_dir(const std::filesystem::path& dir);
};

/// Pure function of (ctx, templates): identical inputs yield identical
/// text. The propose prompt demands a JSON object {"rule", "reasoning"};
/// the vote prompt demands {"vote_target", "justification"} restricted to
/// ctx.valid_targets.
RenderedPrompt render_prompt(const PromptContext& ctx, const TemplateSet& templates);

/// Human-readable transcript of prior rounds used inside prompts; empty
/// transcript renders an explicit empty-history marker.
std::string render_transcript(const PromptContext& ctx);

std::string interpolate(const std::string& tmpl,
                        const std::map<std::string, std::string>& values);

}  // namespace nomiclaw
