#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nomiclaw/protocol.hpp"

namespace nomiclaw {

struct ParseFailure {
  std::string reason;
};

using ProposalParse = std::variant<Proposal, ParseFailure>;
using BallotParse = std::variant<Ballot, ParseFailure>;

/// Extracts {rule, reasoning} from a model reply. Primary route: the
/// first balanced JSON object in the text. Fallback: labeled sections
/// ("RULE:", "REASONING:", case-insensitive) in prose. Both fields must
/// come out non-empty.
ProposalParse parse_proposal(const std::string& raw, int round,
                             const AgentId& proposer);

/// Extracts {vote_target, justification}. The target is resolved against
/// valid_targets by exact identifier match first, then by unique
/// case-insensitive containment; zero or multiple matches fail.
BallotParse parse_ballot(const std::string& raw, int round,
                         const AgentId& voter,
                         const std::vector<AgentId>& valid_targets);

/// First balanced {...} object in the text (string-literal aware), or
/// empty when there is none.
std::string extract_json_object(const std::string& raw);

/// Case-insensitive word-boundary containment of an identifier in text.
/// Word characters are alphanumerics and '_', so "Agent_3" does not match
/// inside "Agent_33".
bool contains_identifier(const std::string& text, const std::string& ident);

}  // namespace nomiclaw
