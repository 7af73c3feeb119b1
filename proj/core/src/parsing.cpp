#include "nomiclaw/parsing.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace nomiclaw {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

/// Text after `label` up to the next known label or end of text.
std::string labeled_section(const std::string& raw,
                            const std::vector<std::string>& label_variants,
                            const std::vector<std::string>& stop_labels) {
  std::string low = lower(raw);
  std::size_t start = std::string::npos;
  for (const auto& label : label_variants) {
    auto pos = low.find(lower(label));
    if (pos != std::string::npos && pos < start) start = pos + label.size();
  }
  if (start == std::string::npos) return "";
  std::size_t end = raw.size();
  for (const auto& stop : stop_labels) {
    auto pos = low.find(lower(stop), start);
    if (pos != std::string::npos && pos < end) end = pos;
  }
  return trim(raw.substr(start, end - start));
}

json try_parse_json(const std::string& text) {
  return json::parse(text, nullptr, /*allow_exceptions=*/false);
}

std::string string_field(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = obj.find(key);
    if (it != obj.end() && it->is_string()) return trim(it->get<std::string>());
  }
  return "";
}

}  // namespace

std::string extract_json_object(const std::string& raw) {
  for (std::size_t start = raw.find('{'); start != std::string::npos;
       start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        --depth;
        if (depth == 0) {
          std::string candidate = raw.substr(start, i - start + 1);
          if (!try_parse_json(candidate).is_discarded()) return candidate;
          break;  // balanced but invalid; try the next opening brace
        }
      }
    }
  }
  return "";
}

bool contains_identifier(const std::string& text, const std::string& ident) {
  if (ident.empty()) return false;
  std::string low_text = lower(text);
  std::string low_ident = lower(ident);
  for (std::size_t pos = low_text.find(low_ident); pos != std::string::npos;
       pos = low_text.find(low_ident, pos + 1)) {
    bool left_ok = pos == 0 || !is_word_char(low_text[pos - 1]);
    std::size_t end = pos + low_ident.size();
    bool right_ok = end >= low_text.size() || !is_word_char(low_text[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

ProposalParse parse_proposal(const std::string& raw, int round,
                             const AgentId& proposer) {
  Proposal p;
  p.round = round;
  p.proposer = proposer;

  std::string obj_text = extract_json_object(raw);
  if (!obj_text.empty()) {
    json obj = try_parse_json(obj_text);
    if (obj.is_object()) {
      p.rule_text = string_field(obj, {"rule", "rule_text", "proposal"});
      p.reasoning_text = string_field(obj, {"reasoning", "reasoning_text", "justification"});
    }
  }
  if (p.rule_text.empty() || p.reasoning_text.empty()) {
    // Prose fallback: labeled sections anywhere in the reply.
    std::string rule = labeled_section(raw, {"rule:"}, {"reasoning:", "justification:"});
    std::string reasoning =
        labeled_section(raw, {"reasoning:", "justification:"}, {"rule:"});
    if (p.rule_text.empty()) p.rule_text = rule;
    if (p.reasoning_text.empty()) p.reasoning_text = reasoning;
  }

  if (p.rule_text.empty() && p.reasoning_text.empty())
    return ParseFailure{"no rule or reasoning found"};
  if (p.rule_text.empty()) return ParseFailure{"rule text missing"};
  if (p.reasoning_text.empty()) return ParseFailure{"reasoning text missing"};
  p.parse_ok = true;
  return p;
}

BallotParse parse_ballot(const std::string& raw, int round, const AgentId& voter,
                         const std::vector<AgentId>& valid_targets) {
  if (valid_targets.empty()) return ParseFailure{"no valid targets"};

  Ballot b;
  b.round = round;
  b.voter = voter;

  std::string target_text;
  std::string obj_text = extract_json_object(raw);
  if (!obj_text.empty()) {
    json obj = try_parse_json(obj_text);
    if (obj.is_object()) {
      target_text = string_field(obj, {"vote_target", "target", "vote"});
      b.justification_text = string_field(obj, {"justification", "reason", "reasoning"});
    }
  }
  if (target_text.empty()) {
    target_text = labeled_section(raw, {"vote_target:", "vote:", "target:"},
                                  {"justification:", "reason:"});
    if (b.justification_text.empty())
      b.justification_text =
          labeled_section(raw, {"justification:", "reason:"},
                          {"vote_target:", "vote:", "target:"});
  }
  // Last resort: scan the whole reply for target identifiers.
  std::string scan_text = target_text.empty() ? raw : target_text;

  // Exact identifier match first.
  std::vector<AgentId> matches;
  for (const auto& t : valid_targets)
    if (trim(scan_text) == t) matches.push_back(t);
  if (matches.empty()) {
    for (const auto& t : valid_targets)
      if (contains_identifier(scan_text, t)) matches.push_back(t);
  }

  if (matches.empty()) return ParseFailure{"no valid target named"};
  if (matches.size() > 1) return ParseFailure{"ambiguous target: multiple roster members named"};
  b.target = matches.front();
  if (b.justification_text.empty() && target_text.empty()) {
    // Unstructured reply: keep it verbatim as the justification.
    b.justification_text = trim(raw);
  }
  return b;
}

}  // namespace nomiclaw
