#include "nomiclaw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nomiclaw/parsing.hpp"

namespace nomiclaw {

namespace {

/// Rows of one agent within one run, ascending by round.
Table agent_history(const Table& run_rows, const AgentId& agent) {
  Table rows;
  for (const auto& r : run_rows)
    if (r.agent_id == agent) rows.push_back(r);
  std::sort(rows.begin(), rows.end(),
            [](const InteractionRow& a, const InteractionRow& b) {
              return a.round < b.round;
            });
  return rows;
}

std::vector<int> sorted_rounds(const Table& run_rows) {
  std::set<int> rounds;
  for (const auto& r : run_rows) rounds.insert(r.round);
  return {rounds.begin(), rounds.end()};
}

std::vector<AgentId> roster_of(const Table& run_rows) {
  std::map<int, AgentId> by_seat;
  for (const auto& r : run_rows) by_seat[r.seat] = r.agent_id;
  std::vector<AgentId> out;
  for (const auto& [seat, id] : by_seat) out.push_back(id);
  return out;
}

/// Winner of a decided round, or empty.
AgentId round_winner(const Table& run_rows, int round) {
  for (const auto& r : run_rows)
    if (r.round == round && r.won) return r.agent_id;
  return "";
}

}  // namespace

std::optional<double> self_vote_rate(const Table& run_rows, const AgentId& agent) {
  Table h = agent_history(run_rows, agent);
  if (h.empty()) return std::nullopt;
  int self = 0;
  for (const auto& r : h)
    if (r.self_vote) ++self;
  return static_cast<double>(self) / static_cast<double>(h.size());
}

std::optional<double> avg_votes_received(const Table& run_rows, const AgentId& agent) {
  Table h = agent_history(run_rows, agent);
  if (h.empty()) return std::nullopt;
  int received = 0;
  for (const auto& r : run_rows)
    if (r.vote_target == agent) ++received;
  return static_cast<double>(received) / static_cast<double>(h.size());
}

std::optional<double> win_rate(const Table& run_rows, const AgentId& agent) {
  Table h = agent_history(run_rows, agent);
  if (h.empty()) return std::nullopt;
  int wins = 0;
  for (const auto& r : h)
    if (r.won) ++wins;
  return static_cast<double>(wins) / static_cast<double>(h.size());
}

std::optional<double> vote_volatility(const Table& run_rows, const AgentId& agent) {
  Table h = agent_history(run_rows, agent);
  if (h.size() < 2) return std::nullopt;
  int changes = 0;
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i].vote_target != h[i - 1].vote_target) ++changes;
  return static_cast<double>(changes) / static_cast<double>(h.size() - 1);
}

std::optional<double> vote_persistence(const Table& run_rows, const AgentId& agent) {
  auto vv = vote_volatility(run_rows, agent);
  if (!vv) return std::nullopt;
  return 1.0 - *vv;
}

std::optional<double> reciprocity_index(const Table& run_rows, const AgentId& agent,
                                        const RiOptions& opts) {
  std::map<int, std::map<AgentId, AgentId>> votes;  // round -> voter -> target
  for (const auto& r : run_rows)
    if (!r.vote_target.empty()) votes[r.round][r.agent_id] = r.vote_target;

  int opportunities = 0;
  int returned = 0;
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    auto next = std::next(it);
    if (next == votes.end()) break;
    if (next->first != it->first + 1) continue;  // excluded round in between

    const auto& prev_votes = it->second;
    const auto& cur_votes = next->second;
    auto own = cur_votes.find(agent);
    if (own == cur_votes.end()) continue;

    std::vector<AgentId> supporters;
    for (const auto& [voter, target] : prev_votes) {
      if (target != agent) continue;
      if (voter == agent && !opts.include_self_support) continue;
      supporters.push_back(voter);
    }
    if (supporters.empty()) continue;

    if (opts.per_round) {
      opportunities += 1;
      if (std::find(supporters.begin(), supporters.end(), own->second) !=
          supporters.end())
        returned += 1;
    } else {
      for (const auto& s : supporters) {
        opportunities += 1;
        if (own->second == s) returned += 1;
      }
    }
  }
  if (opportunities == 0) return std::nullopt;
  return static_cast<double>(returned) / static_cast<double>(opportunities);
}

BlocTrace bloc_trace(const Table& run_rows, const AgentId& agent) {
  BlocTrace trace;
  for (int round : sorted_rounds(run_rows)) {
    AgentId winner = round_winner(run_rows, round);
    if (winner.empty()) {
      trace.push_back(std::nullopt);  // tied round: membership undefined
      continue;
    }
    bool in_bloc = false;
    for (const auto& r : run_rows) {
      if (r.round != round || r.agent_id != agent) continue;
      in_bloc = r.agent_id == winner || r.vote_target == winner;
    }
    trace.push_back(in_bloc);
  }
  return trace;
}

std::optional<double> coalition_switch_rate(const BlocTrace& trace) {
  int transitions = 0;
  int switches = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!trace[i - 1].has_value() || !trace[i].has_value()) continue;
    ++transitions;
    if (*trace[i] != *trace[i - 1]) ++switches;
  }
  if (transitions == 0) return std::nullopt;
  return static_cast<double>(switches) / static_cast<double>(transitions);
}

std::optional<double> bloc_stability(const BlocTrace& trace) {
  std::size_t first_in = trace.size();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].has_value() && *trace[i]) {
      first_in = i;
      break;
    }
  }
  if (first_in == trace.size()) return std::nullopt;  // never joins
  int defined = 0;
  int in_bloc = 0;
  for (std::size_t i = first_in; i < trace.size(); ++i) {
    if (!trace[i].has_value()) continue;
    ++defined;
    if (*trace[i]) ++in_bloc;
  }
  return static_cast<double>(in_bloc) / static_cast<double>(defined);
}

VoteGraph vote_graph(const Table& run_rows, int round) {
  VoteGraph g;
  g.nodes = roster_of(run_rows);
  std::map<AgentId, int> index;
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) index[g.nodes[i]] = i;
  for (const auto& r : run_rows) {
    if (r.round != round || r.vote_target.empty()) continue;
    g.edges.emplace_back(index.at(r.agent_id), index.at(r.vote_target));
  }
  return g;
}

std::optional<double> edge_density(const VoteGraph& g) {
  std::size_t n = g.nodes.size();
  if (n < 2) return std::nullopt;
  return static_cast<double>(g.edges.size()) / static_cast<double>(n * (n - 1));
}

double node_clustering(const VoteGraph& g, int node) {
  // Fagiolo's total directed clustering. Self-loops are dropped; a node
  // with fewer than two distinct neighbors (or only a reciprocal pair)
  // cannot close a triangle and scores 0.
  int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& [from, to] : g.edges)
    if (from != to) adj[from][to] = true;

  auto both = [&](int a, int b) { return (adj[a][b] ? 1 : 0) + (adj[b][a] ? 1 : 0); };

  int i = node;
  long long triangles = 0;  // (A + A^T)^3 diagonal, via explicit triples
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    for (int k = 0; k < n; ++k) {
      if (k == i || k == j) continue;
      triangles += static_cast<long long>(both(i, j)) * both(j, k) * both(k, i);
    }
  }
  int d_tot = 0;
  int d_bi = 0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    if (adj[i][j]) ++d_tot;
    if (adj[j][i]) ++d_tot;
    if (adj[i][j] && adj[j][i]) ++d_bi;
  }
  long long denom = 2LL * (static_cast<long long>(d_tot) * (d_tot - 1) - 2LL * d_bi);
  if (denom <= 0) return 0.0;
  return static_cast<double>(triangles) / static_cast<double>(denom);
}

std::optional<double> clustering_coefficient(const VoteGraph& g) {
  std::size_t n = g.nodes.size();
  if (n < 3) return std::nullopt;
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(n); ++i) sum += node_clustering(g, i);
  return sum / static_cast<double>(n);
}

std::optional<double> first_mover_win_rate(const std::vector<Table>& runs,
                                           bool final_score_mode) {
  int decided = 0;
  int first_mover_wins = 0;
  for (const auto& run_rows : runs) {
    AgentId seat1;
    for (const auto& r : run_rows)
      if (r.seat == 1) seat1 = r.agent_id;
    if (seat1.empty()) continue;

    if (final_score_mode) {
      std::map<AgentId, int> totals;
      for (const auto& r : run_rows) totals[r.agent_id] += r.points;
      int best = 0;
      for (const auto& [id, t] : totals) best = std::max(best, t);
      int holders = 0;
      for (const auto& [id, t] : totals)
        if (t == best) ++holders;
      if (holders != 1 || best == 0) continue;  // no strict top score
      ++decided;
      if (totals[seat1] == best) ++first_mover_wins;
    } else {
      std::vector<int> rounds = sorted_rounds(run_rows);
      if (rounds.empty() || rounds.front() != 1) continue;  // round 1 excluded
      AgentId winner = round_winner(run_rows, 1);
      if (winner.empty()) continue;  // tied round 1
      ++decided;
      if (winner == seat1) ++first_mover_wins;
    }
  }
  if (decided == 0) return std::nullopt;
  return static_cast<double>(first_mover_wins) / static_cast<double>(decided);
}

void annotate_mentions(Table& table) {
  // Winners per (run, round) for the winner-mention flag.
  std::map<std::pair<std::string, int>, AgentId> winners;
  for (const auto& r : table)
    if (r.won) winners[{r.run_id, r.round}] = r.agent_id;

  for (auto& r : table) {
    if (r.vote_target.empty()) {
      r.peer_mentioned = std::nullopt;
      r.winner_mentioned = std::nullopt;
      continue;
    }
    r.peer_mentioned = contains_identifier(r.vote_justification, r.vote_target);
    auto w = winners.find({r.run_id, r.round});
    r.winner_mentioned =
        w != winners.end() && contains_identifier(r.vote_justification, w->second);
  }
}

MetricStat summarize(const std::vector<std::optional<double>>& values) {
  MetricStat stat;
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v.has_value())
      defined.push_back(*v);
    else
      ++stat.n_missing;
  }
  stat.n = static_cast<int>(defined.size());
  if (defined.empty()) return stat;
  double sum = 0.0;
  for (double v : defined) sum += v;
  stat.mean = sum / defined.size();
  if (defined.size() > 1) {
    double ss = 0.0;
    for (double v : defined) ss += (v - stat.mean) * (v - stat.mean);
    stat.sd = std::sqrt(ss / (defined.size() - 1));
  }
  return stat;
}

const std::vector<std::string>& interaction_metric_names() {
  static const std::vector<std::string> names = {
      "svr", "avr", "wr", "vv", "vp", "ri", "csr", "bs", "ed", "cc", "fmw"};
  return names;
}

const std::vector<std::string>& all_metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = interaction_metric_names();
    n.insert(n.end(), {"pm", "wm", "vm", "tc"});
    return n;
  }();
  return names;
}

namespace {

std::optional<double> mention_rate_of(const Table& run_rows, const AgentId& agent,
                                      bool winner_flag) {
  int denom = 0;
  int hits = 0;
  for (const auto& r : run_rows) {
    if (r.agent_id != agent || r.vote_target.empty()) continue;
    const auto& flag = winner_flag ? r.winner_mentioned : r.peer_mentioned;
    if (!flag.has_value()) continue;
    ++denom;
    if (*flag) ++hits;
  }
  if (denom == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(denom);
}

std::optional<double> consistency_of(const Table& run_rows, const AgentId& agent,
                                     bool match) {
  int denom = 0;
  int hits = 0;
  for (const auto& r : run_rows) {
    if (r.agent_id != agent) continue;
    if (r.rule_theme.empty() || r.vote_theme.empty()) continue;
    if (r.rule_theme == "UNKNOWN" || r.vote_theme == "UNKNOWN") continue;
    ++denom;
    bool equal = r.rule_theme == r.vote_theme;
    if (equal == match) ++hits;
  }
  if (denom == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(denom);
}

}  // namespace

std::vector<UnitMetrics> compute_unit_metrics(const Table& table,
                                              const RiOptions& ri_opts,
                                              bool fmw_final_score) {
  Table annotated = table;
  bool have_mentions = true;
  for (const auto& r : annotated)
    if (!r.vote_target.empty() && !r.peer_mentioned.has_value()) {
      have_mentions = false;
      break;
    }
  if (!have_mentions) annotate_mentions(annotated);

  std::vector<UnitMetrics> units;
  for (const Table& run_rows : group_by_run(annotated)) {
    const std::string& run_id = run_rows.front().run_id;
    Condition condition = condition_of_run(run_id);

    // Run-level graph means, shared by every agent of the run.
    std::vector<std::optional<double>> eds, ccs;
    for (int round : sorted_rounds(run_rows)) {
      VoteGraph g = vote_graph(run_rows, round);
      eds.push_back(edge_density(g));
      ccs.push_back(clustering_coefficient(g));
    }
    auto mean_of = [](const std::vector<std::optional<double>>& vals)
        -> std::optional<double> {
      double sum = 0.0;
      int n = 0;
      for (const auto& v : vals)
        if (v.has_value()) {
          sum += *v;
          ++n;
        }
      if (n == 0) return std::nullopt;
      return sum / n;
    };
    std::optional<double> run_ed = mean_of(eds);
    std::optional<double> run_cc = mean_of(ccs);

    std::optional<double> run_fmw =
        first_mover_win_rate({run_rows}, fmw_final_score);

    std::map<AgentId, std::pair<ModelId, int>> roster;  // id -> (model, seat)
    for (const auto& r : run_rows) roster[r.agent_id] = {r.model_id, r.seat};

    for (const auto& [agent_id, info] : roster) {
      UnitMetrics u;
      u.run_id = run_id;
      u.agent_id = agent_id;
      u.model_id = info.first;
      u.condition = condition;
      u.values["svr"] = self_vote_rate(run_rows, agent_id);
      u.values["avr"] = avg_votes_received(run_rows, agent_id);
      u.values["wr"] = win_rate(run_rows, agent_id);
      u.values["vv"] = vote_volatility(run_rows, agent_id);
      u.values["vp"] = vote_persistence(run_rows, agent_id);
      u.values["ri"] = reciprocity_index(run_rows, agent_id, ri_opts);
      BlocTrace trace = bloc_trace(run_rows, agent_id);
      u.values["csr"] = coalition_switch_rate(trace);
      u.values["bs"] = bloc_stability(trace);
      u.values["ed"] = run_ed;
      u.values["cc"] = run_cc;
      u.values["fmw"] = info.second == 1 ? run_fmw : std::nullopt;
      u.values["pm"] = mention_rate_of(run_rows, agent_id, false);
      u.values["wm"] = mention_rate_of(run_rows, agent_id, true);
      u.values["vm"] = consistency_of(run_rows, agent_id, true);
      u.values["tc"] = consistency_of(run_rows, agent_id, false);
      units.push_back(std::move(u));
    }
  }
  return units;
}

std::vector<MetricReport> summarize_units(const std::vector<UnitMetrics>& units,
                                          bool by_model,
                                          std::optional<Condition> filter) {
  std::map<std::string, std::vector<const UnitMetrics*>> groups;
  for (const auto& u : units) {
    if (filter.has_value() && u.condition != *filter) continue;
    groups[by_model ? u.model_id : to_string(u.condition)].push_back(&u);
  }
  std::vector<MetricReport> reports;
  for (const auto& [group, members] : groups) {
    MetricReport report;
    report.group = group;
    for (const auto& metric : all_metric_names()) {
      std::vector<std::optional<double>> values;
      for (const UnitMetrics* u : members) {
        auto it = u->values.find(metric);
        values.push_back(it == u->values.end() ? std::nullopt : it->second);
      }
      report.stats[metric] = summarize(values);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace nomiclaw
