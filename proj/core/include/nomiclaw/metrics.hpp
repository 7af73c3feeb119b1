#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nomiclaw/table.hpp"

namespace nomiclaw {

/// Directed vote graph of one round. Edges are (voter, target) node-index
/// pairs; self-loops are kept (they count as cast ballots).
struct VoteGraph {
  std::vector<AgentId> nodes;
  std::vector<std::pair<int, int>> edges;
};

/// Per-round winning-bloc membership of one agent: true = in the bloc
/// (won the round or voted for the winner), false = out, nullopt = not
/// defined (tied or missing round).
using BlocTrace = std::vector<std::optional<bool>>;

struct RiOptions {
  bool include_self_support = false;  // count a prior self-vote as an opportunity
  bool per_round = false;             // collapse multiple prior supporters to one opportunity
};

// Rate operations over one run. `run_rows` holds every row of a single
// run; `agent` selects the history. Empty denominators yield nullopt
// (undefined), never zero.
std::optional<double> self_vote_rate(const Table& run_rows, const AgentId& agent);
std::optional<double> avg_votes_received(const Table& run_rows, const AgentId& agent);
std::optional<double> win_rate(const Table& run_rows, const AgentId& agent);
std::optional<double> vote_volatility(const Table& run_rows, const AgentId& agent);
std::optional<double> vote_persistence(const Table& run_rows, const AgentId& agent);

/// Fraction of prior-supporter opportunities answered with a returned
/// vote: every (supporter s, round t) with s voting for the agent in
/// round t-1 is an opportunity, answered when the agent votes for s in
/// round t. Both rounds must be present (non-excluded).
std::optional<double> reciprocity_index(const Table& run_rows, const AgentId& agent,
                                        const RiOptions& opts = {});

/// Membership trace over the run's rounds in ascending order. Bloc of a
/// decided round = the winner plus everyone who voted for the winner.
BlocTrace bloc_trace(const Table& run_rows, const AgentId& agent);

/// Switches over adjacent decided-round pairs; pairs broken by a tie are
/// skipped (the denominator shrinks).
std::optional<double> coalition_switch_rate(const BlocTrace& trace);

/// From the first decided round in the bloc: fraction of the remaining
/// decided rounds spent in the bloc. Never joins -> undefined.
std::optional<double> bloc_stability(const BlocTrace& trace);

VoteGraph vote_graph(const Table& run_rows, int round);

/// Cast ballots over n(n-1) ordered pairs. Self-loops count in the
/// numerator but self-pairs are excluded from the denominator.
std::optional<double> edge_density(const VoteGraph& g);

/// Mean directed clustering over nodes (Fagiolo's total clustering:
/// all triangle orientations, self-loops dropped); nodes that cannot
/// close a triangle contribute zero. See docs/formats.md.
std::optional<double> clustering_coefficient(const VoteGraph& g);
double node_clustering(const VoteGraph& g, int node);

/// Fraction of runs whose seat-1 agent wins round 1, over runs with a
/// decided round 1. With final_score_mode, "wins" means ending the run
/// with the strictly highest final score instead.
std::optional<double> first_mover_win_rate(const std::vector<Table>& runs,
                                           bool final_score_mode = false);

/// Fills peer_mentioned / winner_mentioned for every row with a recorded
/// ballot: lexical word-boundary match of the target's identifier
/// (peer) or of the strict round winner's identifier (winner) in the vote
/// justification. Tie rounds have no winner to mention.
void annotate_mentions(Table& table);

struct MetricStat {
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n-1); 0 when n == 1
  int n = 0;
  int n_missing = 0;
};

MetricStat summarize(const std::vector<std::optional<double>>& values);

/// Per-(run, agent) metric values feeding grouped reports.
struct UnitMetrics {
  std::string run_id;
  AgentId agent_id;
  ModelId model_id;
  Condition condition = Condition::heterogeneous;
  std::map<std::string, std::optional<double>> values;
};

/// Names of the eleven per-unit interaction metrics, report order.
const std::vector<std::string>& interaction_metric_names();
/// The above plus mention and consistency rates (pm, wm, vm, tc).
const std::vector<std::string>& all_metric_names();

/// Computes every per-unit metric for every (run, agent). Graph metrics
/// (ed, cc) attach the run-level mean to each of the run's agents; fmw
/// attaches only to the seat-1 agent of a decided-round-1 run. pm/wm use
/// the stored mention flags (annotate_mentions runs first if they are
/// absent); vm/tc need both rule and vote themes annotated.
std::vector<UnitMetrics> compute_unit_metrics(const Table& table,
                                              const RiOptions& ri_opts = {},
                                              bool fmw_final_score = false);

struct MetricReport {
  std::string group;  // model id, condition name, ...
  std::map<std::string, MetricStat> stats;
};

/// Groups units by model_id (or by condition when by_model is false),
/// optionally filtered to one condition first.
std::vector<MetricReport> summarize_units(const std::vector<UnitMetrics>& units,
                                          bool by_model = true,
                                          std::optional<Condition> filter = std::nullopt);

}  // namespace nomiclaw
