#include <benchmark/benchmark.h>

#include "../tests/support/fixtures.hpp"
#include "nomiclaw/ledger.hpp"

using namespace nomiclaw;
using namespace nomiclaw::testing;

static void BM_Tally(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<AgentId> roster;
  std::vector<Ballot> ballots;
  for (int i = 0; i < n; ++i) {
    roster.push_back("agent_" + std::to_string(i));
    Ballot b;
    b.round = 1;
    b.voter = roster.back();
    b.target = roster[i / 2];
    ballots.push_back(std::move(b));
  }
  for (auto _ : state) benchmark::DoNotOptimize(tally(ballots, roster));
}
BENCHMARK(BM_Tally)->Arg(5)->Arg(10)->Arg(50);

static void BM_RunGame(benchmark::State& state) {
  FixtureSpec spec;
  spec.num_agents = static_cast<int>(state.range(0));
  spec.num_rounds = 5;
  spec.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(play_fixture(spec));
}
BENCHMARK(BM_RunGame)->Arg(5)->Arg(10);

static void BM_ExportRows(benchmark::State& state) {
  std::vector<RunLog> logs;
  for (int i = 1; i <= 24; ++i) {
    FixtureSpec spec;
    spec.num_agents = 10;
    spec.seed = i;
    spec.run_index = i;
    logs.push_back(play_fixture(spec));
  }
  for (auto _ : state) benchmark::DoNotOptimize(export_rows(logs));
}
BENCHMARK(BM_ExportRows);

static void BM_RunLogJsonRoundTrip(benchmark::State& state) {
  FixtureSpec spec;
  spec.num_agents = 10;
  spec.seed = 3;
  RunLog log = play_fixture(spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_log_from_json(run_log_to_json(log)));
}
BENCHMARK(BM_RunLogJsonRoundTrip);

BENCHMARK_MAIN();
