#include <benchmark/benchmark.h>

#include "../tests/support/fixtures.hpp"
#include "nomiclaw/metrics.hpp"
#include "nomiclaw/stats/gee.hpp"
#include "nomiclaw/stats/glm.hpp"
#include "nomiclaw/stats/multivariate.hpp"
#include "nomiclaw/stats/special.hpp"
#include "nomiclaw/stats/tests.hpp"

using namespace nomiclaw;
using namespace nomiclaw::stats;

namespace {

LogitDesign reference_design() {
  Table table = nomiclaw::testing::reference_batch_table();
  std::vector<int> outcomes;
  std::vector<std::string> models;
  for (const auto& r : table) {
    outcomes.push_back(r.won ? 1 : 0);
    models.push_back(r.model_id);
  }
  return encode_logit_design(outcomes, {{"model", &models}},
                             {{"model", "deepseek-r1"}});
}

}  // namespace

static void BM_GlmLogit1200(benchmark::State& state) {
  LogitDesign design = reference_design();
  for (auto _ : state) benchmark::DoNotOptimize(glm_logit(design));
}
BENCHMARK(BM_GlmLogit1200);

static void BM_GeeLogit24Clusters(benchmark::State& state) {
  Table table = nomiclaw::testing::reference_batch_table();
  std::vector<int> outcomes;
  std::vector<std::string> models, clusters;
  for (const auto& r : table) {
    outcomes.push_back(r.won ? 1 : 0);
    models.push_back(r.model_id);
    clusters.push_back(r.run_id);
  }
  LogitDesign design = encode_logit_design(outcomes, {{"model", &models}},
                                           {{"model", "deepseek-r1"}});
  for (auto _ : state)
    benchmark::DoNotOptimize(gee_logit_exchangeable(design, clusters));
}
BENCHMARK(BM_GeeLogit24Clusters);

static void BM_BenjaminiHochberg(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> p;
  for (int i = 0; i < state.range(0); ++i) p.push_back(rng.unit());
  for (auto _ : state) benchmark::DoNotOptimize(benjamini_hochberg(p));
}
BENCHMARK(BM_BenjaminiHochberg)->Arg(45)->Arg(1000);

static void BM_ChiSquareTail(benchmark::State& state) {
  for (auto _ : state)
    for (double x = 1.0; x < 100.0; x += 1.0)
      benchmark::DoNotOptimize(chi_square_sf(x, 9.0));
}
BENCHMARK(BM_ChiSquareTail);

static void BM_WardCluster(benchmark::State& state) {
  Rng rng(11);
  Matrix pts(state.range(0), 9);
  for (std::size_t i = 0; i < pts.rows(); ++i)
    for (std::size_t j = 0; j < pts.cols(); ++j) pts(i, j) = rng.unit();
  for (auto _ : state) benchmark::DoNotOptimize(ward_cluster(pts));
}
BENCHMARK(BM_WardCluster)->Arg(10)->Arg(100);

static void BM_Pca(benchmark::State& state) {
  Rng rng(13);
  Matrix data(state.range(0), 9);
  for (std::size_t i = 0; i < data.rows(); ++i)
    for (std::size_t j = 0; j < data.cols(); ++j) data(i, j) = rng.unit();
  for (auto _ : state) benchmark::DoNotOptimize(pca(data));
}
BENCHMARK(BM_Pca)->Arg(10)->Arg(100);

static void BM_ComputeUnitMetrics(benchmark::State& state) {
  Table table = nomiclaw::testing::reference_batch_table();
  for (auto _ : state) benchmark::DoNotOptimize(compute_unit_metrics(table));
}
BENCHMARK(BM_ComputeUnitMetrics);

BENCHMARK_MAIN();
