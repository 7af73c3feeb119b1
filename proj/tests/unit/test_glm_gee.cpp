#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "nomiclaw/common.hpp"
#include "nomiclaw/stats/gee.hpp"
#include "nomiclaw/stats/glm.hpp"

using namespace nomiclaw;
using namespace nomiclaw::stats;
using nomiclaw::Table;

namespace {

const std::map<std::string, int> kReferenceWins = {
    {"deepseek-r1", 21}, {"llama2", 16},      {"phi4-reasoning", 13},
    {"granite3.3", 12},  {"phi4-mini-reasoning", 12}, {"phi4", 8},
    {"gemma2", 4},       {"qwen3", 2},        {"gemma3", 1},
    {"llama3", 1}};

/// 120 Bernoulli outcomes per model shaped after the win-count table.
LogitDesign reference_design(const std::string& ref) {
  std::vector<int> outcomes;
  std::vector<std::string> models;
  for (const auto& [model, wins] : kReferenceWins) {
    for (int i = 0; i < 120; ++i) {
      outcomes.push_back(i < wins ? 1 : 0);
      models.push_back(model);
    }
  }
  return encode_logit_design(outcomes, {{"model", &models}}, {{"model", ref}});
}

int coef_index(const FitResult& fit, const std::string& name) {
  for (std::size_t i = 0; i < fit.coef_names.size(); ++i)
    if (fit.coef_names[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("IRLS matches the closed form for one categorical factor") {
  FitResult fit = glm_logit(reference_design("deepseek-r1"));
  REQUIRE(fit.converged);

  double lref = std::log(21.0 / 99.0);
  for (const auto& [model, wins] : kReferenceWins) {
    if (model == "deepseek-r1") continue;
    int i = coef_index(fit, "model:" + model);
    REQUIRE(i >= 0);
    double closed = std::log(static_cast<double>(wins) / (120.0 - wins)) - lref;
    CHECK(fit.estimate[i] == doctest::Approx(closed).epsilon(1e-6));
  }
  int intercept = coef_index(fit, "(Intercept)");
  CHECK(fit.estimate[intercept] == doctest::Approx(lref).epsilon(1e-6));
}

TEST_CASE("GLM reproduces the win-probability table") {
  FitResult fit = glm_logit(reference_design("deepseek-r1"));
  REQUIRE(fit.converged);

  struct Row {
    const char* model;
    double est, se, orr, lo, hi;
  };
  const Row rows[] = {
      {"gemma2", -1.82, 0.56, 0.16, 0.05, 0.49},
      {"gemma3", -3.23, 1.03, 0.04, 0.01, 0.30},
      {"granite3.3", -0.65, 0.39, 0.52, 0.25, 1.12},
      {"llama2", -0.32, 0.36, 0.73, 0.36, 1.47},
      {"llama3", -3.23, 1.03, 0.04, 0.01, 0.30},
      {"phi4", -1.09, 0.44, 0.34, 0.14, 0.79},
      {"phi4-mini-reasoning", -0.65, 0.39, 0.52, 0.25, 1.12},
      {"phi4-reasoning", -0.56, 0.38, 0.57, 0.27, 1.21},
      {"qwen3", -2.53, 0.75, 0.08, 0.02, 0.35},
  };
  for (const auto& row : rows) {
    int i = coef_index(fit, std::string("model:") + row.model);
    REQUIRE(i >= 0);
    CHECK(std::fabs(fit.estimate[i] - row.est) < 0.01);
    CHECK(std::fabs(fit.std_error[i] - row.se) < 0.01);
    CHECK(std::fabs(fit.odds_ratio[i] - row.orr) < 0.01);
    CHECK(std::fabs(fit.ci_low[i] - row.lo) < 0.01);
    CHECK(std::fabs(fit.ci_high[i] - row.hi) < 0.01);
    CHECK(fit.odds_ratio[i] == doctest::Approx(std::exp(fit.estimate[i])));
  }
  // Residual deviance over df ~ 0.49: no overdispersion in this design.
  CHECK(fit.dispersion_ratio == doctest::Approx(0.49).epsilon(0.01));
  CHECK(fit.residual_df == 1200 - 10);
}

TEST_CASE("intercept-only fit on balanced outcomes is zero") {
  std::vector<int> outcomes;
  for (int i = 0; i < 100; ++i) outcomes.push_back(i % 2);
  LogitDesign design = encode_logit_design(outcomes, {}, {});
  FitResult fit = glm_logit(design);
  REQUIRE(fit.converged);
  CHECK(fit.estimate[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("separation is reported as non-convergence with a partial fit") {
  // Outcome perfectly determined by the factor level.
  std::vector<int> outcomes;
  std::vector<std::string> group;
  for (int i = 0; i < 40; ++i) {
    outcomes.push_back(i < 20 ? 1 : 0);
    group.push_back(i < 20 ? "hi" : "lo");
  }
  LogitDesign design = encode_logit_design(outcomes, {{"g", &group}}, {});
  FitResult fit = glm_logit(design);
  CHECK_FALSE(fit.converged);
  CHECK(fit.estimate.size() == 2);  // partial result still reported
}

TEST_CASE("encode_logit_design validates its inputs") {
  std::vector<int> outcomes = {1, 0};
  std::vector<std::string> factor = {"a", "b"};
  CHECK_THROWS_AS(
      encode_logit_design(outcomes, {{"f", &factor}}, {{"f", "missing-level"}}),
      SingularMatrix);
  std::vector<std::string> short_factor = {"a"};
  CHECK_THROWS_AS(encode_logit_design(outcomes, {{"f", &short_factor}}, {}),
                  SingularMatrix);
}

TEST_CASE("GEE with singleton clusters matches the GLM to 1e-6") {
  LogitDesign design = reference_design("deepseek-r1");
  std::vector<std::string> clusters;
  for (std::size_t i = 0; i < design.y.size(); ++i)
    clusters.push_back("c" + std::to_string(i));
  GeeResult gee = gee_logit_exchangeable(design, clusters);
  FitResult glm = glm_logit(design);
  REQUIRE(gee.converged);
  CHECK(gee.alpha == 0.0);
  for (std::size_t i = 0; i < glm.estimate.size(); ++i)
    CHECK(gee.estimate[i] == doctest::Approx(glm.estimate[i]).epsilon(1e-6));
}

TEST_CASE("GEE recovers an injected exchangeable correlation") {
  // Cluster-common mixing: Y = Z (cluster draw) with prob rho, else an
  // independent draw; pairwise correlation is rho^2.
  const double target_alpha = 0.3;
  const double rho = std::sqrt(target_alpha);
  const double p = 0.4;
  const int clusters_n = 200, cluster_size = 5;

  Rng rng(20240817);
  std::vector<int> outcomes;
  std::vector<std::string> cluster_ids;
  for (int c = 0; c < clusters_n; ++c) {
    int z = rng.chance(p) ? 1 : 0;
    for (int i = 0; i < cluster_size; ++i) {
      int w = rng.chance(p) ? 1 : 0;
      outcomes.push_back(rng.chance(rho) ? z : w);
      cluster_ids.push_back("c" + std::to_string(c));
    }
  }
  LogitDesign design = encode_logit_design(outcomes, {}, {});
  GeeResult gee = gee_logit_exchangeable(design, cluster_ids);
  REQUIRE(gee.converged);
  CHECK(gee.n_clusters == clusters_n);
  CHECK(std::fabs(gee.alpha - target_alpha) < 0.1);
}

TEST_CASE("GEE on the reconstructed batch: null vignette effects, tiny alpha") {
  // Clustering on run with model + vignette covariates over the
  // reconstructed table: the vignette coefficients stay null (all Wald
  // p > 0.33) and the intra-cluster correlation is effectively zero.
  Table table = nomiclaw::testing::reference_batch_table();
  std::vector<int> outcomes;
  std::vector<std::string> models, vignettes, clusters;
  for (const auto& r : table) {
    outcomes.push_back(r.won ? 1 : 0);
    models.push_back(r.model_id);
    vignettes.push_back(r.vignette_id);
    clusters.push_back(r.run_id);
  }
  LogitDesign design =
      encode_logit_design(outcomes, {{"model", &models}, {"vignette", &vignettes}},
                          {{"model", "deepseek-r1"}});
  GeeResult gee = gee_logit_exchangeable(design, clusters);
  REQUIRE(gee.converged);
  CHECK(gee.n_clusters == 24);
  CHECK(std::fabs(gee.alpha) < 0.05);
  for (std::size_t i = 0; i < gee.coef_names.size(); ++i) {
    if (gee.coef_names[i].rfind("vignette:", 0) == 0) CHECK(gee.wald_p[i] > 0.33);
    CHECK(gee.robust_se[i] >= 0.0);
    CHECK(gee.wald_p[i] >= 0.0);
    CHECK(gee.wald_p[i] <= 1.0);
  }
}

TEST_CASE("GEE robust SEs approach model SEs with many independent singletons") {
  // Independence + singleton clusters: the sandwich collapses toward the
  // model-based covariance (checked within a 15% band).
  Rng rng(7);
  std::vector<int> outcomes;
  std::vector<std::string> x_level, clusters;
  for (int i = 0; i < 4000; ++i) {
    bool treated = i % 2 == 0;
    double pr = treated ? 0.55 : 0.4;
    outcomes.push_back(rng.chance(pr) ? 1 : 0);
    x_level.push_back(treated ? "t" : "c");
    clusters.push_back("i" + std::to_string(i));
  }
  LogitDesign design = encode_logit_design(outcomes, {{"x", &x_level}}, {});
  GeeResult gee = gee_logit_exchangeable(design, clusters);
  FitResult glm = glm_logit(design);
  REQUIRE(gee.converged);
  for (std::size_t i = 0; i < glm.std_error.size(); ++i) {
    double ratio = gee.robust_se[i] / glm.std_error[i];
    CHECK(ratio > 0.85);
    CHECK(ratio < 1.15);
  }
}

TEST_CASE("fewer than two clusters is an error") {
  std::vector<int> outcomes = {1, 0, 1, 0};
  LogitDesign design = encode_logit_design(outcomes, {}, {});
  std::vector<std::string> one_cluster(4, "c0");
  CHECK_THROWS_AS(gee_logit_exchangeable(design, one_cluster), SingularMatrix);
}
