#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nomiclaw/common.hpp"

namespace nomiclaw::stats {

/// Degenerate input for a test statistic (zero expected cell, pooled
/// proportion 0 or 1, undefined kappa).
struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::optional<double> adjusted_p;
  std::string label;
};

/// Pearson goodness-of-fit: statistic = sum (O-E)^2 / E with E_i =
/// p_i * N, df = k-1, upper-tail chi-square p. Expected proportions must
/// be positive and sum to 1.
TestResult chi_square_gof(const std::vector<double>& observed,
                          const std::vector<double>& expected_props);

/// Pooled two-proportion z test, two-sided. Throws DegenerateInput when
/// the pooled proportion is 0 or 1.
TestResult two_prop_z(int w1, int n1, int w2, int n2);

/// Benjamini-Hochberg step-up adjustment: p * m / rank with running-min
/// monotonization, capped at 1, returned in the input order. Idempotent;
/// rank ties resolved by stable sort.
std::vector<double> benjamini_hochberg(const std::vector<double>& p_values);

struct KappaResult {
  double p_o = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
  int n = 0;
};

/// Unweighted Cohen's kappa over two equal-length label vectors. Throws
/// DegenerateInput when expected agreement is 1 (kappa undefined).
KappaResult cohens_kappa(const std::vector<std::string>& labels_a,
                         const std::vector<std::string>& labels_b);

struct ThemeOddsRatio {
  std::string theme;
  double p_a = 0.0;       // frequency at stage A
  double p_b = 0.0;       // frequency at stage B
  double odds_ratio = 0;  // +inf when the theme appears only at stage B
  bool defined = true;    // false when absent at both stages
};

/// Stage-marginal persistence odds ratios: odds_B(theme) / odds_A(theme)
/// with odds(p) = p/(1-p), frequencies over non-UNKNOWN labels per stage.
/// conditional=true switches to the paired 2x2 cross-product ratio
/// (n11*n00)/(n10*n01) over records labeled at both stages.
std::vector<ThemeOddsRatio> theme_persistence_or(
    const std::vector<std::string>& stage_a_labels,
    const std::vector<std::string>& stage_b_labels, bool conditional = false);

}  // namespace nomiclaw::stats
