#pragma once

#include <map>
#include <string>
#include <vector>

#include "nomiclaw/stats/linalg.hpp"

namespace nomiclaw::stats {

/// Design matrix with named coefficients and a binary outcome vector.
struct LogitDesign {
  std::vector<std::string> coef_names;  // "(Intercept)" first
  Matrix x;                             // n x p
  std::vector<int> y;                   // 0/1
};

/// Reference-level dummy coding: an intercept plus one column per
/// non-reference level of each factor, factors in the given order,
/// levels alphabetical. Coefficients are named "<factor>:<level>".
LogitDesign encode_logit_design(
    const std::vector<int>& outcomes,
    const std::vector<std::pair<std::string, const std::vector<std::string>*>>& factors,
    const std::map<std::string, std::string>& reference_levels);

struct FitResult {
  std::vector<std::string> coef_names;
  std::vector<double> estimate;    // log-odds
  std::vector<double> std_error;   // Wald, from the inverse information
  std::vector<double> z_value;
  std::vector<double> p_value;     // two-sided normal
  std::vector<double> odds_ratio;  // exp(estimate)
  std::vector<double> ci_low;      // exp(estimate - 1.96 SE)
  std::vector<double> ci_high;     // exp(estimate + 1.96 SE)
  double deviance = 0.0;
  int residual_df = 0;
  double dispersion_ratio = 0.0;  // deviance / residual_df
  bool converged = false;
  int iterations = 0;
};

/// Logistic regression by iteratively reweighted least squares.
/// Convergence: max |delta coef| < 1e-8 within 50 iterations. Separation
/// (diverging coefficients) comes back as converged=false with the
/// partial fit.
FitResult glm_logit(const LogitDesign& design);

}  // namespace nomiclaw::stats
