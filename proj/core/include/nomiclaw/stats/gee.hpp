#pragma once

#include <string>
#include <vector>

#include "nomiclaw/stats/glm.hpp"

namespace nomiclaw::stats {

struct GeeResult {
  std::vector<std::string> coef_names;
  std::vector<double> estimate;
  std::vector<double> robust_se;  // sandwich
  std::vector<double> z_value;
  std::vector<double> wald_p;
  double alpha = 0.0;  // working exchangeable correlation
  int n_clusters = 0;
  bool converged = false;
  int iterations = 0;
};

/// GEE-1 logistic fit under an exchangeable working correlation:
/// Fisher scoring on the working estimating equations, a moment estimate
/// of alpha from standardized residual cross-products each step, and a
/// robust sandwich covariance at the solution. With singleton clusters
/// there are no residual pairs, alpha stays 0, and the estimates reduce
/// to glm_logit. Throws SingularMatrix naming the cluster whose working
/// covariance degenerates.
GeeResult gee_logit_exchangeable(const LogitDesign& design,
                                 const std::vector<std::string>& cluster_ids);

}  // namespace nomiclaw::stats
