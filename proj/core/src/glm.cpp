#include "nomiclaw/stats/glm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nomiclaw/stats/special.hpp"

namespace nomiclaw::stats {

LogitDesign encode_logit_design(
    const std::vector<int>& outcomes,
    const std::vector<std::pair<std::string, const std::vector<std::string>*>>& factors,
    const std::map<std::string, std::string>& reference_levels) {
  const std::size_t n = outcomes.size();
  if (n == 0) throw SingularMatrix("empty outcome vector");

  struct Encoded {
    std::string factor;
    std::vector<std::string> levels;  // non-reference, alphabetical
    const std::vector<std::string>* values;
  };
  std::vector<Encoded> encoded;
  std::size_t p = 1;
  for (const auto& [name, values] : factors) {
    if (values->size() != n)
      throw SingularMatrix("factor " + name + " length mismatch");
    std::set<std::string> level_set(values->begin(), values->end());
    auto ref_it = reference_levels.find(name);
    std::string ref = ref_it != reference_levels.end() ? ref_it->second
                                                       : *level_set.begin();
    if (!level_set.count(ref))
      throw SingularMatrix("reference level '" + ref + "' absent from factor " + name);
    Encoded enc;
    enc.factor = name;
    enc.values = values;
    for (const auto& level : level_set)
      if (level != ref) enc.levels.push_back(level);
    p += enc.levels.size();
    encoded.push_back(std::move(enc));
  }

  LogitDesign design;
  design.y = outcomes;
  design.coef_names.push_back("(Intercept)");
  design.x = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) design.x(i, 0) = 1.0;

  std::size_t col = 1;
  for (const auto& enc : encoded) {
    for (const auto& level : enc.levels) {
      design.coef_names.push_back(enc.factor + ":" + level);
      for (std::size_t i = 0; i < n; ++i)
        if ((*enc.values)[i] == level) design.x(i, col) = 1.0;
      ++col;
    }
  }
  return design;
}

FitResult glm_logit(const LogitDesign& design) {
  const std::size_t n = design.x.rows();
  const std::size_t p = design.x.cols();
  if (design.y.size() != n) throw SingularMatrix("outcome length mismatch");

  std::vector<double> beta(p, 0.0);
  bool converged = false;
  int iterations = 0;
  constexpr int kMaxIter = 50;
  constexpr double kTol = 1e-8;
  constexpr double kDivergence = 30.0;  // |log-odds| beyond any sane fit

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    iterations = iter;
    // Weighted normal equations X'WX delta-step via working response.
    Matrix xtwx(p, p);
    std::vector<double> xtwz(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < p; ++j) eta += design.x(i, j) * beta[j];
      double mu = 1.0 / (1.0 + std::exp(-eta));
      mu = std::clamp(mu, 1e-10, 1.0 - 1e-10);
      double w = mu * (1.0 - mu);
      double z = eta + (design.y[i] - mu) / w;
      for (std::size_t j = 0; j < p; ++j) {
        double xw = design.x(i, j) * w;
        if (xw == 0.0) continue;
        for (std::size_t k = j; k < p; ++k) xtwx(j, k) += xw * design.x(i, k);
        xtwz[j] += xw * z;
      }
    }
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < j; ++k) xtwx(j, k) = xtwx(k, j);

    std::vector<double> next = solve(xtwx, xtwz);
    double max_delta = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      max_delta = std::max(max_delta, std::fabs(next[j] - beta[j]));
    beta = std::move(next);

    bool diverged = false;
    for (double b : beta)
      if (std::fabs(b) > kDivergence) diverged = true;
    if (diverged) break;  // separation: report the partial fit
    if (max_delta < kTol) {
      converged = true;
      break;
    }
  }

  // Information matrix at the final coefficients.
  Matrix info(p, p);
  double deviance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j) eta += design.x(i, j) * beta[j];
    double mu = 1.0 / (1.0 + std::exp(-eta));
    mu = std::clamp(mu, 1e-12, 1.0 - 1e-12);
    double w = mu * (1.0 - mu);
    for (std::size_t j = 0; j < p; ++j) {
      double xw = design.x(i, j) * w;
      if (xw == 0.0) continue;
      for (std::size_t k = j; k < p; ++k) info(j, k) += xw * design.x(i, k);
    }
    deviance += design.y[i] == 1 ? -2.0 * std::log(mu) : -2.0 * std::log(1.0 - mu);
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) info(j, k) = info(k, j);
  Matrix cov = inverse(info);

  FitResult fit;
  fit.coef_names = design.coef_names;
  fit.converged = converged;
  fit.iterations = iterations;
  fit.deviance = deviance;
  fit.residual_df = static_cast<int>(n - p);
  fit.dispersion_ratio = fit.residual_df > 0 ? deviance / fit.residual_df : 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double se = std::sqrt(std::max(cov(j, j), 0.0));
    double z = se > 0 ? beta[j] / se : 0.0;
    fit.estimate.push_back(beta[j]);
    fit.std_error.push_back(se);
    fit.z_value.push_back(z);
    fit.p_value.push_back(normal_two_sided_p(z));
    fit.odds_ratio.push_back(std::exp(beta[j]));
    fit.ci_low.push_back(std::exp(beta[j] - 1.96 * se));
    fit.ci_high.push_back(std::exp(beta[j] + 1.96 * se));
  }
  return fit;
}

}  // namespace nomiclaw::stats
