#include "nomiclaw/stats/gee.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nomiclaw/stats/special.hpp"

namespace nomiclaw::stats {

namespace {

struct Cluster {
  std::string id;
  std::vector<std::size_t> rows;
};

std::vector<Cluster> group_clusters(const std::vector<std::string>& cluster_ids) {
  std::map<std::string, std::vector<std::size_t>> by_id;
  for (std::size_t i = 0; i < cluster_ids.size(); ++i)
    by_id[cluster_ids[i]].push_back(i);
  std::vector<Cluster> out;
  for (auto& [id, rows] : by_id) out.push_back({id, std::move(rows)});
  return out;
}

}  // namespace

GeeResult gee_logit_exchangeable(const LogitDesign& design,
                                 const std::vector<std::string>& cluster_ids) {
  const std::size_t n = design.x.rows();
  const std::size_t p = design.x.cols();
  if (cluster_ids.size() != n) throw SingularMatrix("cluster id length mismatch");
  std::vector<Cluster> clusters = group_clusters(cluster_ids);
  if (clusters.size() < 2) throw SingularMatrix("GEE needs at least 2 clusters");

  // Independence start.
  FitResult start = glm_logit(design);
  std::vector<double> beta = start.estimate;

  double alpha = 0.0;
  bool converged = false;
  int iterations = 0;
  constexpr int kMaxIter = 50;
  constexpr double kTol = 1e-10;

  std::vector<double> mu(n), var(n);
  auto refresh_mu = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t j = 0; j < p; ++j) eta += design.x(i, j) * beta[j];
      mu[i] = 1.0 / (1.0 + std::exp(-eta));
      mu[i] = std::clamp(mu[i], 1e-10, 1.0 - 1e-10);
      var[i] = mu[i] * (1.0 - mu[i]);
    }
  };

  auto estimate_alpha = [&]() -> double {
    double phi_num = 0.0;
    double cross = 0.0;
    double pair_count = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = (design.y[i] - mu[i]) / std::sqrt(var[i]);
      phi_num += e * e;
    }
    double phi = phi_num / (static_cast<double>(n) - static_cast<double>(p));
    if (phi <= 0.0) phi = 1.0;
    for (const auto& c : clusters) {
      for (std::size_t a = 0; a < c.rows.size(); ++a) {
        double ea = (design.y[c.rows[a]] - mu[c.rows[a]]) / std::sqrt(var[c.rows[a]]);
        for (std::size_t b = a + 1; b < c.rows.size(); ++b) {
          double eb = (design.y[c.rows[b]] - mu[c.rows[b]]) / std::sqrt(var[c.rows[b]]);
          cross += ea * eb;
          pair_count += 1.0;
        }
      }
    }
    if (pair_count == 0.0) return 0.0;  // singleton clusters
    double denom = pair_count - static_cast<double>(p);
    if (denom <= 0.0) denom = pair_count;
    double a = cross / (denom * phi);
    // Keep the working correlation positive definite for every cluster.
    std::size_t max_cluster = 0;
    for (const auto& c : clusters) max_cluster = std::max(max_cluster, c.rows.size());
    double lower = max_cluster > 1
                       ? -1.0 / (static_cast<double>(max_cluster) - 1.0) + 1e-6
                       : 0.0;
    return std::clamp(a, lower, 0.95);
  };

  // Per-cluster contribution using the closed-form exchangeable inverse:
  // R^-1 = (I - alpha/(1+(m-1)alpha) J) / (1-alpha).
  auto accumulate = [&](const Cluster& c, Matrix& bread, std::vector<double>& score,
                        Matrix* meat) {
    const std::size_t m = c.rows.size();
    double one_minus = 1.0 - alpha;
    double denom = 1.0 + (static_cast<double>(m) - 1.0) * alpha;
    if (std::fabs(one_minus) < 1e-10 || std::fabs(denom) < 1e-10)
      throw SingularMatrix("singular working covariance in cluster " + c.id);
    double jacobi = alpha / (one_minus * denom);

    // t_j = sum_i x_ij sqrt(v_i); s_j = sum_i x_ij (y_i - mu_i)/sqrt(v_i)
    // give the rank-one J corrections without forming m x m matrices.
    std::vector<double> t(p, 0.0), s_vec(p, 0.0);
    double resid_sum = 0.0;  // sum_i (y_i - mu_i)/sqrt(v_i)
    for (std::size_t idx : c.rows) {
      double sv = std::sqrt(var[idx]);
      double e = (design.y[idx] - mu[idx]) / sv;
      resid_sum += e;
      for (std::size_t j = 0; j < p; ++j) {
        t[j] += design.x(idx, j) * sv;
        s_vec[j] += design.x(idx, j) * sv * e;  // = x_ij (y_i - mu_i)
      }
    }

    // bread += D'V^-1 D = (X'AX)/(1-a) - jacobi * t t'
    for (std::size_t idx : c.rows) {
      for (std::size_t j = 0; j < p; ++j) {
        double xv = design.x(idx, j) * var[idx];
        if (xv == 0.0) continue;
        for (std::size_t k = 0; k < p; ++k)
          bread(j, k) += xv * design.x(idx, k) / one_minus;
      }
    }
    std::vector<double> u(p);  // D'V^-1 (y - mu) for this cluster
    for (std::size_t j = 0; j < p; ++j) {
      u[j] = s_vec[j] / one_minus - jacobi * t[j] * resid_sum;
      score[j] += u[j];
      for (std::size_t k = 0; k < p; ++k) bread(j, k) -= jacobi * t[j] * t[k];
    }
    if (meat)
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < p; ++k) (*meat)(j, k) += u[j] * u[k];
  };

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    iterations = iter;
    refresh_mu();
    alpha = estimate_alpha();

    Matrix bread(p, p);
    std::vector<double> score(p, 0.0);
    for (const auto& c : clusters) accumulate(c, bread, score, nullptr);

    std::vector<double> step = solve(bread, score);
    double max_delta = 0.0;
    bool diverged = false;
    for (std::size_t j = 0; j < p; ++j) {
      beta[j] += step[j];
      max_delta = std::max(max_delta, std::fabs(step[j]));
      if (std::fabs(beta[j]) > 30.0) diverged = true;
    }
    if (diverged) break;  // separation-style blowup: report the partial fit
    if (max_delta < kTol) {
      converged = true;
      break;
    }
  }

  // Sandwich covariance at the solution.
  refresh_mu();
  alpha = estimate_alpha();
  Matrix bread(p, p), meat(p, p);
  std::vector<double> score(p, 0.0);
  for (const auto& c : clusters) accumulate(c, bread, score, &meat);
  Matrix bread_inv = inverse(bread);
  Matrix cov = multiply(multiply(bread_inv, meat), bread_inv);

  GeeResult result;
  result.coef_names = design.coef_names;
  result.estimate = beta;
  result.alpha = alpha;
  result.n_clusters = static_cast<int>(clusters.size());
  result.converged = converged;
  result.iterations = iterations;
  for (std::size_t j = 0; j < p; ++j) {
    double se = std::sqrt(std::max(cov(j, j), 0.0));
    double z = se > 0 ? beta[j] / se : 0.0;
    result.robust_se.push_back(se);
    result.z_value.push_back(z);
    result.wald_p.push_back(normal_two_sided_p(z));
  }
  return result;
}

}  // namespace nomiclaw::stats
