#include "nomiclaw/stats/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace nomiclaw::stats {

PcaResult pca(const Matrix& data) {
  const std::size_t n = data.rows();
  const std::size_t k = data.cols();
  if (n < 2) throw SingularMatrix("PCA needs at least 2 units");

  PcaResult out;
  out.column_mean.assign(k, 0.0);
  out.column_sd.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += data(r, c);
    double mean = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double d = data(r, c) - mean;
      ss += d * d;
    }
    double sd = std::sqrt(ss / (n - 1));
    out.column_mean[c] = mean;
    out.column_sd[c] = sd;
    if (sd > 0.0)
      out.used_columns.push_back(static_cast<int>(c));
    else
      out.dropped_columns.push_back(static_cast<int>(c));
  }
  const std::size_t kk = out.used_columns.size();
  if (kk < 2) throw SingularMatrix("PCA needs at least 2 non-constant columns");

  Matrix z(n, kk);
  for (std::size_t j = 0; j < kk; ++j) {
    int c = out.used_columns[j];
    for (std::size_t r = 0; r < n; ++r)
      z(r, j) = (data(r, c) - out.column_mean[c]) / out.column_sd[c];
  }

  Matrix corr(kk, kk);
  for (std::size_t a = 0; a < kk; ++a)
    for (std::size_t b = a; b < kk; ++b) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += z(r, a) * z(r, b);
      corr(a, b) = corr(b, a) = dot / (n - 1);
    }

  EigenSym eig = eigen_symmetric(corr);
  out.eigenvalues = eig.values;
  for (double& v : out.eigenvalues) v = std::max(v, 0.0);
  double total = std::accumulate(out.eigenvalues.begin(), out.eigenvalues.end(), 0.0);
  for (double v : out.eigenvalues)
    out.variance_fraction.push_back(total > 0 ? v / total : 0.0);

  // Sign convention: the largest-magnitude loading of each component
  // points positive.
  out.loadings = eig.vectors;
  for (std::size_t j = 0; j < kk; ++j) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < kk; ++i) {
      if (std::fabs(out.loadings(i, j)) > best) {
        best = std::fabs(out.loadings(i, j));
        arg = i;
      }
    }
    if (out.loadings(arg, j) < 0.0)
      for (std::size_t i = 0; i < kk; ++i) out.loadings(i, j) = -out.loadings(i, j);
  }

  out.scores = multiply(z, out.loadings);
  return out;
}

namespace {

double squared_distance(const Matrix& points, int a, int b) {
  double d = 0.0;
  for (std::size_t c = 0; c < points.cols(); ++c) {
    double diff = points(a, c) - points(b, c);
    d += diff * diff;
  }
  return d;
}

}  // namespace

ClusterTree ward_cluster(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) throw SingularMatrix("clustering needs at least 2 units");

  ClusterTree tree;
  tree.n_leaves = n;

  // active cluster ids in creation order; d2 holds Lance-Williams
  // (squared-Euclidean) inter-cluster distances, which for Ward equal
  // twice the merge cost.
  std::vector<int> ids;
  std::vector<int> sizes;
  std::map<std::pair<int, int>, double> d2;
  for (int i = 0; i < n; ++i) {
    ids.push_back(i);
    sizes.push_back(1);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d2[{i, j}] = squared_distance(points, i, j);

  auto dist_of = [&](int a, int b) {
    return d2.at({std::min(a, b), std::max(a, b)});
  };

  int next_id = n;
  while (ids.size() > 1) {
    // Smallest merge cost; ties break to the smallest (i, j) id pair.
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (std::size_t x = 0; x < ids.size(); ++x) {
      for (std::size_t y = x + 1; y < ids.size(); ++y) {
        int a = std::min(ids[x], ids[y]);
        int b = std::max(ids[x], ids[y]);
        double d = dist_of(a, b);
        if (d < best || (d == best && std::make_pair(a, b) < std::make_pair(bi, bj))) {
          best = d;
          bi = a;
          bj = b;
        }
      }
    }

    auto size_of = [&](int id) { return sizes[id]; };

    Merge merge;
    merge.left = bi;
    merge.right = bj;
    merge.height = best / 2.0;  // Ward objective increase
    merge.size = size_of(bi) + size_of(bj);
    tree.merges.push_back(merge);

    // Lance-Williams update for the new cluster against every survivor.
    int ni = size_of(bi), nj = size_of(bj);
    for (int id : ids) {
      if (id == bi || id == bj) continue;
      int nk = size_of(id);
      double dik = dist_of(bi, id);
      double djk = dist_of(bj, id);
      double dij = best;
      double updated = ((ni + nk) * dik + (nj + nk) * djk - nk * dij) /
                       static_cast<double>(ni + nj + nk);
      d2[{std::min(id, next_id), std::max(id, next_id)}] = updated;
    }

    ids.erase(std::remove(ids.begin(), ids.end(), bi), ids.end());
    ids.erase(std::remove(ids.begin(), ids.end(), bj), ids.end());
    ids.push_back(next_id);
    sizes.push_back(merge.size);
    ++next_id;
  }
  return tree;
}

std::vector<int> cut(const ClusterTree& tree, int k) {
  const int n = tree.n_leaves;
  if (k < 1 || k > n) throw SingularMatrix("cut needs 1 <= k <= n");

  // Union-find over leaf + merge ids; apply the first n-k merges.
  std::vector<int> parent(n + tree.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int m = 0; m < n - k; ++m) {
    const Merge& merge = tree.merges[m];
    int cluster_id = n + m;
    parent[find(merge.left)] = cluster_id;
    parent[find(merge.right)] = cluster_id;
  }

  // Number groups 0..k-1 by their lowest member index.
  std::vector<int> labels(n, -1);
  std::map<int, int> group_label;
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    if (!group_label.count(root))
      group_label[root] = static_cast<int>(group_label.size());
    labels[i] = group_label[root];
  }
  return labels;
}

}  // namespace nomiclaw::stats
