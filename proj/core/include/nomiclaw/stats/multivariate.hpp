#pragma once

#include <string>
#include <vector>

#include "nomiclaw/stats/linalg.hpp"

namespace nomiclaw::stats {

struct PcaResult {
  std::vector<int> used_columns;     // indices into the input matrix
  std::vector<int> dropped_columns;  // zero-variance columns
  std::vector<double> eigenvalues;   // descending
  std::vector<double> variance_fraction;
  Matrix loadings;  // used_cols x components, column per component
  Matrix scores;    // units x components
  std::vector<double> column_mean;
  std::vector<double> column_sd;  // sample SD
};

/// PCA of the correlation matrix: columns are z-scored (zero-variance
/// columns dropped), the correlation matrix eigendecomposed, and each
/// component's sign fixed so its largest-magnitude loading is positive.
/// Requires at least 2 units and 2 surviving columns.
PcaResult pca(const Matrix& data);

struct Merge {
  int left = 0;   // cluster ids: leaves 0..n-1, merge k creates id n+k
  int right = 0;
  double height = 0.0;  // increase in within-cluster sum of squares
  int size = 0;         // members of the merged cluster
};

struct ClusterTree {
  int n_leaves = 0;
  std::vector<Merge> merges;  // n_leaves - 1 entries, heights non-decreasing
};

/// Agglomerative minimum-variance (Ward) clustering via the
/// Lance-Williams update on squared Euclidean distances. Heights are the
/// Ward objective increase (half the Lance-Williams distance at merge
/// time); ties break toward the lexicographically smallest cluster-id
/// pair.
ClusterTree ward_cluster(const Matrix& points);

/// Labels for k clusters: apply the first n-k merges, then number the
/// resulting groups 0..k-1 by their lowest member index.
std::vector<int> cut(const ClusterTree& tree, int k);

}  // namespace nomiclaw::stats
