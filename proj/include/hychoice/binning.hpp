#pragma once

#include <cstdint>
#include <vector>

namespace hychoice {

struct ClusterResult {
  std::vector<double> centroids;   // ascending
  std::vector<double> boundaries;  // midpoints between adjacent centroids, size k-1
  std::vector<int> assignments;    // per input point; nearest centroid, ties to lower index
  double wcss = 0.0;
};

// Globally optimal 1-D k-means: a dynamic program over contiguous partitions
// of the sorted sample (the 1-D optimum is contiguous), then Lloyd iterations
// from the optimal centroids to an assignment fixpoint. Exact and fully
// deterministic, so the seed is accepted for interface stability but unused.
ClusterResult kmeans_1d(const std::vector<double>& values, int k, std::uint64_t seed);

struct ElbowResult {
  int k = 1;
  std::vector<double> wcss_curve;  // wcss_curve[i] is wcss at k = i+1
  bool truncated = false;          // fewer distinct values than k_max
};

// Largest second difference of the log-wcss curve over interior k; the log
// scale reads drops as ratios, which keeps wcss(1)'s bulk from pinning the
// pick at k = 2. A curve that reaches zero selects the first such k (constant
// data thus k = 1); curves with fewer than 3 points select k = 1.
ElbowResult elbow_select(const std::vector<double>& values, int k_max, std::uint64_t seed);

// Label values by cluster: value <= boundaries[i] puts it in cluster i.
std::vector<int> bin_by_clusters(const std::vector<double>& values,
                                 const std::vector<double>& boundaries);

}  // namespace hychoice
