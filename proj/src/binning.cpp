#include "hychoice/binning.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <vector>

#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

// Prefix-sum segment costs over the sorted, mean-centred sample. Centring
// keeps q - s^2/len from cancelling when the data sit far from zero.
struct SegmentCost {
  std::vector<double> sum1, sum2;

  explicit SegmentCost(const std::vector<double>& x)
      : sum1(x.size() + 1, 0.0), sum2(x.size() + 1, 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum1[i + 1] = sum1[i] + x[i];
      sum2[i + 1] = sum2[i] + x[i] * x[i];
    }
  }

  // Sum of squared deviations from the segment mean over sorted[j..i), j < i.
  double operator()(std::size_t j, std::size_t i) const {
    const double s = sum1[i] - sum1[j];
    const double q = sum2[i] - sum2[j];
    return std::max(0.0, q - s * s / static_cast<double>(i - j));
  }
};

// One dynamic-programming layer: best[i] = min_j prev[j] + cost(j, i). The
// minimizer is nondecreasing in i (segment cost is concave-Monge), so the
// layer fills in O(n log n) by divide and conquer on the argmin.
void dp_layer(const SegmentCost& cost, const std::vector<double>& prev,
              std::size_t segments, std::size_t n, std::vector<double>& best,
              std::vector<std::size_t>& arg) {
  auto solve = [&](auto&& self, std::size_t ilo, std::size_t ihi,
                   std::size_t jlo, std::size_t jhi) -> void {
    const std::size_t i = ilo + (ihi - ilo) / 2;
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t best_j = jlo;
    const std::size_t j_top = std::min(jhi, i - 1);
    for (std::size_t j = std::max(jlo, segments - 1); j <= j_top; ++j) {
      const double value = prev[j] + cost(j, i);
      if (value < best_value) {  // strict: ties keep the leftmost split
        best_value = value;
        best_j = j;
      }
    }
    best[i] = best_value;
    arg[i] = best_j;
    if (i > ilo) self(self, ilo, i - 1, jlo, best_j);
    if (i < ihi) self(self, i + 1, ihi, best_j, jhi);
  };
  solve(solve, segments, n, segments - 1, n - 1);
}

struct Lloyd {
  const std::vector<double>& x;  // sorted
  int k;

  ClusterResult run(std::vector<double> centroids) const {
    const std::size_t n = x.size();
    std::sort(centroids.begin(), centroids.end());
    std::vector<int> assign(n, 0), prev(n, -1);
    for (int iter = 0; iter < 1000 && assign != prev; ++iter) {
      prev = assign;
      for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double bestd = std::abs(x[i] - centroids[0]);
        for (int c = 1; c < k; ++c) {
          const double d = std::abs(x[i] - centroids[c]);
          if (d < bestd) {  // strict: ties stay with the lower index
            bestd = d;
            best = c;
          }
        }
        assign[i] = best;
      }
      std::vector<double> sum(k, 0.0);
      std::vector<int> count(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        sum[assign[i]] += x[i];
        ++count[assign[i]];
      }
      for (int c = 0; c < k; ++c) {
        if (count[c] == 0) {
          // Reseed an emptied cluster at the point farthest from its centroid.
          std::size_t far = 0;
          double fard = -1.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double d = std::abs(x[i] - centroids[assign[i]]);
            if (d > fard) {
              fard = d;
              far = i;
            }
          }
          centroids[c] = x[far];
        } else {
          centroids[c] = sum[c] / count[c];
        }
      }
      std::sort(centroids.begin(), centroids.end());
    }
    ClusterResult res;
    res.centroids = centroids;
    res.assignments = assign;
    res.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - centroids[assign[i]];
      res.wcss += d * d;
    }
    for (int c = 0; c + 1 < k; ++c)
      res.boundaries.push_back(0.5 * (centroids[c] + centroids[c + 1]));
    return res;
  }
};

}  // namespace

ClusterResult kmeans_1d(const std::vector<double>& values, int k, std::uint64_t) {
  if (values.empty()) throw DomainError("kmeans_1d: empty input");
  if (k < 1) throw DomainError("kmeans_1d: k must be at least 1");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t distinct =
      std::set<double>(sorted.begin(), sorted.end()).size();
  if (static_cast<std::size_t>(k) > distinct)
    throw DomainError("kmeans_1d: k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(distinct) + " distinct values");

  // Global optimum over contiguous partitions of the sorted sample (the 1-D
  // k-means optimum is contiguous in sorted order).
  double center = 0.0;
  for (double v : sorted) center += v;
  center /= static_cast<double>(n);
  std::vector<double> shifted(n);
  for (std::size_t i = 0; i < n; ++i) shifted[i] = sorted[i] - center;
  const SegmentCost cost(shifted);

  std::vector<double> prev(n + 1, 0.0), best(n + 1, 0.0);
  std::vector<std::vector<std::size_t>> arg(
      static_cast<std::size_t>(k) + 1, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) prev[i] = cost(0, i);
  for (int c = 2; c <= k; ++c) {
    dp_layer(cost, prev, static_cast<std::size_t>(c), n, best, arg[c]);
    std::swap(prev, best);
  }

  // ends[c] is one past the last sorted index of cluster c (1-based clusters).
  std::vector<std::size_t> ends(static_cast<std::size_t>(k) + 1, 0);
  ends[k] = n;
  for (int c = k; c >= 2; --c) ends[c - 1] = arg[c][ends[c]];
  std::vector<double> centroids(k);
  for (int c = 1; c <= k; ++c) {
    const std::size_t b = ends[c - 1], e = ends[c];
    centroids[c - 1] =
        (cost.sum1[e] - cost.sum1[b]) / static_cast<double>(e - b) + center;
  }

  // Lloyd from the optimal centroids reaches its fixpoint without leaving the
  // optimum; it only settles knife-edge ties by the lower-index rule.
  const Lloyd lloyd{sorted, k};
  ClusterResult res = lloyd.run(std::move(centroids));

  // Report assignments in the caller's point order.
  std::vector<int> out_assign(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int c = 0;
    double bestd = std::abs(values[i] - res.centroids[0]);
    for (int j = 1; j < k; ++j) {
      const double d = std::abs(values[i] - res.centroids[j]);
      if (d < bestd) {
        bestd = d;
        c = j;
      }
    }
    out_assign[i] = c;
  }
  res.assignments = std::move(out_assign);
  return res;
}

ElbowResult elbow_select(const std::vector<double>& values, int k_max,
                         std::uint64_t seed) {
  if (k_max < 2) throw DomainError("elbow_select: k_max must be at least 2");
  if (values.empty()) throw DomainError("elbow_select: empty input");
  const std::size_t distinct =
      std::set<double>(values.begin(), values.end()).size();

  ElbowResult res;
  res.truncated = distinct < static_cast<std::size_t>(k_max);
  const int top = static_cast<int>(std::min<std::size_t>(k_max, distinct));
  for (int k = 1; k <= top; ++k)
    res.wcss_curve.push_back(kmeans_1d(values, k, seed).wcss);

  // A curve that reaches (effectively) zero needs no curvature rule: the
  // first perfect split is the answer, and constant data lands on k = 1.
  const double tiny = 1e-12 * std::max(1.0, res.wcss_curve.front());
  for (int k = 1; k <= top; ++k) {
    if (res.wcss_curve[k - 1] <= tiny) {
      res.k = k;
      return res;
    }
  }
  if (res.wcss_curve.size() < 3) {
    res.k = 1;  // too short a curve to measure curvature
    return res;
  }

  // Second differences of log wcss: the elbow is where the relative drop
  // collapses. Raw differences miss it because wcss(1) dwarfs the rest, so
  // their peak sits at k = 2 for any well-separated planted data.
  auto lw = [&](int k) { return std::log(res.wcss_curve[k - 1]); };
  int best_k = 2;
  double best_d2 = -std::numeric_limits<double>::infinity();
  for (int k = 2; k + 1 <= top; ++k) {
    const double d2 = lw(k - 1) - 2.0 * lw(k) + lw(k + 1);
    if (d2 > best_d2) {  // strict: ties resolve to the lower k
      best_d2 = d2;
      best_k = k;
    }
  }
  res.k = best_k;
  return res;
}

std::vector<int> bin_by_clusters(const std::vector<double>& values,
                                 const std::vector<double>& boundaries) {
  std::vector<int> labels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int c = 0;
    while (c < static_cast<int>(boundaries.size()) && values[i] > boundaries[c]) ++c;
    labels[i] = c;
  }
  return labels;
}

}  // namespace hychoice
