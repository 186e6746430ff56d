#pragma once

#include <vector>

namespace hychoice {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p = 1.0;   // two-sided
};

// Unequal-variance t-test from summary statistics. Both sds zero is the
// degenerate case and reports t = 0, p = 1.
WelchResult welch_t(double mean1, double sd1, double n1,
                    double mean2, double sd2, double n2);

struct GofResult {
  double statistic = 0.0;
  int df = 0;  // retained categories - 1
  double p = 1.0;
  std::vector<int> dropped;  // zero-expected categories removed before summing
};

// Pearson chi-square goodness of fit against expected counts.
GofResult chi_square_gof(const std::vector<double>& observed,
                         const std::vector<double>& expected);

}  // namespace hychoice
