#include "hychoice/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "hychoice/errors.hpp"

namespace hychoice {

WelchResult welch_t(double mean1, double sd1, double n1,
                    double mean2, double sd2, double n2) {
  if (n1 < 2 || n2 < 2) throw DomainError("welch_t: each sample needs n >= 2");
  if (sd1 < 0 || sd2 < 0) throw DomainError("welch_t: sd must be non-negative");

  WelchResult res;
  const double v1 = sd1 * sd1 / n1;
  const double v2 = sd2 * sd2 / n2;
  if (v1 + v2 == 0.0) {
    res.df = n1 + n2 - 2;
    return res;  // no variance on either side: t = 0, p = 1
  }
  res.t = (mean1 - mean2) / std::sqrt(v1 + v2);
  res.df = (v1 + v2) * (v1 + v2) / (v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1));
  boost::math::students_t dist(res.df);
  res.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t)));
  return res;
}

GofResult chi_square_gof(const std::vector<double>& observed,
                         const std::vector<double>& expected) {
  if (observed.size() != expected.size())
    throw DomainError("chi_square_gof: observed and expected lengths differ");
  if (observed.size() < 2) throw DomainError("chi_square_gof: need at least 2 categories");

  GofResult res;
  int kept = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i] < 0) throw DomainError("chi_square_gof: negative observed count");
    if (expected[i] < 0) throw DomainError("chi_square_gof: negative expected count");
    if (expected[i] == 0.0) {
      if (observed[i] != 0.0)
        throw DomainError("chi_square_gof: observed count in category " + std::to_string(i) +
                          " with zero expected count");
      res.dropped.push_back(static_cast<int>(i));
      continue;
    }
    const double d = observed[i] - expected[i];
    res.statistic += d * d / expected[i];
    ++kept;
  }
  if (kept < 2) throw DomainError("chi_square_gof: fewer than 2 categories remain");
  res.df = kept - 1;
  boost::math::chi_squared dist(res.df);
  res.p = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

}  // namespace hychoice
