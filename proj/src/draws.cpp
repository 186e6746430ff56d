#include "hychoice/draws.hpp"

#include <boost/math/distributions/normal.hpp>
#include <numeric>
#include <random>

#include "hychoice/errors.hpp"

namespace hychoice {

namespace {

constexpr int kPrimes[10] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

// Full digital permutation of {0..base-1}. Seed 0 is the identity so the
// unscrambled sequence stays available; otherwise Fisher-Yates driven by a
// fixed-width generator (mt19937_64 output is standard-specified, so the
// permutation is platform-independent).
std::vector<int> digit_permutation(int base, std::uint64_t seed, int dim) {
  std::vector<int> perm(base);
  std::iota(perm.begin(), perm.end(), 0);
  if (seed == 0) return perm;
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull * (dim + 1));
  for (int i = base - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

// Permuted radical inverse of index i >= 1 in the given base. The infinite
// tail of zero digits maps to perm[0], contributing perm[0] * b^-K / (b-1)
// after K consumed digits; with perm[0] > 0 this keeps the value strictly
// inside (0,1), and with the identity permutation it vanishes.
double radical_inverse(std::uint64_t i, int base, const std::vector<int>& perm) {
  double value = 0.0;
  double scale = 1.0 / base;
  while (i > 0) {
    value += perm[i % base] * scale;
    i /= base;
    scale /= base;
  }
  if (perm[0] > 0) value += perm[0] * scale * base / (base - 1.0);
  return value;
}

}  // namespace

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw DomainError("inverse_normal_cdf: u must lie strictly inside (0, 1)");
  static const boost::math::normal_distribution<double> kStdNormal;
  return boost::math::quantile(kStdNormal, u);
}

DrawSet halton_draws(int n_obs, int n_draws, int dims, int skip,
                     std::uint64_t seed) {
  if (n_obs <= 0) throw DomainError("halton_draws: n_obs must be positive");
  if (n_draws <= 0) throw DomainError("halton_draws: n_draws must be positive");
  if (dims <= 0 || dims > 10)
    throw DomainError("halton_draws: dims must be in 1..10");
  if (skip < 0) throw DomainError("halton_draws: skip must be nonnegative");

  DrawSet set;
  set.n_obs = n_obs;
  set.n_draws = n_draws;
  set.dims = dims;
  set.skip = skip;
  set.seed = seed;
  set.values.reserve(dims);
  for (int d = 0; d < dims; ++d) {
    const int base = kPrimes[d];
    const std::vector<int> perm = digit_permutation(base, seed, d);
    Eigen::MatrixXd m(n_draws, n_obs);
    for (int o = 0; o < n_obs; ++o) {
      const std::uint64_t offset =
          static_cast<std::uint64_t>(skip) +
          static_cast<std::uint64_t>(o) * static_cast<std::uint64_t>(n_draws);
      for (int r = 0; r < n_draws; ++r) {
        const double u = radical_inverse(offset + r + 1, base, perm);
        m(r, o) = inverse_normal_cdf(u);
      }
    }
    set.values.push_back(std::move(m));
  }
  return set;
}

}  // namespace hychoice
