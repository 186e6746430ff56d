#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace hychoice {

// Quasi-random standard-normal draws, one block of n_draws per observation.
// values[dim] is an (n_draws x n_obs) matrix, so the draws of one observation
// in one dimension are contiguous. Regenerating with identical arguments is
// bit-identical. log_weights is empty for equally weighted simulation draws;
// quadrature rules fill it with log node weights (summing to 1 in levels).
struct DrawSet {
  int n_obs = 0;
  int n_draws = 0;
  int dims = 0;
  int skip = 0;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> values;
  Eigen::VectorXd log_weights;
  bool shared_nodes = false;  // true when every observation uses column 0

  double operator()(int obs, int draw, int dim) const {
    return values[dim](draw, shared_nodes ? 0 : obs);
  }
};

// Halton points in bases 2, 3, 5, ... (one prime per dimension, dims <= 10),
// dropping the first `skip` points, scrambled by a seeded digital permutation
// per base (seed 0 keeps the identity permutation), then mapped through the
// inverse standard-normal CDF. Observation o consumes sequence indices
// skip + o*n_draws + 1 ... skip + (o+1)*n_draws.
DrawSet halton_draws(int n_obs, int n_draws, int dims, int skip = 10,
                     std::uint64_t seed = 0);

// Inverse standard-normal CDF, u in (0,1).
double inverse_normal_cdf(double u);

}  // namespace hychoice
