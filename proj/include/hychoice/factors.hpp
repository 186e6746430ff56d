#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hychoice/dataset.hpp"

namespace hychoice {

// Pearson correlations over pairwise-complete rows; unit diagonal. Each pair
// of indicators needs at least 2 complete rows, each column positive variance.
Eigen::MatrixXd correlation_matrix(const Dataset& data,
                                   const std::vector<std::string>& indicators);

struct Retention {
  bool kaiser = true;  // retain eigenvalues of the correlation matrix above 1
  int count = 0;       // used instead when > 0
};

struct FactorSolution {
  int n_factors = 0;
  Eigen::MatrixXd loadings;           // indicators x factors, varimax-rotated when >= 2
  std::vector<double> eigenvalues;    // of the analyzed correlation matrix, non-increasing
  std::vector<double> communalities;  // row sums of squared loadings
  std::vector<int> assignment;        // per indicator: argmax |loading|, ties to lower factor
};

// Principal-axis extraction: eigendecomposition of the reduced correlation
// matrix with iterated communalities, loadings = eigenvector * sqrt(eigenvalue).
// Loading signs are indeterminate; each factor is flipped so its largest
// |loading| is positive.
FactorSolution extract_factors(const Eigen::MatrixXd& corr, const Retention& retention = {});

}  // namespace hychoice
