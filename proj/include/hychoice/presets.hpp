#pragma once

#include <string>
#include <vector>

#include "hychoice/modelspec.hpp"

namespace hychoice {

// Exclusive dummy group: at most one member equals 1 per individual, the
// remainder probability is the implicit reference level.
struct MarginalGroup {
  std::vector<std::string> names;
  std::vector<double> probs;
};

// Case-study model specification for one family. Alternatives are
// 1 = FRT, 2 = ODT, 3 = Indifferent. Free parameters start at 0 and scale
// parameters at 1; normalization anchors are fixed.
ModelSpec preset(ModelFamily family);

// Published estimates for the matching preset, keyed by parameter name.
// Used as ground truth in synthetic-recovery experiments.
ParameterVector reference_estimates(ModelFamily family);

// Case-study covariate marginals (N = 72), grouped by exclusivity.
std::vector<MarginalGroup> reference_marginals();

}  // namespace hychoice
