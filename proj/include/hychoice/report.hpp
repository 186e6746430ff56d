#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hychoice/estimator.hpp"

namespace hychoice {

// Estimate table in the published style: Parameter | Estimate | Rob. t-test
// rows at 3 significant figures, * / ** marking estimates that miss the 95% /
// 90% confidence levels, then the performance-indicator block. Display-only
// rounding; the machine report keeps full precision.
std::string human_report(const EstimationResult& result,
                         const std::string& title);

// One name<TAB>value line per parameter in declaration order, then se_<name>
// and t_<name> for the free ones, then scalar run metadata. Values print with
// %.17g, so identical runs are byte-identical.
std::string machine_report(const EstimationResult& result);

struct ManifestInput {
  std::string path;
  std::string hash;  // fnv1a64 of the file bytes
};

// Reproducibility record written next to every command's outputs. Wall time
// lives only here; result files stay byte-comparable across runs.
struct RunManifest {
  std::string command;
  std::vector<ManifestInput> inputs;
  std::uint64_t seed = 0;
  int n_draws = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& manifest);

std::string hash_file(const std::string& path);

}  // namespace hychoice
