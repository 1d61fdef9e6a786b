#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "c2poly/config.hpp"

namespace c2poly {

struct RunOutput {
  std::vector<std::string> files;  // written, in order
  nlohmann::json summary;
  double wall_seconds = 0.0;
};

// Runs one experiment and writes into cfg.out_dir:
//   <prefix>.csv          rows (partition experiments: the partition table)
//   <prefix>.json         summary with config echo, seed and version
//   <prefix>.timing.json  wall time
// The first two depend only on (config, seed, version). Throws ConfigError
// for values that only fail once the domain is built, NumericalError for
// solver failures.
RunOutput run_experiment(const ExperimentConfig& cfg);

}  // namespace c2poly
