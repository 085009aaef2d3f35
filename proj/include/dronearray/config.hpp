#ifndef DRONEARRAY_CONFIG_HPP
#define DRONEARRAY_CONFIG_HPP

#include <string>
#include <vector>

#include "dronearray/sim.hpp"

namespace dronearray::config {

enum class RunMode { array, baseline, both, hover_curve };

struct RunConfig {
  sim::Scenario scenario;
  RunMode mode = RunMode::array;
  sim::SweepParameter sweep_parameter = sim::SweepParameter::bandwidth;
  std::vector<double> sweep_values;
  int sweep_repetitions = 1;
  std::vector<std::string> hover_directions{"xyz", "x"};
};

// Flat "key = value" text, dotted namespaces, '#' comments. Unknown keys are
// rejected. See README for the full key table.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Overlays a second file (e.g. a figure preset) onto an existing config.
void merge_config_file(RunConfig& cfg, const std::string& path);

// "out.csv" + "_trace" -> "out_trace.csv"
std::string derived_path(const std::string& base, const std::string& suffix);

}  // namespace dronearray::config

#endif
