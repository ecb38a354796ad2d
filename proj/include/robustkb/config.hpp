#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "robustkb/hjb.hpp"
#include "robustkb/model.hpp"

namespace robustkb {

struct SimulationSettings
{
  double dt = 1e-3;
  double horizon = 2.0;
  std::uint64_t seed = 42;
};

/// Everything one experiment needs. See docs/config.md for the JSON schema.
struct ExperimentConfig
{
  ModelParameters model;
  ReferenceParameters reference;
  PenaltyConfig penalty;
  SimulationSettings simulation;
  GridSpec grid;
  std::vector<double> output_times;
  std::vector<Functional> functionals;
  std::string output_dir = "out";
  bool solve_hjb = true;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Throws ConfigError listing the configured names when absent.
  const Functional& functional(const std::string& name) const;
};

/// Evenly spaced times k T / (count - 1), k = 0..count-1.
std::vector<double> evenly_spaced_times(double horizon, int count);

ExperimentConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
/// Reads and validates a JSON config file. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& path);

}  // namespace robustkb
