#pragma once

// Shared problem instances for the unit and acceptance tests.

#include <vector>

#include "robustkb/config.hpp"
#include "robustkb/frame.hpp"
#include "robustkb/hjb.hpp"
#include "robustkb/simulate.hpp"

namespace robustkb::testing {

/// The shipped configs/baseline.json, built in code.
inline ExperimentConfig baseline_config()
{
  ExperimentConfig cfg;
  cfg.model = {0.5, 1.5, ObservationGain(1.0), 1.0, 0.2};
  cfg.reference = {0.0, 1.0, 0.0, 1.0};
  cfg.penalty = {5.0, 10.0, 15.0, 15.0, 10.0, 5.0};
  cfg.simulation = {1e-3, 2.0, 42};
  cfg.grid = GridSpec{};
  cfg.output_times = evenly_spaced_times(2.0, 21);
  cfg.functionals = {Functional::identity(), Functional::call(2.0)};
  return cfg;
}

/// Small instance: T = 0.25, 41 x 41 grid on [-2, 2]^2, drift cap 4,
/// baseline penalties and path.
struct CoarseInstance
{
  ExperimentConfig cfg = baseline_config();
  SamplePath path;
  FrameTrajectory frame;
  GridSpec grid;
  double horizon = 0.25;

  CoarseInstance()
  {
    path = simulate_paths(cfg.model, cfg.simulation.dt, horizon, cfg.simulation.seed);
    frame = reference_frame(cfg.reference, path);
    grid.half_width1 = grid.half_width2 = 2.0;
    grid.nodes1 = grid.nodes2 = 41;
    grid.drift_cap = 4.0;
  }

  LambdaField solve(const std::vector<double>& outputs) const
  {
    return solve_lambda(grid, frame, cfg.penalty, cfg.reference, outputs);
  }
};

/// Probe offsets from the frame center used by the HJB-versus-oracle checks:
/// the 3 x 3 stencil with spacing 0.2 around the minimum.
inline std::vector<StateVector> coarse_probes()
{
  std::vector<StateVector> out;
  for (double z2 : {-0.2, 0.0, 0.2})
    for (double z1 : {-0.2, 0.0, 0.2}) out.emplace_back(z1, z2);
  return out;
}

}  // namespace robustkb::testing
