#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "robustkb/model.hpp"

namespace robustkb {

/// Signal X, observation Y and integrated observation eta = int c dY on the
/// uniform grid t_i = i * dt, i = 0..N. c holds the gain at each node.
struct SamplePath
{
  double dt = 0.0;
  Eigen::VectorXd times;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd eta;
  Eigen::VectorXd c;
  std::uint64_t seed = 0;

  Eigen::Index steps() const { return times.size() - 1; }
  double horizon() const { return times(times.size() - 1); }
  void validate() const;
};

/// Number of steps of size dt covering [0, horizon]; rejects dt <= 0 and horizon < dt.
Eigen::Index step_count(double dt, double horizon);

/// Euler-Maruyama path with left-point evaluation. The signal stream draws
/// X_0 first, then the B increments; the W increments come from an
/// independent stream derived from the same seed.
SamplePath simulate_paths(const ModelParameters& params, double dt, double horizon, std::uint64_t seed);

/// Same scheme driven by explicit Brownian increments dB_i, dW_i (each ~ N(0, dt)).
SamplePath simulate_from_increments(const ModelParameters& params, double dt, double x0,
                                    const Eigen::VectorXd& dB, const Eigen::VectorXd& dW);

/// Left-point Ito sum eta_{i+1} = eta_i + c(t_i) (Y_{i+1} - Y_i).
Eigen::VectorXd eta_path(const SamplePath& path, const ObservationGain& c);

}  // namespace robustkb
