#pragma once

#include <optional>
#include <span>
#include <vector>

#include "robustkb/frame.hpp"
#include "robustkb/model.hpp"

namespace robustkb {

/// Drift and diffusion control values (b >= 0).
struct ControlPair
{
  double a = 0.0;
  double b = 0.0;
};

/// State at the start of a backward integration, with the events met on the way.
struct BackwardTrajectory
{
  StateVector start = StateVector::Zero();
  /// |w| exceeded the cap; start is then meaningless and the cost is infinite.
  bool blown_up = false;
  /// First time w2 reached 0 (the trajectory left the half-plane).
  std::optional<double> exit_time;
  std::optional<double> blowup_time;
};

/// Integrates dw/ds = f(w, s, a, b) backward from w(t_end) = x to t_start with
/// classical Runge-Kutta. The controls are piecewise constant on equal
/// segments of [t_start, t_end] (segments.front() applies first in time).
BackwardTrajectory integrate_backward(const StateVector& x, double t_end, double t_start,
                                      std::span<const ControlPair> segments, const FrameTrajectory& frame,
                                      int substeps_per_segment = 64, double cap = 1e6);

/// integrate_backward down to s = 0.
BackwardTrajectory integrate_trajectory_backward(const StateVector& x, double t, std::span<const ControlPair> segments,
                                                 const FrameTrajectory& frame, int substeps_per_segment = 64,
                                                 double cap = 1e6);

/// Control values and schedule shape enumerated by the brute-force oracle.
struct OracleGrid
{
  std::vector<double> a_values;
  std::vector<double> b_values;
  int segments = 2;
  int substeps = 64;
  double cap = 1e6;

  /// n_a x n_b evenly spaced values on [a_lo, a_hi] x [b_lo, b_hi].
  static OracleGrid uniform(double a_lo, double a_hi, int n_a, double b_lo, double b_hi, int n_b, int segments);
  /// Default ranges [-M, M] x [0, M].
  static OracleGrid for_cap(double drift_cap, int n_a, int n_b, int segments);
};

struct OracleResult
{
  double value = 0.0;
  std::vector<ControlPair> schedule;
  long schedules = 0;
  long blown_up = 0;
  /// Largest log(1+|x|^2) - log(1+|w(0)|^2) - C int (1 + |a| + b) ds over
  /// finite trajectories; nonpositive when the a-priori log estimate holds.
  double max_log_estimate_excess = 0.0;
};

/// Minimum over every piecewise-constant schedule of int gamma ds + v0(w(0)),
/// infinite for blown-up trajectories or w(0) outside the half-plane. The
/// reference control (alpha*, beta*) is added to the control values if absent.
/// Rejects more than 4 segments or more than 7 x 7 control values.
OracleResult brute_force_search(const StateVector& x, double t, const OracleGrid& grid, const FrameTrajectory& frame,
                                const PenaltyConfig& cfg, const ReferenceParameters& ref);

double brute_force_value(const StateVector& x, double t, const OracleGrid& grid, const FrameTrajectory& frame,
                         const PenaltyConfig& cfg, const ReferenceParameters& ref);

}  // namespace robustkb
