#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robustkb/frame.hpp"
#include "robustkb/model.hpp"
#include "robustkb/types.hpp"

namespace robustkb {

/// Transport discretization used in the explicit step.
enum class TransportScheme
{
  /// Monotone control-wise upwinding: the sup over controls of
  /// sum_i (f_i^+ D_i^- + f_i^- D_i^+) lambda - lambda^2 gamma, so every control
  /// is differenced along its own drift.
  Upwind,
  /// Maximizer from the central gradient, then one-sided differences chosen
  /// by the sign of that maximizer's drift.
  Hybrid,
  /// Central differences plus local Lax-Friedrichs dissipation.
  LocalLaxFriedrichs,
};

/// Rectangular grid in frame coordinates zeta = x - w*(t), centered at zeta = 0.
struct GridSpec
{
  double half_width1 = 4.0;
  double half_width2 = 4.0;
  int nodes1 = 81;
  int nodes2 = 81;
  /// Controls are restricted to |a| + b <= drift_cap.
  double drift_cap = 10.0;
  /// CFL safety factor theta in (0, 1].
  double cfl_safety = 0.8;
  TransportScheme scheme = TransportScheme::Upwind;
  /// Lower bound on lambda^2 inside the maximizer.
  double s_min = 1e-6;
  /// lambda >= -lambda_floor is read back as v = +inf.
  double lambda_floor = 1e-9;
  /// Smallest admissible time step before the solve is declared failed.
  double dt_floor = 1e-12;

  double h1() const { return 2.0 * half_width1 / (nodes1 - 1); }
  double h2() const { return 2.0 * half_width2 / (nodes2 - 1); }
  double zeta1(int i) const { return -half_width1 + i * h1(); }
  double zeta2(int j) const { return -half_width2 + j * h2(); }
  StateVector zeta(int i, int j) const { return {zeta1(i), zeta2(j)}; }
  int center1() const { return (nodes1 - 1) / 2; }
  int center2() const { return (nodes2 - 1) / 2; }

  void validate(std::string_view prefix = "grid") const;
};

/// Maximized Hamiltonian at one node together with its maximizer.
struct HamiltonianResult
{
  double value = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Frame-relative drift f(w* + zeta, a, b) - f(w*, alpha*, beta*).
StateVector relative_dynamics(const StateVector& zeta, const FrameNode& node, double a, double b,
                              const ReferenceParameters& ref);

/// sup over a in R, b >= 0, |a| + b <= drift_cap of
///   fbar(zeta, a, b) . grad - s gamma(a, b),   s = max(lambda^2, s_min).
/// fbar is affine in (a, b), so the unconstrained maximizer is closed form;
/// when it violates the cap the maximum over the three edges of the feasible
/// triangle is taken, each edge also being closed form. The returned value
/// uses s in place of lambda^2.
HamiltonianResult pointwise_hamiltonian(const StateVector& zeta, const Eigen::Vector2d& grad, double lambda,
                                        const FrameNode& node, const PenaltyConfig& cfg,
                                        const ReferenceParameters& ref, double drift_cap, double s_min = 1e-6);

/// lambda = -1 / (1 + v) and its inverse (inf for lambda >= -floor).
inline double lambda_from_value(double v) { return is_infinite_cost(v) ? 0.0 : -1.0 / (1.0 + v); }
double value_from_lambda(double lambda, double lambda_floor);

/// Node values at one output time.
struct LambdaSnapshot
{
  double t = 0.0;
  StateVector wstar = StateVector::Zero();
  double eta = 0.0;
  /// lambda(i, j) at zeta = (zeta1(i), zeta2(j)).
  ArrayXX<double> lambda;
};

/// Statistics gathered over every step of a solve.
struct SolverDiagnostics
{
  long steps = 0;
  /// Largest realized Courant number dt (|fbar1|/h1 + |fbar2|/h2) at any node and step.
  double max_courant = 0.0;
  double min_dt = 0.0;
  double max_dt = 0.0;
  double last_dt = 0.0;
  /// Extremes of the stored node values over all steps (after clamping).
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  /// Extremes of the explicit update before clamping to [-1, 0].
  double min_raw_lambda = 0.0;
  double max_raw_lambda = 0.0;
};

struct LambdaField
{
  GridSpec grid;
  std::vector<LambdaSnapshot> snapshots;
  SolverDiagnostics diagnostics;

  double t_min() const { return snapshots.front().t; }
  double t_max() const { return snapshots.back().t; }
  /// Snapshot at time t, linearly interpolated between the bracketing
  /// snapshots. Throws ConfigError outside [t_min, t_max].
  LambdaSnapshot at(double t) const;
};

/// Initial data lambda(zeta, 0) = -1 / (1 + v0(w*(0) + zeta)).
ArrayXX<double> initial_lambda(const GridSpec& grid, const StateVector& wstar0, const PenaltyConfig& cfg,
                               const ReferenceParameters& ref);

/// Explicit monotone scheme for the lambda-form HJB equation in the moving
/// frame, from t = 0 up to the largest output time. Zero boundary values on
/// the rectangle's edge and at nodes outside the half-plane; lambda is
/// clamped into [-1, 0] after every step. The step size is adaptive:
///   dt = theta / max_nodes(|fbar1|/h1 + |fbar2|/h2 + 2 |lambda| gamma),
/// shortened to land exactly on each output time.
/// Throws NumericalError on NaN or when dt falls below grid.dt_floor.
LambdaField solve_lambda(const GridSpec& grid, const FrameTrajectory& frame, const PenaltyConfig& cfg,
                         const ReferenceParameters& ref, std::span<const double> output_times);

/// Bilinear interpolation of lambda at zeta; returns 0 (v = inf) outside the rectangle.
double interpolate_lambda(const LambdaSnapshot& snap, const GridSpec& grid, const StateVector& zeta);

/// vbar(zeta, t) from one snapshot.
double frame_value(const LambdaSnapshot& snap, const GridSpec& grid, const StateVector& zeta);

/// kappa_t(mu, sigma2 | y): v at x = to_state(mu, sigma2, eta_t), inf outside the grid.
double kappa_lookup(const LambdaField& field, double t, double mu, double sigma2, double eta_t);

/// One CSV per snapshot, named lambda_t<index>.csv, columns zeta1,zeta2,lambda,v.
void write_snapshots(const LambdaField& field, const std::string& directory);

}  // namespace robustkb
