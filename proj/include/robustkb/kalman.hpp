#pragma once

#include <Eigen/Core>

#include "robustkb/model.hpp"
#include "robustkb/simulate.hpp"

namespace robustkb {

/// Drift/diffusion/initial-law coefficients a filter is run with. The gain c
/// is read from the sample path.
struct FilterCoefficients
{
  double alpha = 0.0;
  double beta = 0.0;
  double mu0 = 0.0;
  double sigma0 = 1.0;

  static FilterCoefficients from(const ModelParameters& p) { return {p.alpha, p.beta, p.mu0, p.sigma0}; }
  static FilterCoefficients from(const ReferenceParameters& p) { return {p.alpha, p.beta, p.mu0, p.sigma0}; }
};

/// Conditional mean q and variance r of X_t given the observations.
struct FilterTrajectory
{
  double dt = 0.0;
  Eigen::VectorXd times;
  Eigen::VectorXd q;
  Eigen::VectorXd r;
};

/// Right-hand side of the variance equation R' = beta + 2 alpha R - c^2 R^2.
inline double riccati_rhs(double alpha, double beta, double c, double r)
{
  return beta + 2.0 * alpha * r - c * c * r * r;
}

/// One classical Runge-Kutta step of the variance equation with frozen coefficients.
double riccati_step(double alpha, double beta, double c, double r, double dt);

/// Kalman-Bucy filter along the path. The mean uses Euler-Maruyama on
/// dq = alpha q dt + c R (dY - c q dt); the variance uses riccati_step.
/// Throws NumericalError if the variance ever becomes nonpositive.
FilterTrajectory run_filter(const FilterCoefficients& coeffs, const SamplePath& path);
FilterTrajectory run_filter(const ModelParameters& params, const SamplePath& path);
FilterTrajectory run_filter(const ReferenceParameters& params, const SamplePath& path);

/// Exact solution of the constant-coefficient variance equation from r0 at time 0.
/// For c != 0 the solution interpolates between the roots
/// R+- = (alpha +- sqrt(alpha^2 + beta c^2)) / c^2; for c == 0 it is the linear ODE solution.
double riccati_closed_form(double alpha, double beta, double c, double r0, double t);

/// Stable (positive) root R+ of beta + 2 alpha R - c^2 R^2 = 0, c != 0.
double riccati_stable_root(double alpha, double beta, double c);

}  // namespace robustkb
