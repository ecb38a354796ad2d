#pragma once

#include <Eigen/Core>

#include "robustkb/kalman.hpp"
#include "robustkb/model.hpp"
#include "robustkb/simulate.hpp"
#include "robustkb/types.hpp"

namespace robustkb {

/// Controlled state dynamics in transformed coordinates.
///
/// On the half-plane z2 > 0:
///   f1 = -(z1 + eta) (a + b z2)
///   f2 = -b z2^2 - 2 a z2 + c^2
/// Off it the extension (-(z1 + eta) a, c^2) is used; both agree at z2 = 0.
template <typename Scalar>
Vector2<Scalar> dynamics_f(const Vector2<Scalar>& z, Scalar a, Scalar b, Scalar eta, Scalar c)
{
  const Scalar shifted = z.x() + eta;
  if (z.y() > Scalar(0)) {
    return {-shifted * (a + b * z.y()), -b * z.y() * z.y() - Scalar(2) * a * z.y() + c * c};
  }
  return {-shifted * a, c * c};
}

/// f written as drift0 + a * along_a + b * along_b (f is affine in the controls).
struct ControlAffineDynamics
{
  StateVector drift0;
  StateVector along_a;
  StateVector along_b;

  StateVector at(double a, double b) const { return drift0 + a * along_a + b * along_b; }
};

ControlAffineDynamics control_affine_form(const StateVector& z, double eta, double c);

struct MeanVariance
{
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// (mu, sigma^2) -> (mu / sigma^2 - eta, 1 / sigma^2). Rejects sigma2 <= 0.
StateVector to_state(double mu, double sigma2, double eta);
/// Inverse of to_state. Rejects z2 <= 0.
MeanVariance from_state(const StateVector& z, double eta);

/// Path data at one instant: the frame center w*(t), eta_t and c_t.
struct FrameNode
{
  StateVector wstar = StateVector::Zero();
  double eta = 0.0;
  double c = 0.0;
};

/// Reference trajectory w*(t) = (q*/R* - eta, 1/R*) on the simulation grid,
/// together with the path data the dynamics need. at() interpolates linearly
/// between nodes.
struct FrameTrajectory
{
  Eigen::VectorXd times;
  Eigen::Matrix2Xd wstar;
  Eigen::VectorXd eta;
  Eigen::VectorXd c;

  FrameNode at(double t) const;
  double horizon() const { return times(times.size() - 1); }
  /// Bounds over the whole trajectory, used for a-priori growth constants.
  double eta_bound() const { return eta.cwiseAbs().maxCoeff(); }
  double gain_bound() const { return c.cwiseAbs().maxCoeff(); }
};

/// Runs the filter with the reference parameters and maps each node.
FrameTrajectory reference_frame(const ReferenceParameters& ref, const SamplePath& path);

/// Frame with prescribed eta and c series and w* computed from (q*, R*).
FrameTrajectory make_frame(const Eigen::VectorXd& times, const Eigen::VectorXd& q, const Eigen::VectorXd& r,
                           const Eigen::VectorXd& eta, const Eigen::VectorXd& c);

/// Constant C with d/ds log(1 + |w|^2) <= C (1 + |a| + b) along any trajectory,
/// given |eta| <= eta_bound and |c| <= gain_bound on the interval.
double log_estimate_constant(double eta_bound, double gain_bound);

/// Constant L with |f(z, a, b)| <= L (1 + |a| + |a||z| + b|z| + b|z|^2) on z2 > 0.
double growth_constant(double eta_bound, double gain_bound);

}  // namespace robustkb
