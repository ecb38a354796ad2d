#include "robustkb/frame.hpp"

#include <algorithm>
#include <cmath>

#include "robustkb/error.hpp"

namespace robustkb {

ControlAffineDynamics control_affine_form(const StateVector& z, double eta, double c)
{
  const double shifted = z.x() + eta;
  ControlAffineDynamics d;
  d.drift0 = {0.0, c * c};
  if (z.y() > 0.0) {
    d.along_a = {-shifted, -2.0 * z.y()};
    d.along_b = {-shifted * z.y(), -z.y() * z.y()};
  } else {
    d.along_a = {-shifted, 0.0};
    d.along_b = {0.0, 0.0};
  }
  return d;
}

StateVector to_state(double mu, double sigma2, double eta)
{
  if (!(sigma2 > 0.0)) throw ConfigError("to_state: variance must be > 0");
  return {mu / sigma2 - eta, 1.0 / sigma2};
}

MeanVariance from_state(const StateVector& z, double eta)
{
  if (!(z.y() > 0.0)) throw ConfigError("from_state: precision coordinate must be > 0");
  const double sigma2 = 1.0 / z.y();
  return {sigma2 * (z.x() + eta), sigma2};
}

FrameNode FrameTrajectory::at(double t) const
{
  const Eigen::Index n = times.size();
  if (t <= times(0)) return {wstar.col(0), eta(0), c(0)};
  if (t >= times(n - 1)) return {wstar.col(n - 1), eta(n - 1), c(n - 1)};
  const auto* begin = times.data();
  const auto* it = std::upper_bound(begin, begin + n, t);
  const Eigen::Index k = it - begin;  // times(k-1) <= t < times(k)
  const double s = (t - times(k - 1)) / (times(k) - times(k - 1));
  FrameNode node;
  node.wstar = (1.0 - s) * wstar.col(k - 1) + s * wstar.col(k);
  node.eta = (1.0 - s) * eta(k - 1) + s * eta(k);
  node.c = (1.0 - s) * c(k - 1) + s * c(k);
  return node;
}

FrameTrajectory make_frame(const Eigen::VectorXd& times, const Eigen::VectorXd& q, const Eigen::VectorXd& r,
                           const Eigen::VectorXd& eta, const Eigen::VectorXd& c)
{
  const Eigen::Index n = times.size();
  if (q.size() != n || r.size() != n || eta.size() != n || c.size() != n || n < 2)
    throw ConfigError("frame: series lengths disagree");
  FrameTrajectory frame;
  frame.times = times;
  frame.eta = eta;
  frame.c = c;
  frame.wstar.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(r(i) > 0.0)) throw NumericalError("frame: reference variance must stay positive");
    frame.wstar.col(i) = StateVector(q(i) / r(i) - eta(i), 1.0 / r(i));
  }
  return frame;
}

FrameTrajectory reference_frame(const ReferenceParameters& ref, const SamplePath& path)
{
  const FilterTrajectory filter = run_filter(ref, path);
  return make_frame(path.times, filter.q, filter.r, path.eta, path.c);
}

double log_estimate_constant(double eta_bound, double gain_bound)
{
  // w.f <= (1 + |w|^2) (|a| (2 + H/2) + b H/2 + C^2/2) once the terms
  // -b w1^2 w2 and -b w2^3 (nonpositive on z2 > 0) are dropped.
  return std::max(4.0 + eta_bound, gain_bound * gain_bound);
}

double growth_constant(double eta_bound, double gain_bound)
{
  return std::max({3.0, eta_bound, gain_bound * gain_bound});
}

}  // namespace robustkb
