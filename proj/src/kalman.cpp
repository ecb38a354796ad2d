#include "robustkb/kalman.hpp"

#include <cmath>
#include <sstream>

#include "robustkb/error.hpp"

namespace robustkb {

double riccati_step(double alpha, double beta, double c, double r, double dt)
{
  const double k1 = riccati_rhs(alpha, beta, c, r);
  const double k2 = riccati_rhs(alpha, beta, c, r + 0.5 * dt * k1);
  const double k3 = riccati_rhs(alpha, beta, c, r + 0.5 * dt * k2);
  const double k4 = riccati_rhs(alpha, beta, c, r + dt * k3);
  return r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

FilterTrajectory run_filter(const FilterCoefficients& coeffs, const SamplePath& path)
{
  path.validate();
  if (!(coeffs.sigma0 > 0.0)) throw ConfigError("filter: sigma0 must be > 0");
  const Eigen::Index n = path.times.size();
  const double dt = path.dt;

  FilterTrajectory out;
  out.dt = dt;
  out.times = path.times;
  out.q.resize(n);
  out.r.resize(n);
  out.q(0) = coeffs.mu0;
  out.r(0) = coeffs.sigma0 * coeffs.sigma0;

  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double c = path.c(i);
    const double q = out.q(i);
    const double r = out.r(i);
    const double innovation = (path.y(i + 1) - path.y(i)) - c * q * dt;
    out.q(i + 1) = q + coeffs.alpha * q * dt + c * r * innovation;
    out.r(i + 1) = riccati_step(coeffs.alpha, coeffs.beta, c, r, dt);
    if (!(out.r(i + 1) > 0.0) || !std::isfinite(out.q(i + 1))) {
      std::ostringstream os;
      os << "filter: conditional variance became nonpositive at t=" << path.times(i + 1)
         << " (dt=" << dt << " is too large)";
      throw NumericalError(os.str());
    }
  }
  return out;
}

FilterTrajectory run_filter(const ModelParameters& params, const SamplePath& path)
{
  return run_filter(FilterCoefficients::from(params), path);
}

FilterTrajectory run_filter(const ReferenceParameters& params, const SamplePath& path)
{
  return run_filter(FilterCoefficients::from(params), path);
}

double riccati_stable_root(double alpha, double beta, double c)
{
  const double c2 = c * c;
  return (alpha + std::sqrt(alpha * alpha + beta * c2)) / c2;
}

double riccati_closed_form(double alpha, double beta, double c, double r0, double t)
{
  if (!(r0 > 0.0)) throw ConfigError("riccati_closed_form: r0 must be > 0");
  const double c2 = c * c;
  if (c2 == 0.0) {
    if (alpha == 0.0) return r0 + beta * t;
    // r0 e^{2at} + beta (e^{2at} - 1) / (2a)
    const double growth = std::expm1(2.0 * alpha * t);
    return r0 * (1.0 + growth) + beta * growth / (2.0 * alpha);
  }
  const double d = std::sqrt(alpha * alpha + beta * c2);
  if (d == 0.0) return r0 / (1.0 + c2 * r0 * t);

  const double upper = (alpha + d) / c2;
  const double lower = (alpha - d) / c2;
  // (R - R+) / (R - R-) decays like e^{-2 d t}; r0 - R- > 0 since R- <= 0 < r0.
  const double k = (r0 - upper) / (r0 - lower) * std::exp(-2.0 * d * t);
  return (upper - k * lower) / (1.0 - k);
}

}  // namespace robustkb
