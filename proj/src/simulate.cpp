#include "robustkb/simulate.hpp"

#include <cmath>
#include <random>

#include "robustkb/error.hpp"

namespace robustkb {

void SamplePath::validate() const
{
  const auto n = times.size();
  if (n < 2 || x.size() != n || y.size() != n || eta.size() != n || c.size() != n)
    throw ConfigError("sample path: series lengths disagree or path has fewer than two nodes");
  if (!(dt > 0.0)) throw ConfigError("sample path: dt must be > 0");
}

Eigen::Index step_count(double dt, double horizon)
{
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("simulation.dt must be > 0");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw ConfigError("simulation.T must be >= dt");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  // Tolerate representation error in T/dt, otherwise cover [0, T].
  const double n = std::abs(ratio - rounded) < 1e-9 * ratio ? rounded : std::ceil(ratio);
  return static_cast<Eigen::Index>(n);
}

SamplePath simulate_from_increments(const ModelParameters& params, double dt, double x0,
                                    const Eigen::VectorXd& dB, const Eigen::VectorXd& dW)
{
  if (!(dt > 0.0)) throw ConfigError("simulation.dt must be > 0");
  if (dB.size() != dW.size() || dB.size() < 1)
    throw ConfigError("simulate: increment vectors must be nonempty and of equal length");
  const Eigen::Index n = dB.size();
  const double vol = std::sqrt(params.beta);

  SamplePath path;
  path.dt = dt;
  path.times = Eigen::VectorXd::LinSpaced(n + 1, 0.0, dt * static_cast<double>(n));
  path.x.resize(n + 1);
  path.y.resize(n + 1);
  path.c.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) path.c(i) = params.c(path.times(i));

  path.x(0) = x0;
  path.y(0) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = path.x(i);
    path.x(i + 1) = xi + params.alpha * xi * dt + vol * dB(i);
    path.y(i + 1) = path.y(i) + path.c(i) * xi * dt + dW(i);
  }
  path.eta = eta_path(path, params.c);
  return path;
}

SamplePath simulate_paths(const ModelParameters& params, double dt, double horizon, std::uint64_t seed)
{
  params.validate();
  const Eigen::Index n = step_count(dt, horizon);

  std::seed_seq signal_seed{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0u};
  std::seed_seq obs_seed{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 1u};
  std::mt19937_64 signal_rng(signal_seed);
  std::mt19937_64 obs_rng(obs_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double x0 = params.mu0 + params.sigma0 * normal(signal_rng);
  const double sdt = std::sqrt(dt);
  Eigen::VectorXd dB(n), dW(n);
  for (Eigen::Index i = 0; i < n; ++i) dB(i) = sdt * normal(signal_rng);
  for (Eigen::Index i = 0; i < n; ++i) dW(i) = sdt * normal(obs_rng);

  SamplePath path = simulate_from_increments(params, dt, x0, dB, dW);
  path.seed = seed;
  return path;
}

Eigen::VectorXd eta_path(const SamplePath& path, const ObservationGain& c)
{
  const Eigen::Index n = path.y.size();
  Eigen::VectorXd eta(n);
  if (n == 0) return eta;
  eta(0) = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) eta(i + 1) = eta(i) + c(path.times(i)) * (path.y(i + 1) - path.y(i));
  return eta;
}

}  // namespace robustkb
