#include <cmath>
#include <random>

#include <doctest.h>

#include "robustkb/error.hpp"
#include "robustkb/simulate.hpp"

using namespace robustkb;

TEST_CASE("zero drift and noise freeze the signal")
{
  ModelParameters p;
  p.alpha = 0.0;
  p.beta = 0.0;
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const SamplePath path = simulate_paths(p, 0.01, 1.0, seed);
    CHECK(path.steps() == 100);
    for (Eigen::Index i = 0; i < path.x.size(); ++i) CHECK(path.x(i) == path.x(0));
  }
}

TEST_CASE("observation and eta start at zero")
{
  const SamplePath path = simulate_paths(ModelParameters{}, 1e-3, 0.5, 3);
  CHECK(path.y(0) == 0.0);
  CHECK(path.eta(0) == 0.0);
  CHECK(path.times.size() == path.x.size());
  CHECK(path.times.size() == path.y.size());
  CHECK(path.times.size() == path.eta.size());
  CHECK(path.horizon() == doctest::Approx(0.5));
}

TEST_CASE("increment variance matches beta T")
{
  ModelParameters p;
  p.alpha = 0.0;
  p.beta = 1.0;
  p.sigma0 = 1e-12;
  const double horizon = 1.0;
  const int n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < n; ++s) {
    const SamplePath path = simulate_paths(p, 0.05, horizon, static_cast<std::uint64_t>(s));
    const double d = path.x(path.x.size() - 1) - path.x(0);
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(var - horizon) / horizon < 0.05);
}

TEST_CASE("paths are deterministic in the seed")
{
  const ModelParameters p;
  const SamplePath a = simulate_paths(p, 1e-3, 1.0, 42);
  const SamplePath b = simulate_paths(p, 1e-3, 1.0, 42);
  const SamplePath c = simulate_paths(p, 1e-3, 1.0, 43);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.eta == b.eta);
  CHECK(a.x != c.x);
}

TEST_CASE("rejects bad step sizes")
{
  CHECK_THROWS_AS(simulate_paths(ModelParameters{}, 0.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(simulate_paths(ModelParameters{}, -1e-3, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(simulate_paths(ModelParameters{}, 0.1, 0.05, 1), ConfigError);
}

TEST_CASE("eta for constant gains")
{
  const SamplePath path = simulate_paths(ModelParameters{}, 1e-3, 1.0, 5);
  const Eigen::VectorXd zero = eta_path(path, ObservationGain(0.0));
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd one = eta_path(path, ObservationGain(1.0));
  for (Eigen::Index i = 0; i < one.size(); ++i) CHECK(one(i) == doctest::Approx(path.y(i)).epsilon(1e-12));
}

TEST_CASE("eta with a piecewise gain is consistent under refinement")
{
  // Fine path at dt/2; the coarse path samples it at even nodes.
  const double dt = 1e-3;
  ModelParameters p;
  p.c = ObservationGain({0.0, 1.0}, {1.0, 2.0});
  const SamplePath fine = simulate_paths(p, dt / 2, 2.0, 11);
  SamplePath coarse;
  const Eigen::Index n = fine.steps() / 2;
  coarse.dt = dt;
  coarse.times.resize(n + 1);
  coarse.x.resize(n + 1);
  coarse.y.resize(n + 1);
  coarse.eta = Eigen::VectorXd::Zero(n + 1);
  coarse.c.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    coarse.times(i) = i * dt;
    coarse.x(i) = fine.x(2 * i);
    coarse.y(i) = fine.y(2 * i);
    coarse.c(i) = p.c(coarse.times(i));
  }
  const Eigen::VectorXd eta_c = eta_path(coarse, p.c);
  const Eigen::VectorXd eta_f = eta_path(fine, p.c);
  double worst = 0.0;
  for (Eigen::Index i = 0; i <= n; ++i) worst = std::max(worst, std::abs(eta_c(i) - eta_f(2 * i)));
  // The sums differ only in the one interval straddling t = 1.
  CHECK(worst < 0.2);
  CHECK(worst < 10 * std::sqrt(dt));
}

TEST_CASE("strong order one half under refinement")
{
  // Coarse increments are sums of pairs of fine increments.
  ModelParameters p;
  const double horizon = 1.0;
  auto rms_gap = [&](double dt) {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n_fine = static_cast<int>(std::lround(horizon / (dt / 2)));
    double acc = 0.0;
    const int samples = 400;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd dB(n_fine), dW(n_fine);
      for (int i = 0; i < n_fine; ++i) {
        dB(i) = std::sqrt(dt / 2) * gauss(rng);
        dW(i) = std::sqrt(dt / 2) * gauss(rng);
      }
      Eigen::VectorXd cB(n_fine / 2), cW(n_fine / 2);
      for (int i = 0; i < n_fine / 2; ++i) {
        cB(i) = dB(2 * i) + dB(2 * i + 1);
        cW(i) = dW(2 * i) + dW(2 * i + 1);
      }
      const SamplePath f = simulate_from_increments(p, dt / 2, 1.0, dB, dW);
      const SamplePath c = simulate_from_increments(p, dt, 1.0, cB, cW);
      const double d = f.x(f.x.size() - 1) - c.x(c.x.size() - 1);
      acc += d * d;
    }
    return std::sqrt(acc / samples);
  };
  const double g1 = rms_gap(0.02);
  const double g2 = rms_gap(0.005);
  CHECK(g1 < 0.5 * std::sqrt(0.02) * 5);
  // Quartering dt at least halves the gap (order >= 1/2).
  CHECK(g2 < 0.55 * g1);
}
