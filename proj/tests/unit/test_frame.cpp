#include <cmath>
#include <random>

#include <doctest.h>

#include "robustkb/error.hpp"
#include "robustkb/frame.hpp"
#include "robustkb/kalman.hpp"

using namespace robustkb;

TEST_CASE("dynamics examples")
{
  const StateVector z(0.7, 2.0);
  const StateVector idle = dynamics_f(z, 0.0, 0.0, 0.3, 1.5);
  CHECK(idle.x() == 0.0);
  CHECK(idle.y() == doctest::Approx(2.25));
  const StateVector f = dynamics_f(StateVector(0.0, 1.0), 0.0, 1.0, 0.0, 1.0);
  CHECK(f.x() == 0.0);
  CHECK(f.y() == 0.0);
  // z = (1, 2), eta = 0.5, c = 2, a = 0.3, b = 0.4:
  // f1 = -1.5 (0.3 + 0.8) = -1.65, f2 = -0.4 * 4 - 1.2 + 4 = 1.2.
  const StateVector g = dynamics_f(StateVector(1.0, 2.0), 0.3, 0.4, 0.5, 2.0);
  CHECK(g.x() == doctest::Approx(-1.65));
  CHECK(g.y() == doctest::Approx(1.2));
}

TEST_CASE("dynamics are continuous across the half-plane edge")
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 200; ++k) {
    const double z1 = u(rng), a = u(rng), b = std::abs(u(rng)), eta = u(rng), c = u(rng);
    const StateVector at = dynamics_f(StateVector(z1, 0.0), a, b, eta, c);
    const StateVector above = dynamics_f(StateVector(z1, 1e-10), a, b, eta, c);
    const StateVector below = dynamics_f(StateVector(z1, -1e-10), a, b, eta, c);
    CHECK((above - at).norm() < 1e-8);
    CHECK((below - at).norm() < 1e-8);
    CHECK(at.x() == doctest::Approx(-(z1 + eta) * a));
    CHECK(at.y() == doctest::Approx(c * c));
  }
}

TEST_CASE("control-affine form reproduces the dynamics")
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 200; ++k) {
    const StateVector z(u(rng), u(rng));
    const double a = u(rng), b = std::abs(u(rng)), eta = u(rng), c = u(rng);
    const StateVector direct = dynamics_f(z, a, b, eta, c);
    const StateVector split = control_affine_form(z, eta, c).at(a, b);
    CHECK((direct - split).norm() < 1e-12);
  }
}

TEST_CASE("state transform")
{
  CHECK(to_state(0.0, 1.0, 0.0) == StateVector(0.0, 1.0));
  const StateVector z = to_state(1.0, 0.04, 0.0);
  CHECK(z.x() == doctest::Approx(25.0));
  CHECK(z.y() == doctest::Approx(25.0));
  CHECK_THROWS_AS(to_state(1.0, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(from_state(StateVector(1.0, 0.0), 0.0), ConfigError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu(-5, 5), var(0.01, 10), eta(-3, 3);
  for (int k = 0; k < 500; ++k) {
    const double m = mu(rng), s = var(rng), e = eta(rng);
    const MeanVariance back = from_state(to_state(m, s, e), e);
    CHECK(back.mu == doctest::Approx(m).epsilon(1e-12).scale(1.0));
    CHECK(back.sigma2 == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("reference frame")
{
  const ReferenceParameters ref{0.0, 1.0, 0.0, 1.0};
  const SamplePath path = simulate_paths(ModelParameters{}, 1e-3, 2.0, 42);
  const FrameTrajectory frame = reference_frame(ref, path);
  CHECK(frame.wstar(0, 0) == 0.0);
  CHECK(frame.wstar(1, 0) == 1.0);
  CHECK(frame.wstar.row(1).minCoeff() > 0.0);
  CHECK(frame.times.size() == path.times.size());

  // Interpolation at a midpoint.
  const FrameNode mid = frame.at(0.5 * (frame.times(10) + frame.times(11)));
  CHECK(mid.wstar.x() == doctest::Approx(0.5 * (frame.wstar(0, 10) + frame.wstar(0, 11))));
  CHECK(mid.eta == doctest::Approx(0.5 * (frame.eta(10) + frame.eta(11))));
}

TEST_CASE("frame without observations")
{
  // c = 0, alpha* = 0: q* stays at mu0*, R* = sigma0*^2 + beta* t and eta = 0.
  ModelParameters model;
  model.c = ObservationGain(0.0);
  const SamplePath path = simulate_paths(model, 1e-3, 1.0, 8);
  const ReferenceParameters ref{0.0, 2.0, 0.7, 0.5};
  const FrameTrajectory frame = reference_frame(ref, path);
  for (Eigen::Index i = 0; i < frame.times.size(); i += 50) {
    const double r = riccati_closed_form(0.0, 2.0, 0.0, 0.25, frame.times(i));
    CHECK(frame.wstar(0, i) == doctest::Approx(0.7 / r).epsilon(1e-12));
    CHECK(frame.wstar(1, i) == doctest::Approx(1.0 / r).epsilon(1e-12));
  }
}

TEST_CASE("make_frame rejects bad input")
{
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(3, 0.0, 1.0);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  Eigen::VectorXd bad_r = ones;
  bad_r(1) = 0.0;
  CHECK_THROWS_AS(make_frame(t, ones, bad_r, ones, ones), NumericalError);
  CHECK_THROWS_AS(make_frame(t, ones, ones, Eigen::VectorXd::Ones(2), ones), ConfigError);
}

TEST_CASE("log estimate along sampled forward trajectories")
{
  // Forward RK4 under random piecewise-constant controls with random eta, c paths.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double eta_bound = 2.0, gain_bound = 1.5;
    const double cst = log_estimate_constant(eta_bound, gain_bound);
    StateVector w(3 * u(rng), 0.1 + 2 * std::abs(u(rng)));
    const double log0 = std::log1p(w.squaredNorm());
    double integral = 0.0;
    const double h = 1e-3;
    for (int seg = 0; seg < 4; ++seg) {
      const double a = 3 * u(rng), b = 3 * std::abs(u(rng));
      const double eta = eta_bound * u(rng), c = gain_bound * u(rng);
      for (int k = 0; k < 100; ++k) {
        auto f = [&](const StateVector& z) { return dynamics_f(z, a, b, eta, c); };
        const StateVector k1 = f(w), k2 = f(w + 0.5 * h * k1), k3 = f(w + 0.5 * h * k2), k4 = f(w + h * k3);
        w += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        integral += h * (1.0 + std::abs(a) + b);
      }
    }
    CHECK(w.y() > 0.0);
    CHECK(std::log1p(w.squaredNorm()) <= log0 + cst * integral + 1e-9);
  }
}

TEST_CASE("growth bound on sampled points")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const double eta_bound = 2.5, gain_bound = 1.2;
  const double l = growth_constant(eta_bound, gain_bound);
  for (int k = 0; k < 2000; ++k) {
    const StateVector z(10 * u(rng), 10 * std::abs(u(rng)) + 1e-6);
    const double a = 5 * u(rng), b = 5 * std::abs(u(rng));
    const double eta = eta_bound * u(rng), c = gain_bound * u(rng);
    const double n = z.norm();
    const double bound = l * (1 + std::abs(a) + std::abs(a) * n + b * n + b * n * n);
    CHECK(dynamics_f(z, a, b, eta, c).norm() <= bound);
  }
}
