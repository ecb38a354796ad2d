#include <cmath>

#include <doctest.h>

#include "robustkb/error.hpp"
#include "robustkb/kalman.hpp"

using namespace robustkb;

namespace {

SamplePath path_with_gain(double c, double dt, double horizon, std::uint64_t seed)
{
  ModelParameters p;
  p.c = ObservationGain(c);
  return simulate_paths(p, dt, horizon, seed);
}

}  // namespace

TEST_CASE("zero gain and drift give linear variance")
{
  const SamplePath path = path_with_gain(0.0, 1e-3, 1.0, 1);
  const FilterCoefficients k{0.0, 1.5, 1.0, 0.2};
  const FilterTrajectory f = run_filter(k, path);
  for (Eigen::Index i = 0; i < f.r.size(); ++i) CHECK(f.r(i) == doctest::Approx(0.04 + 1.5 * f.times(i)).epsilon(1e-12));
  // Without observations the mean is frozen.
  CHECK(f.q.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(f.q.minCoeff() == doctest::Approx(1.0));
}

TEST_CASE("unit variance is a fixed point")
{
  const SamplePath path = path_with_gain(1.0, 1e-3, 1.0, 2);
  const FilterTrajectory f = run_filter(FilterCoefficients{0.0, 1.0, 0.0, 1.0}, path);
  for (Eigen::Index i = 0; i < f.r.size(); ++i) CHECK(f.r(i) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("true-parameter variance matches the closed form")
{
  const SamplePath path = path_with_gain(1.0, 1e-3, 2.0, 42);
  const FilterTrajectory f = run_filter(FilterCoefficients{0.5, 1.5, 1.0, 0.2}, path);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < f.r.size(); ++i)
    worst = std::max(worst, std::abs(f.r(i) - riccati_closed_form(0.5, 1.5, 1.0, 0.04, f.times(i))));
  CHECK(worst < 1e-6);
  CHECK(f.q(0) == 1.0);
  CHECK(f.r(0) == doctest::Approx(0.04));
}

TEST_CASE("stable root")
{
  const double rp = riccati_stable_root(0.5, 1.5, 1.0);
  CHECK(rp == doctest::Approx(0.5 + std::sqrt(1.75)).epsilon(1e-15));
  CHECK(rp == doctest::Approx(1.8229).epsilon(1e-4));
  CHECK(riccati_rhs(0.5, 1.5, 1.0, rp) == doctest::Approx(0.0).epsilon(1e-14));
  for (double t : {0.0, 0.3, 5.0, 50.0}) CHECK(riccati_closed_form(0.5, 1.5, 1.0, rp, t) == doctest::Approx(rp).epsilon(1e-14));
  for (double r0 : {0.01, 0.04, 1.0, 10.0}) CHECK(riccati_closed_form(0.5, 1.5, 1.0, r0, 40.0) == doctest::Approx(rp).epsilon(1e-12));
}

TEST_CASE("closed form agrees with a fine integrator")
{
  // Independent oracle: classical RK4 at dt = 1e-6 written out here.
  auto rhs = [](double r) { return 1.0 - r * r; };
  double r = 0.5;
  const double h = 1e-6;
  for (int k = 0; k < 1000000; ++k) {
    const double k1 = rhs(r), k2 = rhs(r + 0.5 * h * k1), k3 = rhs(r + 0.5 * h * k2), k4 = rhs(r + h * k3);
    r += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(std::abs(riccati_closed_form(0.0, 1.0, 1.0, 0.5, 1.0) - r) < 1e-8);
  // tanh form for this case: R = (tanh t + r0) / (1 + r0 tanh t).
  const double th = std::tanh(1.0);
  CHECK(riccati_closed_form(0.0, 1.0, 1.0, 0.5, 1.0) == doctest::Approx((th + 0.5) / (1 + 0.5 * th)).epsilon(1e-13));
}

TEST_CASE("closed form with zero gain")
{
  CHECK(riccati_closed_form(0.0, 2.0, 0.0, 1.0, 3.0) == doctest::Approx(7.0));
  // R' = beta + 2 alpha R: R = (r0 + beta / (2 alpha)) e^{2 alpha t} - beta / (2 alpha).
  CHECK(riccati_closed_form(0.5, 1.0, 0.0, 1.0, 1.0) == doctest::Approx(2.0 * std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK_THROWS_AS(riccati_closed_form(0.5, 1.0, 1.0, 0.0, 1.0), Error);
}

TEST_CASE("variance approaches the stable root monotonically")
{
  const SamplePath path = path_with_gain(1.0, 1e-3, 8.0, 3);
  const double rp = riccati_stable_root(0.5, 1.5, 1.0);
  for (double sigma0 : {0.2, 2.0}) {
    const FilterTrajectory f = run_filter(FilterCoefficients{0.5, 1.5, 0.0, sigma0}, path);
    const double sign = f.r(0) < rp ? 1.0 : -1.0;
    for (Eigen::Index i = 1; i < f.r.size(); ++i) {
      CHECK(f.r(i) > 0.0);
      CHECK(sign * (f.r(i) - f.r(i - 1)) >= 0.0);
      CHECK(sign * (rp - f.r(i)) >= -1e-12);
    }
    CHECK(f.r(f.r.size() - 1) == doctest::Approx(rp).epsilon(1e-6));
  }
}

TEST_CASE("mean responds affinely to observation increments")
{
  // Same R for all three paths; q(Y1 + Y2) - q(0) = (q(Y1) - q(0)) + (q(Y2) - q(0)).
  SamplePath a = path_with_gain(1.0, 1e-3, 1.0, 4);
  SamplePath b = path_with_gain(1.0, 1e-3, 1.0, 5);
  SamplePath sum = a;
  sum.y = a.y + b.y;
  SamplePath zero = a;
  zero.y.setZero();
  const FilterCoefficients k{0.5, 1.5, 1.0, 0.2};
  const FilterTrajectory fa = run_filter(k, a), fb = run_filter(k, b), fs = run_filter(k, sum), f0 = run_filter(k, zero);
  CHECK(fa.r == fs.r);
  const Eigen::VectorXd gap = (fs.q - f0.q) - (fa.q - f0.q) - (fb.q - f0.q);
  CHECK(gap.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("nonpositive variance is reported")
{
  // A huge step overshoots the Riccati decay.
  const SamplePath path = path_with_gain(30.0, 0.5, 2.0, 6);
  CHECK_THROWS_AS(run_filter(FilterCoefficients{0.0, 0.0, 0.0, 3.0}, path), NumericalError);
}
