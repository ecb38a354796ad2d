#include <cmath>
#include <numbers>

#include <doctest.h>

#include "robustkb/quadrature.hpp"

using namespace robustkb;

TEST_CASE("Gauss-Hermite rule")
{
  const QuadratureRule r = gauss_hermite(64);
  CHECK(r.nodes.size() == 64);
  CHECK(r.weights.sum() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  // Odd moments vanish; int x^2 e^{-x^2} = sqrt(pi) / 2.
  CHECK(std::abs(r.weights.dot(r.nodes)) < 1e-13);
  CHECK(r.weights.dot(r.nodes.cwiseAbs2()) == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-13));
  // Three-point rule has nodes 0, +-sqrt(3/2).
  const QuadratureRule r3 = gauss_hermite(3);
  CHECK(r3.nodes.cwiseAbs().maxCoeff() == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre rule")
{
  const QuadratureRule r = gauss_legendre(5);
  CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  // Exact for degree 9: int_{-1}^{1} x^8 = 2/9.
  CHECK(r.weights.dot(r.nodes.array().pow(8).matrix()) == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("Gaussian expectations")
{
  auto sq = [](double x) { return x * x; };
  CHECK(gauss_hermite_expectation(sq, 1.5, 0.3) == doctest::Approx(1.5 * 1.5 + 0.3).epsilon(1e-13));
  auto ex = [](double x) { return std::exp(x); };
  CHECK(gauss_hermite_expectation(ex, 0.2, 0.5) == doctest::Approx(std::exp(0.2 + 0.25)).epsilon(1e-12));

  // Kinked payoff: E[(Z - K)^+] closed form.
  const double mu = 0.3, s2 = 0.8, k = 1.1, s = std::sqrt(s2);
  const double d = (mu - k) / s;
  const double pdf = std::exp(-0.5 * d * d) / std::sqrt(2 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-d / std::sqrt(2.0));
  const double exact = (mu - k) * cdf + s * pdf;
  const double kinks[] = {k};
  auto call = [k](double x) { return std::max(x - k, 0.0); };
  CHECK(std::abs(gaussian_expectation(call, mu, s2, kinks) - exact) < 1e-12);
  // Far from the kink the plain rule is used and is exact enough.
  const double far[] = {50.0};
  CHECK(gaussian_expectation(sq, 1.0, 1.0, far) == doctest::Approx(2.0).epsilon(1e-13));
}
