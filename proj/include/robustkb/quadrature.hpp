#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

namespace robustkb {

/// Nodes and weights of a Gauss rule.
struct QuadratureRule
{
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Hermite rule for the weight exp(-x^2), via Golub-Welsch.
QuadratureRule gauss_hermite(int n);
/// n-point Gauss-Legendre rule on [-1, 1], via Golub-Welsch.
QuadratureRule gauss_legendre(int n);

inline constexpr int kDefaultQuadratureNodes = 64;

/// E[g(Z)] for Z ~ N(mu, sigma2) with the 64-node Gauss-Hermite rule.
double gauss_hermite_expectation(const std::function<double(double)>& g, double mu, double sigma2);

/// E[g(Z)] for Z ~ N(mu, sigma2) where g may have kinks at the given
/// abscissae. Without kinks inside mu +- 12 sigma this is
/// gauss_hermite_expectation; otherwise the window is split at the kinks and
/// each smooth piece is integrated against the density with 64-node
/// Gauss-Legendre.
double gaussian_expectation(const std::function<double(double)>& g, double mu, double sigma2,
                            std::span<const double> kinks = {});

}  // namespace robustkb
