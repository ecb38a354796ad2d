#include "robustkb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "robustkb/error.hpp"

namespace robustkb {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix,
// weights are mu0 times the squared first components of the eigenvectors.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, double mu0)
{
  const Eigen::Index n = off_diagonal.size() + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    jacobi(i, i + 1) = off_diagonal(i);
    jacobi(i + 1, i) = off_diagonal(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

const QuadratureRule& default_hermite()
{
  static const QuadratureRule rule = gauss_hermite(kDefaultQuadratureNodes);
  return rule;
}

const QuadratureRule& default_legendre()
{
  static const QuadratureRule rule = gauss_legendre(kDefaultQuadratureNodes);
  return rule;
}

constexpr double kWindow = 12.0;

}  // namespace

QuadratureRule gauss_hermite(int n)
{
  if (n < 1) throw ConfigError("gauss_hermite: n must be >= 1");
  Eigen::VectorXd beta(n - 1);
  for (int k = 1; k < n; ++k) beta(k - 1) = std::sqrt(0.5 * k);
  return golub_welsch(beta, std::sqrt(std::numbers::pi));
}

QuadratureRule gauss_legendre(int n)
{
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  Eigen::VectorXd beta(n - 1);
  for (int k = 1; k < n; ++k) beta(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(beta, 2.0);
}

double gauss_hermite_expectation(const std::function<double(double)>& g, double mu, double sigma2)
{
  const QuadratureRule& rule = default_hermite();
  const double scale = std::sqrt(2.0 * sigma2);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights(i) * g(mu + scale * rule.nodes(i));
  return sum / std::sqrt(std::numbers::pi);
}

double gaussian_expectation(const std::function<double(double)>& g, double mu, double sigma2,
                            std::span<const double> kinks)
{
  const double sigma = std::sqrt(sigma2);
  const double lo = mu - kWindow * sigma;
  const double hi = mu + kWindow * sigma;

  std::vector<double> cuts{lo};
  for (double k : kinks)
    if (k > lo && k < hi) cuts.push_back(k);
  if (cuts.size() == 1) return gauss_hermite_expectation(g, mu, sigma2);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const QuadratureRule& rule = default_legendre();
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double half = 0.5 * (cuts[k + 1] - cuts[k]);
    const double mid = 0.5 * (cuts[k + 1] + cuts[k]);
    double piece = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes(i);
      const double u = (x - mu) / sigma;
      piece += rule.weights(i) * g(x) * std::exp(-0.5 * u * u);
    }
    sum += half * piece;
  }
  return sum * norm;
}

}  // namespace robustkb
