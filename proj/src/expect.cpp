#include "robustkb/expect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "robustkb/error.hpp"
#include "robustkb/quadrature.hpp"

namespace robustkb {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

/// Golden-section maximization of a unimodal f on [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol)
{
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Grid-node candidates with finite kappa at one time.
struct CandidateSet
{
  LambdaSnapshot snap;
  const GridSpec* grid = nullptr;
  double eta = 0.0;
  std::vector<int> node_i, node_j;
  Eigen::ArrayXd first, second, penalty;
};

CandidateSet build_candidates(const Functional& phi, double t, const LambdaField& field, double eta_t,
                              const PenaltyConfig& cfg)
{
  CandidateSet set;
  set.snap = field.at(t);
  set.grid = &field.grid;
  set.eta = eta_t;
  const GridSpec& grid = field.grid;
  std::vector<double> first, second, penalty;
  for (int j = 0; j < grid.nodes2; ++j) {
    for (int i = 0; i < grid.nodes1; ++i) {
      const double v = value_from_lambda(set.snap.lambda(i, j), grid.lambda_floor);
      const StateVector x = set.snap.wstar + grid.zeta(i, j);
      const double pen = cfg.aversion(v);
      if (!std::isfinite(pen) || !(x.y() > 0.0)) continue;
      const MeanVariance mv = from_state(x, eta_t);
      const FunctionalMoments m = gaussian_moments(phi, {mv.mu, mv.sigma2});
      set.node_i.push_back(i);
      set.node_j.push_back(j);
      first.push_back(m.first);
      second.push_back(m.second);
      penalty.push_back(pen);
    }
  }
  if (first.empty()) throw NumericalError("robust expectation: every grid node has infinite penalty");
  set.first = Eigen::Map<Eigen::ArrayXd>(first.data(), static_cast<Eigen::Index>(first.size()));
  set.second = Eigen::Map<Eigen::ArrayXd>(second.data(), static_cast<Eigen::Index>(second.size()));
  set.penalty = Eigen::Map<Eigen::ArrayXd>(penalty.data(), static_cast<Eigen::Index>(penalty.size()));
  return set;
}

/// max over candidates of sign * E[phi] - penalty, refined off-grid around the best node.
double penalized_extremum(const Functional& phi, const CandidateSet& set, const PenaltyConfig& cfg, double sign)
{
  Eigen::Index best = 0;
  const double node_best = (sign * set.first - set.penalty).maxCoeff(&best);

  const GridSpec& grid = *set.grid;
  auto objective = [&](const StateVector& zeta) {
    const StateVector x = set.snap.wstar + zeta;
    if (!(x.y() > 0.0)) return -kInfiniteCost<double>;
    const double pen = cfg.aversion(frame_value(set.snap, grid, zeta));
    if (!std::isfinite(pen)) return -kInfiniteCost<double>;
    const MeanVariance mv = from_state(x, set.eta);
    return sign * gaussian_functional(phi, {mv.mu, mv.sigma2}) - pen;
  };

  StateVector zeta = grid.zeta(set.node_i[best], set.node_j[best]);
  const double h1 = grid.h1();
  const double h2 = grid.h2();
  const auto [z1, f1] = golden_max([&](double u) { return objective({u, zeta.y()}); }, zeta.x() - h1,
                                   zeta.x() + h1, 1e-6 * h1);
  double refined = node_best;
  if (f1 > refined) {
    refined = f1;
    zeta.x() = z1;
  }
  const auto [z2, f2] = golden_max([&](double u) { return objective({zeta.x(), u}); }, zeta.y() - h2,
                                   zeta.y() + h2, 1e-6 * h2);
  if (f2 > refined) refined = f2;
  return refined;
}

double minimax_from(const CandidateSet& set, double lower, double upper)
{
  const Eigen::ArrayXd offset = set.second - set.penalty;
  auto g = [&](double xi) { return (offset - 2.0 * xi * set.first).maxCoeff() + xi * xi; };
  const double tol = 1e-4;
  const double lo = lower - 1.0;
  const double hi = upper + 1.0;
  const double xi = golden_max([&](double u) { return -g(u); }, lo, hi, tol).first;
  if (xi - lo > tol && hi - xi > tol) return xi;
  // g is convex and its minimizer lies in the hull of the candidates' first
  // moments; a heavily penalized candidate can put it outside [lower-1, upper+1].
  return golden_max([&](double u) { return -g(u); }, std::min(lo, set.first.minCoeff()),
                    std::max(hi, set.first.maxCoeff()), tol)
      .first;
}

}  // namespace

FunctionalMoments gaussian_moments(const Functional& phi, const GaussianCandidate& cand)
{
  const double mu = cand.mu;
  const double var = cand.sigma2;
  return std::visit(
      [&](const auto& f) -> FunctionalMoments {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return {mu, mu * mu + var};
        } else if constexpr (std::is_same_v<T, Square>) {
          const double m2 = mu * mu;
          return {m2 + var, m2 * m2 + 6.0 * m2 * var + 3.0 * var * var};
        } else if constexpr (std::is_same_v<T, Constant>) {
          return {f.value, f.value * f.value};
        } else if constexpr (std::is_same_v<T, CallPayoff>) {
          const double sigma = std::sqrt(var);
          const double m = mu - f.strike;
          const double d = m / sigma;
          const double cdf = normal_cdf(d);
          const double pdf = normal_pdf(d);
          return {m * cdf + sigma * pdf, (m * m + var) * cdf + m * sigma * pdf};
        } else {
          const std::vector<double> kinks = phi.kinks();
          const double first = gaussian_expectation([&](double x) { return phi(x); }, mu, var, kinks);
          const double second = gaussian_expectation(
              [&](double x) {
                const double y = phi(x);
                return y * y;
              },
              mu, var, kinks);
          return {first, second};
        }
      },
      phi.kind);
}

double gaussian_functional(const Functional& phi, const GaussianCandidate& cand)
{
  if (std::holds_alternative<Tabulated>(phi.kind)) {
    const std::vector<double> kinks = phi.kinks();
    return gaussian_expectation([&](double x) { return phi(x); }, cand.mu, cand.sigma2, kinks);
  }
  return gaussian_moments(phi, cand).first;
}

double upper_expectation(const Functional& phi, double t, const LambdaField& field, double eta_t,
                         const PenaltyConfig& cfg)
{
  const CandidateSet set = build_candidates(phi, t, field, eta_t, cfg);
  return penalized_extremum(phi, set, cfg, 1.0);
}

double lower_expectation(const Functional& phi, double t, const LambdaField& field, double eta_t,
                         const PenaltyConfig& cfg)
{
  const CandidateSet set = build_candidates(phi, t, field, eta_t, cfg);
  return -penalized_extremum(phi, set, cfg, -1.0);
}

double minimax_objective(const Functional& phi, double t, const LambdaField& field, double eta_t,
                         const PenaltyConfig& cfg, double xi)
{
  const CandidateSet set = build_candidates(phi, t, field, eta_t, cfg);
  return (set.second - set.penalty - 2.0 * xi * set.first).maxCoeff() + xi * xi;
}

double minimax_estimate(const Functional& phi, double t, const LambdaField& field, double eta_t,
                        const PenaltyConfig& cfg)
{
  return robust_estimate(phi, t, field, eta_t, cfg).minimax;
}

RobustEstimate robust_estimate(const Functional& phi, double t, const LambdaField& field, double eta_t,
                               const PenaltyConfig& cfg)
{
  const CandidateSet set = build_candidates(phi, t, field, eta_t, cfg);
  RobustEstimate est;
  est.upper = penalized_extremum(phi, set, cfg, 1.0);
  est.lower = -penalized_extremum(phi, set, cfg, -1.0);
  est.minimax = minimax_from(set, est.lower, est.upper);
  return est;
}

}  // namespace robustkb
