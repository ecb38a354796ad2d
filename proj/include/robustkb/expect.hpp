#pragma once

#include "robustkb/hjb.hpp"
#include "robustkb/model.hpp"

namespace robustkb {

/// A candidate posterior N(mu, sigma2).
struct GaussianCandidate
{
  double mu = 0.0;
  double sigma2 = 1.0;
};

/// First and second moments of phi(Z), Z ~ N(mu, sigma2).
struct FunctionalMoments
{
  double first = 0.0;
  double second = 0.0;
};

/// E[phi(Z)]: closed forms for the built-in functionals, quadrature for Tabulated.
double gaussian_functional(const Functional& phi, const GaussianCandidate& cand);
FunctionalMoments gaussian_moments(const Functional& phi, const GaussianCandidate& cand);

/// sup over candidates of E_cand[phi] - (kappa / k1)^k2. Candidates are the
/// grid nodes with finite kappa, followed by one coordinate-wise
/// golden-section pass within one cell of the best node.
/// Throws NumericalError if every node has infinite kappa.
double upper_expectation(const Functional& phi, double t, const LambdaField& field, double eta_t,
                         const PenaltyConfig& cfg);

/// inf over candidates of E_cand[phi] + (kappa / k1)^k2, i.e. -upper(-phi).
double lower_expectation(const Functional& phi, double t, const LambdaField& field, double eta_t,
                         const PenaltyConfig& cfg);

/// argmin_xi max over candidates of E_cand[(phi - xi)^2] - (kappa / k1)^k2,
/// by golden-section search on [lower - 1, upper + 1] to tolerance 1e-4.
double minimax_estimate(const Functional& phi, double t, const LambdaField& field, double eta_t,
                        const PenaltyConfig& cfg);

/// The objective minimized by minimax_estimate, over grid-node candidates.
double minimax_objective(const Functional& phi, double t, const LambdaField& field, double eta_t,
                         const PenaltyConfig& cfg, double xi);

struct RobustEstimate
{
  double lower = 0.0;
  double minimax = 0.0;
  double upper = 0.0;
};

RobustEstimate robust_estimate(const Functional& phi, double t, const LambdaField& field, double eta_t,
                               const PenaltyConfig& cfg);

}  // namespace robustkb
