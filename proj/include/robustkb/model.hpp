#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "robustkb/types.hpp"

namespace robustkb {

/// Observation gain c(t), piecewise constant: values[k] holds on
/// [breakpoints[k], breakpoints[k+1]), the last value extends to infinity.
/// breakpoints[0] is always 0.
class ObservationGain
{
 public:
  ObservationGain() : ObservationGain(1.0) {}
  explicit ObservationGain(double constant);
  ObservationGain(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double t) const;
  double max_abs() const;
  bool is_constant() const { return values_.size() == 1; }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Coefficients of the signal/observation pair under the "true" model.
struct ModelParameters
{
  double alpha = 0.5;
  double beta = 1.5;
  ObservationGain c{1.0};
  double mu0 = 1.0;
  double sigma0 = 0.2;

  void validate(std::string_view prefix = "model") const;
};

/// Estimated parameters; they carry zero penalty.
struct ReferenceParameters
{
  double alpha = 0.0;
  double beta = 1.0;
  double mu0 = 0.0;
  double sigma0 = 1.0;

  void validate(std::string_view prefix = "reference") const;

  /// Transformed initial point (mu0/sigma0^2, 1/sigma0^2).
  StateVector initial_state() const;
};

/// Quadratic penalty family:
///   gamma(a, b) = c_alpha (a - alpha*)^2 + c_beta (b - beta*)^2
///   v0(z)       = w1 (z1 - z1*)^2 + w2 (z2 - z2*)^2 on z2 > 0, +inf otherwise
/// and the uncertainty-aversion pair (k1, k2) applied as (kappa / k1)^k2.
struct PenaltyConfig
{
  double c_alpha = 5.0;
  double c_beta = 10.0;
  double w1 = 15.0;
  double w2 = 15.0;
  double k1 = 10.0;
  double k2 = 5.0;

  /// With pde_run set, w2 must be strictly positive so that v0 blows up as
  /// z2 -> 0+.
  void validate(bool pde_run, std::string_view prefix = "penalty") const;

  /// (kappa / k1)^k2, infinite for infinite kappa.
  double aversion(double kappa) const;
};

template <typename Scalar>
Scalar running_cost(Scalar a, Scalar b, const PenaltyConfig& cfg, const ReferenceParameters& ref)
{
  const Scalar da = a - Scalar(ref.alpha);
  const Scalar db = b - Scalar(ref.beta);
  return Scalar(cfg.c_alpha) * da * da + Scalar(cfg.c_beta) * db * db;
}

template <typename Scalar>
Scalar initial_cost(const Vector2<Scalar>& z, const PenaltyConfig& cfg, const ReferenceParameters& ref)
{
  if (!(z.y() > Scalar(0))) return kInfiniteCost<Scalar>;
  const StateVector zref = ref.initial_state();
  const Scalar d1 = z.x() - Scalar(zref.x());
  const Scalar d2 = z.y() - Scalar(zref.y());
  return Scalar(cfg.w1) * d1 * d1 + Scalar(cfg.w2) * d2 * d2;
}

// Functionals phi whose robust expectation E(phi(X_t)) is evaluated.

struct Identity {};
struct Square {};
struct CallPayoff
{
  double strike = 0.0;
};
struct Constant
{
  double value = 0.0;
};
/// Piecewise-linear interpolant through (x, y), constant outside [x.front(), x.back()].
struct Tabulated
{
  std::vector<double> x;
  std::vector<double> y;
};

using FunctionalKind = std::variant<Identity, Square, CallPayoff, Constant, Tabulated>;

struct Functional
{
  std::string name;
  FunctionalKind kind;

  double operator()(double x) const;
  /// Abscissae where phi is not smooth.
  std::vector<double> kinks() const;
  void validate(std::string_view prefix = "functional") const;

  static Functional identity() { return {"identity", Identity{}}; }
  static Functional square() { return {"square", Square{}}; }
  static Functional call(double strike);
  static Functional constant(double value);
  static Functional tabulated(std::vector<double> x, std::vector<double> y, std::string name = "tabulated");
};

}  // namespace robustkb
