#include "robustkb/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robustkb/error.hpp"

namespace robustkb {

namespace {

[[noreturn]] void invalid(std::string_view prefix, std::string_view field, std::string_view what)
{
  std::ostringstream os;
  os << prefix << "." << field << " " << what;
  throw ConfigError(os.str());
}

void require_finite(std::string_view prefix, std::string_view field, double v)
{
  if (!std::isfinite(v)) invalid(prefix, field, "must be finite");
}

std::string compact(double v)
{
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ObservationGain::ObservationGain(double constant) : breakpoints_{0.0}, values_{constant} {}

ObservationGain::ObservationGain(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values))
{
  if (values_.empty() || breakpoints_.size() != values_.size())
    throw ConfigError("model.c: breakpoints and values must be nonempty and of equal length");
  if (breakpoints_.front() != 0.0) throw ConfigError("model.c: first breakpoint must be 0");
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()) ||
      std::adjacent_find(breakpoints_.begin(), breakpoints_.end()) != breakpoints_.end())
    throw ConfigError("model.c: breakpoints must be strictly increasing");
  for (double v : values_)
    if (!std::isfinite(v)) throw ConfigError("model.c: values must be finite");
}

double ObservationGain::operator()(double t) const
{
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it == breakpoints_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double ObservationGain::max_abs() const
{
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void ModelParameters::validate(std::string_view prefix) const
{
  require_finite(prefix, "alpha", alpha);
  require_finite(prefix, "beta", beta);
  require_finite(prefix, "mu0", mu0);
  require_finite(prefix, "sigma0", sigma0);
  if (beta < 0.0) invalid(prefix, "beta", "must be >= 0");
  if (!(sigma0 > 0.0)) invalid(prefix, "sigma0", "must be > 0");
}

void ReferenceParameters::validate(std::string_view prefix) const
{
  require_finite(prefix, "alpha", alpha);
  require_finite(prefix, "beta", beta);
  require_finite(prefix, "mu0", mu0);
  require_finite(prefix, "sigma0", sigma0);
  if (beta < 0.0) invalid(prefix, "beta", "must be >= 0");
  if (!(sigma0 > 0.0)) invalid(prefix, "sigma0", "must be > 0");
}

StateVector ReferenceParameters::initial_state() const
{
  const double var = sigma0 * sigma0;
  return {mu0 / var, 1.0 / var};
}

void PenaltyConfig::validate(bool pde_run, std::string_view prefix) const
{
  require_finite(prefix, "c_alpha", c_alpha);
  require_finite(prefix, "c_beta", c_beta);
  require_finite(prefix, "w1", w1);
  require_finite(prefix, "w2", w2);
  require_finite(prefix, "k1", k1);
  require_finite(prefix, "k2", k2);
  if (!(c_alpha > 0.0)) invalid(prefix, "c_alpha", "must be > 0");
  if (!(c_beta > 0.0)) invalid(prefix, "c_beta", "must be > 0");
  if (w1 < 0.0) invalid(prefix, "w1", "must be >= 0");
  if (w2 < 0.0) invalid(prefix, "w2", "must be >= 0");
  if (pde_run && !(w2 > 0.0))
    invalid(prefix, "w2", "must be > 0 when the HJB solve is requested (v0 must blow up as z2 -> 0+)");
  if (!(k1 > 0.0)) invalid(prefix, "k1", "must be > 0");
  if (!(k2 >= 1.0)) invalid(prefix, "k2", "must be >= 1");
}

double PenaltyConfig::aversion(double kappa) const
{
  if (is_infinite_cost(kappa)) return kInfiniteCost<double>;
  return std::pow(std::max(kappa, 0.0) / k1, k2);
}

double Functional::operator()(double x) const
{
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return x;
        } else if constexpr (std::is_same_v<T, Square>) {
          return x * x;
        } else if constexpr (std::is_same_v<T, CallPayoff>) {
          return std::max(x - f.strike, 0.0);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return f.value;
        } else {
          if (x <= f.x.front()) return f.y.front();
          if (x >= f.x.back()) return f.y.back();
          const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
          const auto k = static_cast<std::size_t>(it - f.x.begin());
          const double s = (x - f.x[k - 1]) / (f.x[k] - f.x[k - 1]);
          return f.y[k - 1] + s * (f.y[k] - f.y[k - 1]);
        }
      },
      kind);
}

std::vector<double> Functional::kinks() const
{
  if (const auto* c = std::get_if<CallPayoff>(&kind)) return {c->strike};
  if (const auto* t = std::get_if<Tabulated>(&kind)) return t->x;
  return {};
}

void Functional::validate(std::string_view prefix) const
{
  if (const auto* c = std::get_if<CallPayoff>(&kind)) require_finite(prefix, "strike", c->strike);
  if (const auto* c = std::get_if<Constant>(&kind)) require_finite(prefix, "value", c->value);
  if (const auto* t = std::get_if<Tabulated>(&kind)) {
    if (t->x.empty() || t->x.size() != t->y.size())
      invalid(prefix, "x", "and y must be nonempty and of equal length");
    for (std::size_t i = 0; i < t->x.size(); ++i) {
      require_finite(prefix, "x", t->x[i]);
      require_finite(prefix, "y", t->y[i]);
      if (i > 0 && !(t->x[i] > t->x[i - 1])) invalid(prefix, "x", "must be strictly increasing");
    }
  }
}

Functional Functional::call(double strike) { return {"call_K" + compact(strike), CallPayoff{strike}}; }

Functional Functional::constant(double value) { return {"constant_" + compact(value), Constant{value}}; }

Functional Functional::tabulated(std::vector<double> x, std::vector<double> y, std::string name)
{
  return {std::move(name), Tabulated{std::move(x), std::move(y)}};
}

}  // namespace robustkb
