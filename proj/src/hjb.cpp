#include "robustkb/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "robustkb/csv.hpp"
#include "robustkb/error.hpp"
#include "robustkb/parallel.hpp"

namespace robustkb {

namespace {

struct Quadratic
{
  // Q(a, b) = lin_a a + lin_b b - s c_alpha (a - alpha*)^2 - s c_beta (b - beta*)^2
  double lin_a, lin_b, s, c_alpha, c_beta, alpha_ref, beta_ref;

  double operator()(double a, double b) const
  {
    const double da = a - alpha_ref;
    const double db = b - beta_ref;
    return lin_a * a + lin_b * b - s * (c_alpha * da * da + c_beta * db * db);
  }
};

HamiltonianResult maximize_on_triangle(const Quadratic& q, double cap)
{
  double a = q.alpha_ref + q.lin_a / (2.0 * q.s * q.c_alpha);
  double b = std::max(0.0, q.beta_ref + q.lin_b / (2.0 * q.s * q.c_beta));
  if (std::abs(a) + b <= cap) return {q(a, b), a, b};

  // The concave maximum over the triangle {b >= 0, |a| + b <= cap} lies on its boundary.
  const double curv = 2.0 * q.s * (q.c_alpha + q.c_beta);
  HamiltonianResult best{-kInfiniteCost<double>, 0.0, 0.0};
  auto consider = [&](double ca, double cb) {
    const double v = q(ca, cb);
    if (v > best.value) best = {v, ca, cb};
  };
  // b = 0
  a = std::clamp(q.alpha_ref + q.lin_a / (2.0 * q.s * q.c_alpha), -cap, cap);
  consider(a, 0.0);
  // a + b = cap, a in [0, cap]
  a = (q.lin_a - q.lin_b + 2.0 * q.s * (q.c_alpha * q.alpha_ref + q.c_beta * (cap - q.beta_ref))) / curv;
  a = std::clamp(a, 0.0, cap);
  consider(a, cap - a);
  // -a + b = cap, a in [-cap, 0]
  a = (q.lin_a + q.lin_b + 2.0 * q.s * (q.c_alpha * q.alpha_ref - q.c_beta * (cap - q.beta_ref))) / curv;
  a = std::clamp(a, -cap, 0.0);
  consider(a, cap + a);
  return best;
}

// Per-step data shared by all nodes.
struct StepContext
{
  FrameNode node;
  StateVector reference_drift;  // f(w*, alpha*, beta*)
};

StepContext step_context(const FrameTrajectory& frame, const ReferenceParameters& ref, double t)
{
  StepContext ctx;
  ctx.node = frame.at(t);
  ctx.reference_drift = dynamics_f<double>(ctx.node.wstar, ref.alpha, ref.beta, ctx.node.eta, ctx.node.c);
  return ctx;
}

HamiltonianResult hamiltonian_at(const StateVector& zeta, const Eigen::Vector2d& grad, double lambda,
                                 const StepContext& ctx, const PenaltyConfig& cfg, const ReferenceParameters& ref,
                                 double cap, double s_min)
{
  const ControlAffineDynamics dyn = control_affine_form(ctx.node.wstar + zeta, ctx.node.eta, ctx.node.c);
  const Quadratic q{dyn.along_a.dot(grad),
                    dyn.along_b.dot(grad),
                    std::max(lambda * lambda, s_min),
                    cfg.c_alpha,
                    cfg.c_beta,
                    ref.alpha,
                    ref.beta};
  HamiltonianResult res = maximize_on_triangle(q, cap);
  res.value += (dyn.drift0 - ctx.reference_drift).dot(grad);
  return res;
}

// Hamiltonian at one node as a function of the gradient, with the control-affine
// split precomputed. H is convex in p and dH/dp = drift at the maximizer.
class NodeHamiltonian
{
 public:
  struct Eval
  {
    Eigen::Vector2d p;
    double value;
    StateVector drift;
    double a;
    double b;
  };

  NodeHamiltonian(const StateVector& zeta, double lambda, const StepContext& ctx, const PenaltyConfig& cfg,
                  const ReferenceParameters& ref, double cap, double s_min)
      : dyn_(control_affine_form(ctx.node.wstar + zeta, ctx.node.eta, ctx.node.c)),
        base_(dyn_.drift0 - ctx.reference_drift),
        s_(std::max(lambda * lambda, s_min)),
        cfg_(cfg),
        ref_(ref),
        cap_(cap)
  {
  }

  Eval operator()(const Eigen::Vector2d& p) const
  {
    const Quadratic q{dyn_.along_a.dot(p), dyn_.along_b.dot(p), s_, cfg_.c_alpha, cfg_.c_beta, ref_.alpha, ref_.beta};
    const HamiltonianResult r = maximize_on_triangle(q, cap_);
    return {p, r.value + base_.dot(p), base_ + r.a * dyn_.along_a + r.b * dyn_.along_b, r.a, r.b};
  }

 private:
  ControlAffineDynamics dyn_;
  StateVector base_;
  double s_;
  const PenaltyConfig& cfg_;
  const ReferenceParameters& ref_;
  double cap_;
};

// Minimizes a convex function of one coordinate x on [lo, hi], given
// eval(x) whose drift[k] is the (nondecreasing) derivative. Illinois
// regula falsi on the derivative; exact in a few steps on quadratic pieces.
template <typename F>
NodeHamiltonian::Eval minimize_convex(F&& eval, double lo, double hi, int k)
{
  NodeHamiltonian::Eval e_lo = eval(lo);
  if (e_lo.drift[k] >= 0.0) return e_lo;
  NodeHamiltonian::Eval e_hi = eval(hi);
  if (e_hi.drift[k] <= 0.0) return e_hi;
  double f_lo = e_lo.drift[k];
  double f_hi = e_hi.drift[k];
  NodeHamiltonian::Eval e = e_lo;
  int side = 0;
  for (int it = 0; it < 100 && hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    double x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    e = eval(x);
    const double f = e.drift[k];
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = x;
      f_lo = f;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      f_hi = f;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  return e;
}

// sup_u sum_i (f_i^+ back_i + f_i^- fwd_i) - s gamma. Where back_i <= fwd_i the
// summand is concave in u and, by the minimax theorem, the sup equals the
// minimum of H over p_i in [back_i, fwd_i]; where back_i > fwd_i it is the
// larger of the two one-sided values.
NodeHamiltonian::Eval monotone_upwind(const NodeHamiltonian& h, const Eigen::Vector2d& back, const Eigen::Vector2d& fwd)
{
  const bool min1 = back.x() <= fwd.x();
  const bool min2 = back.y() <= fwd.y();
  auto along1 = [&](double p2) {
    if (min1) return minimize_convex([&](double x) { return h({x, p2}); }, back.x(), fwd.x(), 0);
    const auto e_b = h({back.x(), p2});
    const auto e_f = h({fwd.x(), p2});
    return e_b.value >= e_f.value ? e_b : e_f;
  };
  if (min2) return minimize_convex(along1, back.y(), fwd.y(), 1);
  const auto e_b = along1(back.y());
  const auto e_f = along1(fwd.y());
  return e_b.value >= e_f.value ? e_b : e_f;
}

void update_extremes(double v, double& lo, double& hi)
{
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

}  // namespace

void GridSpec::validate(std::string_view prefix) const
{
  auto fail = [&](std::string_view field, std::string_view what) {
    std::ostringstream os;
    os << prefix << "." << field << " " << what;
    throw ConfigError(os.str());
  };
  if (nodes1 < 5 || nodes1 % 2 == 0) fail("N1", "must be odd and >= 5");
  if (nodes2 < 5 || nodes2 % 2 == 0) fail("N2", "must be odd and >= 5");
  if (!(half_width1 > 0.0) || !std::isfinite(half_width1)) fail("Z1", "must be > 0");
  if (!(half_width2 > 0.0) || !std::isfinite(half_width2)) fail("Z2", "must be > 0");
  if (!(drift_cap > 0.0) || !std::isfinite(drift_cap)) fail("M_trunc", "must be > 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) fail("theta", "must lie in (0, 1]");
  if (!(s_min > 0.0)) fail("s_min", "must be > 0");
  if (!(lambda_floor > 0.0 && lambda_floor < 1.0)) fail("lambda_floor", "must lie in (0, 1)");
  if (!(dt_floor > 0.0)) fail("dt_floor", "must be > 0");
}

StateVector relative_dynamics(const StateVector& zeta, const FrameNode& node, double a, double b,
                              const ReferenceParameters& ref)
{
  return dynamics_f<double>(node.wstar + zeta, a, b, node.eta, node.c) -
         dynamics_f<double>(node.wstar, ref.alpha, ref.beta, node.eta, node.c);
}

HamiltonianResult pointwise_hamiltonian(const StateVector& zeta, const Eigen::Vector2d& grad, double lambda,
                                        const FrameNode& node, const PenaltyConfig& cfg,
                                        const ReferenceParameters& ref, double drift_cap, double s_min)
{
  StepContext ctx;
  ctx.node = node;
  ctx.reference_drift = dynamics_f<double>(node.wstar, ref.alpha, ref.beta, node.eta, node.c);
  return hamiltonian_at(zeta, grad, lambda, ctx, cfg, ref, drift_cap, s_min);
}

double value_from_lambda(double lambda, double lambda_floor)
{
  if (lambda >= -lambda_floor) return kInfiniteCost<double>;
  return std::max(0.0, -1.0 - 1.0 / lambda);
}

ArrayXX<double> initial_lambda(const GridSpec& grid, const StateVector& wstar0, const PenaltyConfig& cfg,
                               const ReferenceParameters& ref)
{
  ArrayXX<double> lambda(grid.nodes1, grid.nodes2);
  for (int j = 0; j < grid.nodes2; ++j)
    for (int i = 0; i < grid.nodes1; ++i)
      lambda(i, j) = lambda_from_value(initial_cost<double>(wstar0 + grid.zeta(i, j), cfg, ref));
  return lambda;
}

LambdaSnapshot LambdaField::at(double t) const
{
  if (snapshots.empty()) throw ConfigError("lambda field has no snapshots");
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (t < t_min() - tol || t > t_max() + tol) {
    std::ostringstream os;
    os << "time " << t << " outside solved range [" << t_min() << ", " << t_max() << "]";
    throw ConfigError(os.str());
  }
  for (const auto& snap : snapshots)
    if (std::abs(snap.t - t) <= tol) return snap;
  const auto it = std::upper_bound(snapshots.begin(), snapshots.end(), t,
                                   [](double v, const LambdaSnapshot& s) { return v < s.t; });
  const LambdaSnapshot& hi = *it;
  const LambdaSnapshot& lo = *(it - 1);
  const double s = (t - lo.t) / (hi.t - lo.t);
  LambdaSnapshot out;
  out.t = t;
  out.wstar = (1.0 - s) * lo.wstar + s * hi.wstar;
  out.eta = (1.0 - s) * lo.eta + s * hi.eta;
  out.lambda = (1.0 - s) * lo.lambda + s * hi.lambda;
  return out;
}

LambdaField solve_lambda(const GridSpec& grid, const FrameTrajectory& frame, const PenaltyConfig& cfg,
                         const ReferenceParameters& ref, std::span<const double> output_times)
{
  grid.validate();
  cfg.validate(true);
  ref.validate();
  if (output_times.empty()) throw ConfigError("output_times must not be empty");
  std::vector<double> outputs(output_times.begin(), output_times.end());
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  if (outputs.front() < 0.0 || outputs.back() > frame.horizon() * (1.0 + 1e-12))
    throw ConfigError("output_times must lie within the frame's time range");

  const int n1 = grid.nodes1;
  const int n2 = grid.nodes2;
  const double h1 = grid.h1();
  const double h2 = grid.h2();
  const double cap = grid.drift_cap;
  const TransportScheme scheme = grid.scheme;
  const bool lax_friedrichs = scheme == TransportScheme::LocalLaxFriedrichs;
  const int workers = worker_count();

  LambdaField field;
  field.grid = grid;
  SolverDiagnostics& diag = field.diagnostics;

  ArrayXX<double> lambda = initial_lambda(grid, frame.at(0.0).wstar, cfg, ref);
  ArrayXX<double> next = ArrayXX<double>::Zero(n1, n2);
  ArrayXX<double> drift1 = ArrayXX<double>::Zero(n1, n2);
  ArrayXX<double> drift2 = ArrayXX<double>::Zero(n1, n2);
  ArrayXX<double> cost = ArrayXX<double>::Zero(n1, n2);
  ArrayXX<double> transport = ArrayXX<double>::Zero(n1, n2);
  ArrayXX<double> diss1 = ArrayXX<double>::Zero(n1, n2);
  ArrayXX<double> diss2 = ArrayXX<double>::Zero(n1, n2);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active(n1, n2);

  diag.min_lambda = diag.min_raw_lambda = lambda.minCoeff();
  diag.max_lambda = diag.max_raw_lambda = lambda.maxCoeff();
  diag.min_dt = kInfiniteCost<double>;

  auto take_snapshot = [&](double t) {
    const FrameNode node = frame.at(t);
    field.snapshots.push_back({t, node.wstar, node.eta, lambda});
  };

  std::size_t next_output = 0;
  if (outputs.front() == 0.0) {
    take_snapshot(0.0);
    ++next_output;
  }

  double t = 0.0;
  while (next_output < outputs.size()) {
    const StepContext ctx = step_context(frame, ref, t);

    // Pass 1: maximizer, drift and running cost at each node.
    double max_rate = 0.0;
#pragma omp parallel for num_threads(workers) schedule(static) reduction(max : max_rate)
    for (int j = 0; j < n2; ++j) {
      for (int i = 0; i < n1; ++i) {
        drift1(i, j) = drift2(i, j) = cost(i, j) = 0.0;
        const bool interior = i > 0 && j > 0 && i < n1 - 1 && j < n2 - 1;
        const StateVector zeta = grid.zeta(i, j);
        active(i, j) = interior && ctx.node.wstar.y() + zeta.y() > 0.0;
        if (!active(i, j)) continue;
        const double lam = lambda(i, j);
        const NodeHamiltonian h(zeta, lam, ctx, cfg, ref, cap, grid.s_min);
        StateVector d;
        double a, b;
        if (scheme == TransportScheme::Upwind) {
          const Eigen::Vector2d back((lam - lambda(i - 1, j)) / h1, (lam - lambda(i, j - 1)) / h2);
          const Eigen::Vector2d fwd((lambda(i + 1, j) - lam) / h1, (lambda(i, j + 1) - lam) / h2);
          const NodeHamiltonian::Eval e = monotone_upwind(h, back, fwd);
          d = e.drift;
          a = e.a;
          b = e.b;
          transport(i, j) = d.dot(e.p);
        } else {
          const Eigen::Vector2d grad((lambda(i + 1, j) - lambda(i - 1, j)) / (2.0 * h1),
                                     (lambda(i, j + 1) - lambda(i, j - 1)) / (2.0 * h2));
          const NodeHamiltonian::Eval e = h(grad);
          d = e.drift;
          a = e.a;
          b = e.b;
        }
        drift1(i, j) = d.x();
        drift2(i, j) = d.y();
        cost(i, j) = running_cost(a, b, cfg, ref);
        if (!lax_friedrichs)
          max_rate = std::max(max_rate, std::abs(d.x()) / h1 + std::abs(d.y()) / h2 + 2.0 * std::abs(lam) * cost(i, j));
      }
    }
    if (lax_friedrichs) {
#pragma omp parallel for num_threads(workers) schedule(static) reduction(max : max_rate)
      for (int j = 1; j < n2 - 1; ++j) {
        for (int i = 1; i < n1 - 1; ++i) {
          if (!active(i, j)) continue;
          diss1(i, j) = std::max({std::abs(drift1(i - 1, j)), std::abs(drift1(i, j)), std::abs(drift1(i + 1, j))});
          diss2(i, j) = std::max({std::abs(drift2(i, j - 1)), std::abs(drift2(i, j)), std::abs(drift2(i, j + 1))});
          max_rate = std::max(max_rate,
                              diss1(i, j) / h1 + diss2(i, j) / h2 + 2.0 * std::abs(lambda(i, j)) * cost(i, j));
        }
      }
    }
    if (!std::isfinite(max_rate)) {
      std::ostringstream os;
      os << "HJB solve: non-finite drift at t=" << t;
      throw NumericalError(os.str());
    }

    const double target = outputs[next_output];
    double dt = max_rate > 0.0 ? grid.cfl_safety / max_rate : target - t;
    if (dt < grid.dt_floor) {
      std::ostringstream os;
      os << "HJB solve: time step " << dt << " fell below the floor " << grid.dt_floor << " at t=" << t;
      throw NumericalError(os.str());
    }
    const bool lands = t + dt >= target;
    if (lands) dt = target - t;

    // Pass 2: explicit update.
    double step_courant = 0.0;
    double raw_lo = kInfiniteCost<double>;
    double raw_hi = -kInfiniteCost<double>;
    bool nan_seen = false;
#pragma omp parallel for num_threads(workers) schedule(static) reduction(max : step_courant, raw_hi) \
    reduction(min : raw_lo) reduction(|| : nan_seen)
    for (int j = 0; j < n2; ++j) {
      for (int i = 0; i < n1; ++i) {
        if (!active(i, j)) {
          next(i, j) = 0.0;
          continue;
        }
        const double lam = lambda(i, j);
        const double d1 = drift1(i, j);
        const double d2 = drift2(i, j);
        double flux;
        double courant;
        if (scheme == TransportScheme::Upwind) {
          flux = transport(i, j);
          courant = dt * (std::abs(d1) / h1 + std::abs(d2) / h2);
        } else if (lax_friedrichs) {
          const double a1 = diss1(i, j);
          const double a2 = diss2(i, j);
          flux = d1 * (lambda(i + 1, j) - lambda(i - 1, j)) / (2.0 * h1) +
                      d2 * (lambda(i, j + 1) - lambda(i, j - 1)) / (2.0 * h2) -
                      a1 * (lambda(i + 1, j) - 2.0 * lam + lambda(i - 1, j)) / (2.0 * h1) -
                      a2 * (lambda(i, j + 1) - 2.0 * lam + lambda(i, j - 1)) / (2.0 * h2);
          courant = dt * (a1 / h1 + a2 / h2);
        } else {
          const double g1 = d1 > 0.0 ? (lam - lambda(i - 1, j)) / h1 : (lambda(i + 1, j) - lam) / h1;
          const double g2 = d2 > 0.0 ? (lam - lambda(i, j - 1)) / h2 : (lambda(i, j + 1) - lam) / h2;
          flux = d1 * g1 + d2 * g2;
          courant = dt * (std::abs(d1) / h1 + std::abs(d2) / h2);
        }
        const double raw = lam - dt * (flux - lam * lam * cost(i, j));
        if (std::isnan(raw)) nan_seen = true;
        raw_lo = std::min(raw_lo, raw);
        raw_hi = std::max(raw_hi, raw);
        step_courant = std::max(step_courant, courant);
        next(i, j) = std::clamp(raw, -1.0, 0.0);
      }
    }
    if (nan_seen) {
      std::ostringstream os;
      os << "HJB solve: NaN produced at t=" << t;
      throw NumericalError(os.str());
    }

    lambda.swap(next);
    t = lands ? target : t + dt;
    ++diag.steps;
    diag.last_dt = dt;
    diag.min_dt = std::min(diag.min_dt, dt);
    diag.max_dt = std::max(diag.max_dt, dt);
    diag.max_courant = std::max(diag.max_courant, step_courant);
    if (raw_hi >= raw_lo) {
      update_extremes(raw_lo, diag.min_raw_lambda, diag.max_raw_lambda);
      update_extremes(raw_hi, diag.min_raw_lambda, diag.max_raw_lambda);
    }
    update_extremes(lambda.minCoeff(), diag.min_lambda, diag.max_lambda);
    update_extremes(lambda.maxCoeff(), diag.min_lambda, diag.max_lambda);

    while (next_output < outputs.size() && outputs[next_output] <= t) {
      take_snapshot(outputs[next_output]);
      ++next_output;
    }
  }
  if (diag.steps == 0) diag.min_dt = 0.0;
  return field;
}

double interpolate_lambda(const LambdaSnapshot& snap, const GridSpec& grid, const StateVector& zeta)
{
  const double u = (zeta.x() + grid.half_width1) / grid.h1();
  const double w = (zeta.y() + grid.half_width2) / grid.h2();
  constexpr double slack = 1e-9;
  const double last1 = grid.nodes1 - 1;
  const double last2 = grid.nodes2 - 1;
  if (!(u >= -slack && u <= last1 + slack && w >= -slack && w <= last2 + slack)) return 0.0;
  const double uc = std::clamp(u, 0.0, last1);
  const double wc = std::clamp(w, 0.0, last2);
  const int i = std::min(static_cast<int>(uc), grid.nodes1 - 2);
  const int j = std::min(static_cast<int>(wc), grid.nodes2 - 2);
  const double fu = uc - i;
  const double fw = wc - j;
  const auto& l = snap.lambda;
  return (1.0 - fu) * (1.0 - fw) * l(i, j) + fu * (1.0 - fw) * l(i + 1, j) + (1.0 - fu) * fw * l(i, j + 1) +
         fu * fw * l(i + 1, j + 1);
}

double frame_value(const LambdaSnapshot& snap, const GridSpec& grid, const StateVector& zeta)
{
  return value_from_lambda(interpolate_lambda(snap, grid, zeta), grid.lambda_floor);
}

double kappa_lookup(const LambdaField& field, double t, double mu, double sigma2, double eta_t)
{
  const LambdaSnapshot snap = field.at(t);
  const StateVector zeta = to_state(mu, sigma2, eta_t) - snap.wstar;
  return frame_value(snap, field.grid, zeta);
}

void write_snapshots(const LambdaField& field, const std::string& directory)
{
  std::filesystem::create_directories(directory);
  const GridSpec& grid = field.grid;
  for (std::size_t k = 0; k < field.snapshots.size(); ++k) {
    const LambdaSnapshot& snap = field.snapshots[k];
    CsvTable table{{"zeta1", "zeta2", "lambda", "v"}, {}};
    table.rows.reserve(static_cast<std::size_t>(grid.nodes1) * grid.nodes2);
    for (int j = 0; j < grid.nodes2; ++j)
      for (int i = 0; i < grid.nodes1; ++i) {
        const double lam = snap.lambda(i, j);
        table.add_row({grid.zeta1(i), grid.zeta2(j), lam, value_from_lambda(lam, grid.lambda_floor)});
      }
    write_csv(directory + "/lambda_t" + std::to_string(k) + ".csv", table);
  }
}

}  // namespace robustkb
