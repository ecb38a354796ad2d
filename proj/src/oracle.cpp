#include "robustkb/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "robustkb/error.hpp"
#include "robustkb/parallel.hpp"

namespace robustkb {

namespace {

StateVector f_at(const StateVector& w, double s, const ControlPair& u, const FrameTrajectory& frame)
{
  const FrameNode node = frame.at(s);
  return dynamics_f<double>(w, u.a, u.b, node.eta, node.c);
}

}  // namespace

BackwardTrajectory integrate_backward(const StateVector& x, double t_end, double t_start,
                                      std::span<const ControlPair> segments, const FrameTrajectory& frame,
                                      int substeps_per_segment, double cap)
{
  if (segments.empty()) throw ConfigError("oracle: control schedule is empty");
  if (substeps_per_segment < 1) throw ConfigError("oracle: substeps must be >= 1");
  if (!(t_end > t_start)) throw ConfigError("oracle: t_end must exceed t_start");

  const auto n_seg = static_cast<int>(segments.size());
  const double seg_len = (t_end - t_start) / n_seg;
  const double h = seg_len / substeps_per_segment;

  BackwardTrajectory out;
  StateVector w = x;
  for (int k = n_seg - 1; k >= 0; --k) {
    const ControlPair u = segments[static_cast<std::size_t>(k)];
    const double seg_end = t_start + (k + 1) * seg_len;
    for (int m = 0; m < substeps_per_segment; ++m) {
      const double s = seg_end - m * h;
      const StateVector k1 = f_at(w, s, u, frame);
      const StateVector k2 = f_at(w - 0.5 * h * k1, s - 0.5 * h, u, frame);
      const StateVector k3 = f_at(w - 0.5 * h * k2, s - 0.5 * h, u, frame);
      const StateVector k4 = f_at(w - h * k3, s - h, u, frame);
      const StateVector next = w - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

      if (!next.allFinite() || next.norm() > cap) {
        out.blown_up = true;
        out.blowup_time = s - h;
        out.start = next;
        return out;
      }
      if (!out.exit_time && w.y() > 0.0 && next.y() <= 0.0) {
        const double frac = w.y() / (w.y() - next.y());
        out.exit_time = s - frac * h;
      }
      w = next;
    }
  }
  out.start = w;
  return out;
}

BackwardTrajectory integrate_trajectory_backward(const StateVector& x, double t, std::span<const ControlPair> segments,
                                                 const FrameTrajectory& frame, int substeps_per_segment, double cap)
{
  return integrate_backward(x, t, 0.0, segments, frame, substeps_per_segment, cap);
}

OracleGrid OracleGrid::uniform(double a_lo, double a_hi, int n_a, double b_lo, double b_hi, int n_b, int segments)
{
  if (n_a < 1 || n_b < 1) throw ConfigError("oracle: control grid must be nonempty");
  if (b_lo < 0.0) throw ConfigError("oracle: diffusion controls must be >= 0");
  auto spaced = [](double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    return v;
  };
  OracleGrid g;
  g.a_values = spaced(a_lo, a_hi, n_a);
  g.b_values = spaced(b_lo, b_hi, n_b);
  g.segments = segments;
  return g;
}

OracleGrid OracleGrid::for_cap(double drift_cap, int n_a, int n_b, int segments)
{
  return uniform(-drift_cap, drift_cap, n_a, 0.0, drift_cap, n_b, segments);
}

OracleResult brute_force_search(const StateVector& x, double t, const OracleGrid& grid, const FrameTrajectory& frame,
                                const PenaltyConfig& cfg, const ReferenceParameters& ref)
{
  if (grid.segments < 1 || grid.segments > 4) throw ConfigError("oracle: segment count must lie in [1, 4]");
  if (grid.a_values.empty() || grid.b_values.empty() || grid.a_values.size() > 7 || grid.b_values.size() > 7)
    throw ConfigError("oracle: control grid must be at most 7 x 7");
  if (!(t > 0.0)) throw ConfigError("oracle: t must be > 0");
  for (double b : grid.b_values)
    if (b < 0.0) throw ConfigError("oracle: diffusion controls must be >= 0");

  std::vector<ControlPair> controls;
  for (double a : grid.a_values)
    for (double b : grid.b_values) controls.push_back({a, b});
  // The zero-cost reference control is always part of the enumeration.
  const bool has_reference = std::any_of(controls.begin(), controls.end(), [&](const ControlPair& u) {
    return u.a == ref.alpha && u.b == ref.beta;
  });
  if (!has_reference) controls.push_back({ref.alpha, ref.beta});
  const long n_controls = static_cast<long>(controls.size());
  long total = 1;
  for (int k = 0; k < grid.segments; ++k) total *= n_controls;

  const double seg_len = t / grid.segments;
  const double log_constant = log_estimate_constant(frame.eta_bound(), frame.gain_bound());
  const double log_x = std::log1p(x.squaredNorm());

  std::vector<double> costs(static_cast<std::size_t>(total));
  std::vector<double> excess(static_cast<std::size_t>(total));
  std::vector<char> blown(static_cast<std::size_t>(total));
  const int workers = worker_count();

#pragma omp parallel for num_threads(workers) schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    std::vector<ControlPair> schedule(static_cast<std::size_t>(grid.segments));
    long rem = idx;
    double running = 0.0;
    double effort = 0.0;
    for (int k = 0; k < grid.segments; ++k) {
      const ControlPair u = controls[static_cast<std::size_t>(rem % n_controls)];
      rem /= n_controls;
      schedule[static_cast<std::size_t>(k)] = u;
      running += running_cost(u.a, u.b, cfg, ref) * seg_len;
      effort += (1.0 + std::abs(u.a) + u.b) * seg_len;
    }
    const BackwardTrajectory traj = integrate_trajectory_backward(x, t, schedule, frame, grid.substeps, grid.cap);
    const auto slot = static_cast<std::size_t>(idx);
    blown[slot] = traj.blown_up;
    excess[slot] = traj.blown_up ? -kInfiniteCost<double>
                                 : log_x - std::log1p(traj.start.squaredNorm()) - log_constant * effort;
    costs[slot] = traj.blown_up ? kInfiniteCost<double> : running + initial_cost<double>(traj.start, cfg, ref);
  }

  OracleResult result;
  result.schedules = total;
  result.value = kInfiniteCost<double>;
  result.max_log_estimate_excess = -kInfiniteCost<double>;
  long best = -1;
  for (long idx = 0; idx < total; ++idx) {
    const auto slot = static_cast<std::size_t>(idx);
    result.blown_up += blown[slot];
    result.max_log_estimate_excess = std::max(result.max_log_estimate_excess, excess[slot]);
    if (costs[slot] < result.value) {
      result.value = costs[slot];
      best = idx;
    }
  }
  if (best >= 0) {
    long rem = best;
    for (int k = 0; k < grid.segments; ++k) {
      result.schedule.push_back(controls[static_cast<std::size_t>(rem % n_controls)]);
      rem /= n_controls;
    }
  }
  return result;
}

double brute_force_value(const StateVector& x, double t, const OracleGrid& grid, const FrameTrajectory& frame,
                         const PenaltyConfig& cfg, const ReferenceParameters& ref)
{
  return brute_force_search(x, t, grid, frame, cfg, ref).value;
}

}  // namespace robustkb
