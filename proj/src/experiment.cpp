#include "robustkb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "robustkb/csv.hpp"
#include "robustkb/error.hpp"
#include "robustkb/expect.hpp"
#include "robustkb/plot.hpp"

namespace robustkb {

namespace {

namespace fs = std::filesystem;

std::string in_dir(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// Prefixes the stage name while keeping the exception type (and exit code).
template <typename F>
void run_stage(const char* stage, F&& body)
{
  try {
    body();
  } catch (const MissingInputError& e) {
    throw MissingInputError(std::string(stage) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(std::string(stage) + ": " + e.what());
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

double interpolate(const Eigen::VectorXd& times, const Eigen::VectorXd& values, double t)
{
  const Eigen::Index n = times.size();
  if (t <= times(0)) return values(0);
  if (t >= times(n - 1)) return values(n - 1);
  const auto* begin = times.data();
  const Eigen::Index k = std::upper_bound(begin, begin + n, t) - begin;
  const double s = (t - times(k - 1)) / (times(k) - times(k - 1));
  if (s == 0.0) return values(k - 1);
  return (1.0 - s) * values(k - 1) + s * values(k);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

}  // namespace

void stage_simulate(const ExperimentConfig& cfg, const std::string& dir)
{
  run_stage("simulate", [&] {
    const SamplePath path = simulate_paths(cfg.model, cfg.simulation.dt, cfg.simulation.horizon, cfg.simulation.seed);
    CsvTable table{{"t", "x", "y", "eta"}, {}};
    for (Eigen::Index i = 0; i < path.times.size(); ++i)
      table.add_row({path.times(i), path.x(i), path.y(i), path.eta(i)});
    write_csv(in_dir(dir, "paths.csv"), table);
  });
}

SamplePath load_paths(const ExperimentConfig& cfg, const std::string& dir)
{
  const CsvTable table = read_csv(in_dir(dir, "paths.csv"));
  SamplePath path;
  path.dt = cfg.simulation.dt;
  path.seed = cfg.simulation.seed;
  path.times = to_vector(table.numeric_column("t"));
  path.x = to_vector(table.numeric_column("x"));
  path.y = to_vector(table.numeric_column("y"));
  path.eta = to_vector(table.numeric_column("eta"));
  path.c.resize(path.times.size());
  for (Eigen::Index i = 0; i < path.times.size(); ++i) path.c(i) = cfg.model.c(path.times(i));
  path.validate();
  if (path.times.size() != step_count(cfg.simulation.dt, cfg.simulation.horizon) + 1)
    throw ConfigError("paths.csv does not match simulation.dt/T; rerun simulate");
  return path;
}

void stage_filter(const ExperimentConfig& cfg, const std::string& dir)
{
  run_stage("filter", [&] {
    const SamplePath path = load_paths(cfg, dir);
    const FilterTrajectory truth = run_filter(cfg.model, path);
    const FilterTrajectory est = run_filter(cfg.reference, path);
    CsvTable table{{"t", "q_true", "r_true", "q_est", "r_est"}, {}};
    for (Eigen::Index i = 0; i < path.times.size(); ++i)
      table.add_row({path.times(i), truth.q(i), truth.r(i), est.q(i), est.r(i)});
    write_csv(in_dir(dir, "filters.csv"), table);
  });
}

FilterPair load_filters(const std::string& dir)
{
  const CsvTable table = read_csv(in_dir(dir, "filters.csv"));
  FilterPair out;
  const Eigen::VectorXd times = to_vector(table.numeric_column("t"));
  if (times.size() < 2) throw ConfigError("filters.csv has fewer than two rows");
  for (FilterTrajectory* f : {&out.truth, &out.estimate}) {
    f->times = times;
    f->dt = times(1) - times(0);
  }
  out.truth.q = to_vector(table.numeric_column("q_true"));
  out.truth.r = to_vector(table.numeric_column("r_true"));
  out.estimate.q = to_vector(table.numeric_column("q_est"));
  out.estimate.r = to_vector(table.numeric_column("r_est"));
  return out;
}

void stage_solve_hjb(const ExperimentConfig& cfg, const std::string& dir)
{
  run_stage("solve-hjb", [&] {
    const SamplePath path = load_paths(cfg, dir);
    const FilterPair filters = load_filters(dir);
    if (filters.estimate.times.size() != path.times.size())
      throw ConfigError("filters.csv and paths.csv have different lengths; rerun filter");
    const FrameTrajectory frame = make_frame(path.times, filters.estimate.q, filters.estimate.r, path.eta, path.c);
    const LambdaField field = solve_lambda(cfg.grid, frame, cfg.penalty, cfg.reference, cfg.output_times);

    const std::string lambda_dir = in_dir(dir, "lambda");
    write_snapshots(field, lambda_dir);
    CsvTable times{{"index", "t", "wstar1", "wstar2", "eta"}, {}};
    for (std::size_t k = 0; k < field.snapshots.size(); ++k) {
      const LambdaSnapshot& s = field.snapshots[k];
      times.add_row({static_cast<double>(k), s.t, s.wstar.x(), s.wstar.y(), s.eta});
    }
    write_csv(in_dir(lambda_dir, "lambda_times.csv"), times);

    const SolverDiagnostics& d = field.diagnostics;
    CsvTable diag{{"quantity", "value"}, {}};
    auto put = [&](const char* name, double v) { diag.add_row(std::vector<std::string>{name, format_number(v)}); };
    put("steps", static_cast<double>(d.steps));
    put("max_courant", d.max_courant);
    put("min_dt", d.min_dt);
    put("max_dt", d.max_dt);
    put("min_lambda", d.min_lambda);
    put("max_lambda", d.max_lambda);
    put("min_raw_lambda", d.min_raw_lambda);
    put("max_raw_lambda", d.max_raw_lambda);
    write_csv(in_dir(lambda_dir, "solver.csv"), diag);
  });
}

LambdaField load_lambda_field(const ExperimentConfig& cfg, const std::string& dir)
{
  const std::string lambda_dir = in_dir(dir, "lambda");
  const CsvTable times = read_csv(in_dir(lambda_dir, "lambda_times.csv"));
  const auto t = times.numeric_column("t");
  const auto w1 = times.numeric_column("wstar1");
  const auto w2 = times.numeric_column("wstar2");
  const auto eta = times.numeric_column("eta");
  if (t.empty()) throw ConfigError("lambda_times.csv lists no snapshots");

  LambdaField field;
  field.grid = cfg.grid;
  const GridSpec& grid = field.grid;
  const auto expected = static_cast<std::size_t>(grid.nodes1) * static_cast<std::size_t>(grid.nodes2);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const CsvTable table = read_csv(in_dir(lambda_dir, "lambda_t" + std::to_string(k) + ".csv"));
    const auto z1 = table.numeric_column("zeta1");
    const auto z2 = table.numeric_column("zeta2");
    const auto lam = table.numeric_column("lambda");
    if (lam.size() != expected) throw ConfigError("lambda snapshots do not match the configured grid; rerun solve-hjb");
    LambdaSnapshot snap;
    snap.t = t[k];
    snap.wstar = StateVector(w1[k], w2[k]);
    snap.eta = eta[k];
    snap.lambda.resize(grid.nodes1, grid.nodes2);
    std::size_t row = 0;
    for (int j = 0; j < grid.nodes2; ++j)
      for (int i = 0; i < grid.nodes1; ++i, ++row) {
        if (std::abs(z1[row] - grid.zeta1(i)) > 1e-9 * grid.h1() + 1e-9 ||
            std::abs(z2[row] - grid.zeta2(j)) > 1e-9 * grid.h2() + 1e-9)
          throw ConfigError("lambda snapshots do not match the configured grid; rerun solve-hjb");
        snap.lambda(i, j) = lam[row];
      }
    field.snapshots.push_back(std::move(snap));
  }
  return field;
}

std::vector<EstimateRow> estimate_rows(const Functional& phi, const LambdaField& field, const SamplePath& path,
                                       const FilterPair& filters, const PenaltyConfig& cfg)
{
  std::vector<EstimateRow> rows;
  for (const LambdaSnapshot& snap : field.snapshots) {
    const double t = snap.t;
    const double eta_t = interpolate(path.times, path.eta, t);
    const RobustEstimate est = robust_estimate(phi, t, field, eta_t, cfg);
    const GaussianCandidate kb_est{interpolate(filters.estimate.times, filters.estimate.q, t),
                                   interpolate(filters.estimate.times, filters.estimate.r, t)};
    const GaussianCandidate kb_true{interpolate(filters.truth.times, filters.truth.q, t),
                                    interpolate(filters.truth.times, filters.truth.r, t)};
    rows.push_back({t, phi.name, est.lower, est.minimax, est.upper, gaussian_functional(phi, kb_est),
                    gaussian_functional(phi, kb_true)});
  }
  return rows;
}

void stage_estimate(const ExperimentConfig& cfg, const std::string& dir, const std::vector<std::string>& functionals)
{
  run_stage("estimate", [&] {
    std::vector<const Functional*> selected;
    if (functionals.empty()) {
      for (const auto& phi : cfg.functionals) selected.push_back(&phi);
    } else {
      for (const auto& name : functionals) selected.push_back(&cfg.functional(name));
    }
    const SamplePath path = load_paths(cfg, dir);
    const FilterPair filters = load_filters(dir);
    const LambdaField field = load_lambda_field(cfg, dir);

    CsvTable table{{"t", "functional", "lower", "minimax", "upper", "kb_est", "kb_true"}, {}};
    for (const Functional* phi : selected) {
      for (const EstimateRow& r : estimate_rows(*phi, field, path, filters, cfg.penalty)) {
        table.add_row(std::vector<std::string>{format_number(r.t), r.functional, format_number(r.lower),
                                               format_number(r.minimax), format_number(r.upper),
                                               format_number(r.kb_est), format_number(r.kb_true)});
      }
    }
    write_csv(in_dir(dir, "estimates.csv"), table);
  });
}

std::vector<EstimateRow> load_estimates(const std::string& dir)
{
  const CsvTable table = read_csv(in_dir(dir, "estimates.csv"));
  const std::size_t name_col = table.column("functional");
  const auto t = table.numeric_column("t");
  const auto lower = table.numeric_column("lower");
  const auto minimax = table.numeric_column("minimax");
  const auto upper = table.numeric_column("upper");
  const auto kb_est = table.numeric_column("kb_est");
  const auto kb_true = table.numeric_column("kb_true");
  std::vector<EstimateRow> rows;
  for (std::size_t k = 0; k < t.size(); ++k)
    rows.push_back({t[k], table.rows[k][name_col], lower[k], minimax[k], upper[k], kb_est[k], kb_true[k]});
  return rows;
}

void stage_plot(const ExperimentConfig& cfg, const std::string& dir)
{
  run_stage("plot", [&] {
    const CsvTable paths = read_csv(in_dir(dir, "paths.csv"));
    const CsvTable filters = read_csv(in_dir(dir, "filters.csv"));

    LineChart fc;
    fc.title = "Signal and Kalman-Bucy filters";
    fc.y_label = "value";
    fc.series.push_back({"signal X", paths.numeric_column("t"), paths.numeric_column("x"), "#7f7f7f", false});
    fc.series.push_back({"q (true params)", filters.numeric_column("t"), filters.numeric_column("q_true"),
                         kPalette[0], false});
    fc.series.push_back({"q (estimated params)", filters.numeric_column("t"), filters.numeric_column("q_est"),
                         kPalette[1], true});
    write_svg(in_dir(dir, "filters.svg"), fc);

    if (!cfg.solve_hjb) return;
    const std::vector<EstimateRow> rows = load_estimates(dir);
    std::vector<std::string> names;
    for (const auto& r : rows)
      if (std::find(names.begin(), names.end(), r.functional) == names.end()) names.push_back(r.functional);

    for (const auto& name : names) {
      Series lower{"lower", {}, {}, kPalette[2], true};
      Series upper{"upper", {}, {}, kPalette[3], true};
      Series minimax{"robust minimax", {}, {}, kPalette[1], false};
      Series kb_est{"KB (estimated)", {}, {}, kPalette[0], false};
      Series kb_true{"KB (true)", {}, {}, "#7f7f7f", true};
      for (const auto& r : rows) {
        if (r.functional != name) continue;
        for (auto* s : {&lower, &upper, &minimax, &kb_est, &kb_true}) s->x.push_back(r.t);
        lower.y.push_back(r.lower);
        upper.y.push_back(r.upper);
        minimax.y.push_back(r.minimax);
        kb_est.y.push_back(r.kb_est);
        kb_true.y.push_back(r.kb_true);
      }
      LineChart est{"Robust and standard estimates: " + name, "t", name, {minimax, kb_est, kb_true}};
      write_svg(in_dir(dir, "estimates_" + name + ".svg"), est);
      LineChart bounds{"Upper and lower expectations: " + name, "t", name, {upper, lower, kb_est, kb_true}};
      write_svg(in_dir(dir, "bounds_" + name + ".svg"), bounds);
    }
  });
}

void run_experiment(const ExperimentConfig& cfg, const std::string& dir)
{
  stage_simulate(cfg, dir);
  stage_filter(cfg, dir);
  if (cfg.solve_hjb) {
    stage_solve_hjb(cfg, dir);
    stage_estimate(cfg, dir);
  }
  stage_plot(cfg, dir);
}

}  // namespace robustkb
