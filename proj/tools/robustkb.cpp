// Command-line driver for the experiment pipeline.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robustkb/config.hpp"
#include "robustkb/error.hpp"
#include "robustkb/experiment.hpp"

namespace {

struct Options
{
  std::string config;
  std::string out;
  std::vector<std::string> functionals;
};

CLI::App* add_stage(CLI::App& app, const std::string& name, const std::string& help, Options& opts)
{
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("-c,--config", opts.config, "JSON experiment config")->required();
  sub->add_option("-o,--out", opts.out, "Output directory (overrides output_dir)");
  return sub;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Robust Kalman-Bucy filtering experiments"};
  app.require_subcommand(1);
  Options opts;
  CLI::App* simulate = add_stage(app, "simulate", "Simulate signal and observation paths", opts);
  CLI::App* filter = add_stage(app, "filter", "Run Kalman-Bucy filters with true and estimated parameters", opts);
  CLI::App* solve = add_stage(app, "solve-hjb", "Solve the penalty equation on the moving grid", opts);
  CLI::App* estimate = add_stage(app, "estimate", "Compute robust estimates from the stored penalty", opts);
  estimate->add_option("-f,--functional", opts.functionals, "Functional name(s); default all configured");
  CLI::App* run = add_stage(app, "run-experiment", "Run every stage in order", opts);
  CLI::App* plot = add_stage(app, "plot", "Regenerate SVG plots from the CSV outputs", opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const robustkb::ExperimentConfig cfg = robustkb::parse_config(opts.config);
    const std::string dir = opts.out.empty() ? cfg.output_dir : opts.out;
    if (simulate->parsed()) {
      robustkb::stage_simulate(cfg, dir);
    } else if (filter->parsed()) {
      robustkb::stage_filter(cfg, dir);
    } else if (solve->parsed()) {
      if (!cfg.solve_hjb) throw robustkb::ConfigError("solve-hjb: solve_hjb is false in the config");
      robustkb::stage_solve_hjb(cfg, dir);
    } else if (estimate->parsed()) {
      robustkb::stage_estimate(cfg, dir, opts.functionals);
    } else if (run->parsed()) {
      robustkb::run_experiment(cfg, dir);
    } else if (plot->parsed()) {
      robustkb::stage_plot(cfg, dir);
    }
  } catch (const robustkb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
