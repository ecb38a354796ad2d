#pragma once

#include <string>
#include <vector>

#include "robustkb/config.hpp"
#include "robustkb/frame.hpp"
#include "robustkb/hjb.hpp"
#include "robustkb/kalman.hpp"
#include "robustkb/simulate.hpp"

namespace robustkb {

// Artifact layout under the output directory:
//   paths.csv                 t,x,y,eta
//   filters.csv               t,q_true,r_true,q_est,r_est
//   lambda/lambda_t<k>.csv    zeta1,zeta2,lambda,v
//   lambda/lambda_times.csv   index,t,wstar1,wstar2,eta
//   lambda/solver.csv         quantity,value
//   estimates.csv             t,functional,lower,minimax,upper,kb_est,kb_true
//   filters.svg, estimates_<name>.svg, bounds_<name>.svg
//
// Every stage reads its inputs from disk, so a full run and a sequence of
// single-stage reruns produce identical files.

struct FilterPair
{
  FilterTrajectory truth;
  FilterTrajectory estimate;
};

struct EstimateRow
{
  double t = 0.0;
  std::string functional;
  double lower = 0.0;
  double minimax = 0.0;
  double upper = 0.0;
  double kb_est = 0.0;
  double kb_true = 0.0;
};

void stage_simulate(const ExperimentConfig& cfg, const std::string& dir);
void stage_filter(const ExperimentConfig& cfg, const std::string& dir);
void stage_solve_hjb(const ExperimentConfig& cfg, const std::string& dir);
/// Estimates for the named functionals, or all configured ones when empty.
void stage_estimate(const ExperimentConfig& cfg, const std::string& dir,
                    const std::vector<std::string>& functionals = {});
/// Regenerates the SVGs from the CSVs alone.
void stage_plot(const ExperimentConfig& cfg, const std::string& dir);

/// simulate -> filter -> solve-hjb -> estimate -> plot. The HJB and estimate
/// stages are skipped when cfg.solve_hjb is false.
void run_experiment(const ExperimentConfig& cfg, const std::string& dir);

SamplePath load_paths(const ExperimentConfig& cfg, const std::string& dir);
FilterPair load_filters(const std::string& dir);
LambdaField load_lambda_field(const ExperimentConfig& cfg, const std::string& dir);
std::vector<EstimateRow> load_estimates(const std::string& dir);

/// Estimate rows for one functional at every snapshot time of the field.
std::vector<EstimateRow> estimate_rows(const Functional& phi, const LambdaField& field, const SamplePath& path,
                                       const FilterPair& filters, const PenaltyConfig& cfg);

}  // namespace robustkb
