#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <doctest.h>

#include "robustkb/error.hpp"
#include "robustkb/experiment.hpp"
#include "small_config.hpp"

using namespace robustkb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / ("robustkb_exp_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> files_with(const fs::path& dir, const std::string& ext)
{
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.path().extension() == ext) out.push_back(fs::relative(e.path(), dir));
  std::sort(out.begin(), out.end());
  return out;
}

const ExperimentConfig& config()
{
  static const ExperimentConfig cfg = parse_config_text(kSmallConfig);
  return cfg;
}

/// One full run shared by the read-only checks.
const fs::path& full_run()
{
  static const fs::path dir = [] {
    const fs::path d = scratch("full");
    run_experiment(config(), d.string());
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("artifacts and schemas")
{
  const fs::path& dir = full_run();
  for (const char* f : {"paths.csv", "filters.csv", "estimates.csv", "filters.svg", "lambda/lambda_times.csv",
                        "lambda/solver.csv", "lambda/lambda_t0.csv", "lambda/lambda_t5.csv", "estimates_identity.svg",
                        "bounds_call_K2.svg"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  auto header = [&](const char* f) {
    std::ifstream in(dir / f);
    std::string line;
    std::getline(in, line);
    return line;
  };
  CHECK(header("paths.csv") == "t,x,y,eta");
  CHECK(header("filters.csv") == "t,q_true,r_true,q_est,r_est");
  CHECK(header("estimates.csv") == "t,functional,lower,minimax,upper,kb_est,kb_true");
  CHECK(header("lambda/lambda_t0.csv") == "zeta1,zeta2,lambda,v");
}

TEST_CASE("no NaN reaches disk")
{
  for (const fs::path& f : files_with(full_run(), ".csv")) {
    const std::string text = slurp(full_run() / f);
    CHECK_MESSAGE(text.find("nan") == std::string::npos, f.string());
    CHECK_MESSAGE(text.find("NaN") == std::string::npos, f.string());
  }
}

TEST_CASE("estimates bracket the filter")
{
  const std::vector<EstimateRow> rows = load_estimates(full_run().string());
  REQUIRE(rows.size() == 12);
  for (const EstimateRow& r : rows) {
    CHECK(std::isfinite(r.lower));
    CHECK(std::isfinite(r.upper));
    CHECK(std::isfinite(r.minimax));
    CHECK(std::isfinite(r.kb_est));
    CHECK(std::isfinite(r.kb_true));
    CHECK(r.lower <= r.upper);
    if (r.functional == "identity") {
      CHECK(r.lower <= r.kb_est + 0.05);
      CHECK(r.kb_est <= r.upper + 0.05);
    }
  }
}

TEST_CASE("reruns are bit-identical")
{
  const fs::path other = scratch("again");
  run_experiment(config(), other.string());
  const auto csvs = files_with(full_run(), ".csv");
  CHECK(csvs == files_with(other, ".csv"));
  for (const fs::path& f : csvs) CHECK_MESSAGE(slurp(full_run() / f) == slurp(other / f), f.string());

  // Replaying the last stages alone reproduces the same files.
  stage_estimate(config(), other.string());
  stage_plot(config(), other.string());
  for (const fs::path& f : files_with(full_run(), ".svg")) CHECK(slurp(full_run() / f) == slurp(other / f));
  CHECK(slurp(full_run() / "estimates.csv") == slurp(other / "estimates.csv"));
  fs::remove_all(other);
}

TEST_CASE("stored field matches the stored frame")
{
  const LambdaField field = load_lambda_field(config(), full_run().string());
  REQUIRE(field.snapshots.size() == 6);
  CHECK(field.snapshots.back().t == doctest::Approx(0.25));
  const FilterPair filters = load_filters(full_run().string());
  const SamplePath path = load_paths(config(), full_run().string());
  const Eigen::Index n = path.steps();
  CHECK(field.snapshots.back().wstar.y() == doctest::Approx(1.0 / filters.estimate.r(n)).epsilon(1e-10));
  CHECK(filters.truth.r(0) == doctest::Approx(0.04));
}

TEST_CASE("stages need their inputs")
{
  const fs::path empty = scratch("empty");
  fs::create_directories(empty);
  CHECK_THROWS_AS(stage_filter(config(), empty.string()), MissingInputError);
  CHECK_THROWS_AS(stage_solve_hjb(config(), empty.string()), MissingInputError);
  CHECK_THROWS_AS(stage_estimate(config(), empty.string()), MissingInputError);
  stage_simulate(config(), empty.string());
  CHECK_THROWS_AS(stage_solve_hjb(config(), empty.string()), MissingInputError);
  CHECK_THROWS_AS(stage_estimate(config(), empty.string(), {"bogus"}), ConfigError);
  fs::remove_all(empty);
}

TEST_CASE("a path-only run skips the penalty stages")
{
  ExperimentConfig cfg = config();
  cfg.solve_hjb = false;
  const fs::path dir = scratch("nohjb");
  run_experiment(cfg, dir.string());
  CHECK(fs::exists(dir / "filters.csv"));
  CHECK_FALSE(fs::exists(dir / "lambda"));
  CHECK_FALSE(fs::exists(dir / "estimates.csv"));
  fs::remove_all(dir);
}

TEST_CASE("cleanup")
{
  fs::remove_all(full_run());
}
