#include "robustkb/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "robustkb/error.hpp"

namespace robustkb {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + " " + what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed)
{
  if (!obj.is_object()) fail(where, "must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      fail(where.empty() ? item.key() : where + "." + item.key(), "is not a recognized key");
  }
}

std::string join(const std::string& where, std::string_view key)
{
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

void read_number(const json& obj, const std::string& where, std::string_view key, double& out)
{
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return;
  if (!it->is_number()) fail(join(where, key), "must be a number");
  out = it->get<double>();
}

void read_int(const json& obj, const std::string& where, std::string_view key, int& out)
{
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return;
  if (!it->is_number_integer()) fail(join(where, key), "must be an integer");
  out = it->get<int>();
}

std::vector<double> read_number_array(const json& value, const std::string& field)
{
  if (!value.is_array()) fail(field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) fail(field, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ObservationGain read_gain(const json& value, const std::string& field)
{
  if (value.is_number()) return ObservationGain(value.get<double>());
  check_keys(value, field, {"breakpoints", "values"});
  if (!value.contains("breakpoints") || !value.contains("values"))
    fail(field, "needs both 'breakpoints' and 'values'");
  return ObservationGain(read_number_array(value["breakpoints"], field + ".breakpoints"),
                         read_number_array(value["values"], field + ".values"));
}

Functional read_functional(const json& value, const std::string& field)
{
  if (!value.is_object() || !value.contains("type") || !value["type"].is_string())
    fail(field, "must be an object with a string 'type'");
  const std::string type = value["type"].get<std::string>();
  Functional phi;
  if (type == "identity") {
    check_keys(value, field, {"type", "name"});
    phi = Functional::identity();
  } else if (type == "square") {
    check_keys(value, field, {"type", "name"});
    phi = Functional::square();
  } else if (type == "call") {
    check_keys(value, field, {"type", "name", "strike"});
    double strike = 0.0;
    if (!value.contains("strike")) fail(field + ".strike", "is required");
    read_number(value, field, "strike", strike);
    phi = Functional::call(strike);
  } else if (type == "constant") {
    check_keys(value, field, {"type", "name", "value"});
    double c = 0.0;
    if (!value.contains("value")) fail(field + ".value", "is required");
    read_number(value, field, "value", c);
    phi = Functional::constant(c);
  } else if (type == "tabulated") {
    check_keys(value, field, {"type", "name", "x", "y"});
    if (!value.contains("x") || !value.contains("y")) fail(field, "needs 'x' and 'y'");
    phi = Functional::tabulated(read_number_array(value["x"], field + ".x"),
                                read_number_array(value["y"], field + ".y"));
  } else {
    fail(field + ".type", "must be one of identity, square, call, constant, tabulated");
  }
  if (value.contains("name")) {
    if (!value["name"].is_string() || value["name"].get<std::string>().empty())
      fail(field + ".name", "must be a nonempty string");
    phi.name = value["name"].get<std::string>();
  }
  phi.validate(field);
  return phi;
}

ExperimentConfig from_json(const json& doc)
{
  check_keys(doc, "", {"model", "reference", "penalty", "simulation", "grid", "output_times", "functionals",
                       "output_dir", "solve_hjb"});
  ExperimentConfig cfg;

  if (doc.contains("model")) {
    const json& m = doc["model"];
    check_keys(m, "model", {"alpha", "beta", "c", "mu0", "sigma0"});
    read_number(m, "model", "alpha", cfg.model.alpha);
    read_number(m, "model", "beta", cfg.model.beta);
    read_number(m, "model", "mu0", cfg.model.mu0);
    read_number(m, "model", "sigma0", cfg.model.sigma0);
    if (m.contains("c")) cfg.model.c = read_gain(m["c"], "model.c");
  }
  if (doc.contains("reference")) {
    const json& r = doc["reference"];
    check_keys(r, "reference", {"alpha", "beta", "mu0", "sigma0"});
    read_number(r, "reference", "alpha", cfg.reference.alpha);
    read_number(r, "reference", "beta", cfg.reference.beta);
    read_number(r, "reference", "mu0", cfg.reference.mu0);
    read_number(r, "reference", "sigma0", cfg.reference.sigma0);
  }
  if (doc.contains("penalty")) {
    const json& p = doc["penalty"];
    check_keys(p, "penalty", {"c_alpha", "c_beta", "w1", "w2", "k1", "k2"});
    read_number(p, "penalty", "c_alpha", cfg.penalty.c_alpha);
    read_number(p, "penalty", "c_beta", cfg.penalty.c_beta);
    read_number(p, "penalty", "w1", cfg.penalty.w1);
    read_number(p, "penalty", "w2", cfg.penalty.w2);
    read_number(p, "penalty", "k1", cfg.penalty.k1);
    read_number(p, "penalty", "k2", cfg.penalty.k2);
  }
  if (doc.contains("simulation")) {
    const json& s = doc["simulation"];
    check_keys(s, "simulation", {"dt", "T", "seed"});
    read_number(s, "simulation", "dt", cfg.simulation.dt);
    read_number(s, "simulation", "T", cfg.simulation.horizon);
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned() && !(s["seed"].is_number_integer() && s["seed"].get<long long>() >= 0))
        fail("simulation.seed", "must be a nonnegative integer");
      cfg.simulation.seed = s["seed"].get<std::uint64_t>();
    }
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    check_keys(g, "grid",
               {"Z1", "Z2", "N1", "N2", "M_trunc", "theta", "scheme", "s_min", "lambda_floor", "dt_floor"});
    read_number(g, "grid", "Z1", cfg.grid.half_width1);
    read_number(g, "grid", "Z2", cfg.grid.half_width2);
    read_int(g, "grid", "N1", cfg.grid.nodes1);
    read_int(g, "grid", "N2", cfg.grid.nodes2);
    read_number(g, "grid", "M_trunc", cfg.grid.drift_cap);
    read_number(g, "grid", "theta", cfg.grid.cfl_safety);
    read_number(g, "grid", "s_min", cfg.grid.s_min);
    read_number(g, "grid", "lambda_floor", cfg.grid.lambda_floor);
    read_number(g, "grid", "dt_floor", cfg.grid.dt_floor);
    if (g.contains("scheme")) {
      const std::string scheme = g["scheme"].is_string() ? g["scheme"].get<std::string>() : "";
      if (scheme == "upwind")
        cfg.grid.scheme = TransportScheme::Upwind;
      else if (scheme == "hybrid")
        cfg.grid.scheme = TransportScheme::Hybrid;
      else if (scheme == "lax_friedrichs")
        cfg.grid.scheme = TransportScheme::LocalLaxFriedrichs;
      else
        fail("grid.scheme", "must be \"upwind\", \"hybrid\" or \"lax_friedrichs\"");
    }
  }
  if (doc.contains("output_times")) {
    const json& o = doc["output_times"];
    if (o.is_object()) {
      check_keys(o, "output_times", {"count"});
      int count = 21;
      read_int(o, "output_times", "count", count);
      if (count < 2) fail("output_times.count", "must be >= 2");
      cfg.output_times = evenly_spaced_times(cfg.simulation.horizon, count);
    } else {
      cfg.output_times = read_number_array(o, "output_times");
    }
  } else {
    cfg.output_times = evenly_spaced_times(cfg.simulation.horizon, 21);
  }
  if (doc.contains("functionals")) {
    const json& fs = doc["functionals"];
    if (!fs.is_array()) fail("functionals", "must be an array");
    for (std::size_t k = 0; k < fs.size(); ++k)
      cfg.functionals.push_back(read_functional(fs[k], "functionals[" + std::to_string(k) + "]"));
  } else {
    cfg.functionals = {Functional::identity(), Functional::call(2.0)};
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) fail("output_dir", "must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("solve_hjb")) {
    if (!doc["solve_hjb"].is_boolean()) fail("solve_hjb", "must be a boolean");
    cfg.solve_hjb = doc["solve_hjb"].get<bool>();
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<double> evenly_spaced_times(double horizon, int count)
{
  std::vector<double> times(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    times[static_cast<std::size_t>(k)] = k == count - 1 ? horizon : horizon * k / (count - 1);
  return times;
}

void ExperimentConfig::validate() const
{
  model.validate("model");
  reference.validate("reference");
  penalty.validate(solve_hjb, "penalty");
  grid.validate("grid");
  if (!(simulation.dt > 0.0) || !std::isfinite(simulation.dt)) fail("simulation.dt", "must be > 0");
  if (!(simulation.horizon >= simulation.dt) || !std::isfinite(simulation.horizon))
    fail("simulation.T", "must be >= simulation.dt");
  if (output_times.empty()) fail("output_times", "must not be empty");
  for (double t : output_times)
    if (!(t >= 0.0 && t <= simulation.horizon)) fail("output_times", "must lie within [0, simulation.T]");
  if (!std::is_sorted(output_times.begin(), output_times.end()) ||
      std::adjacent_find(output_times.begin(), output_times.end()) != output_times.end())
    fail("output_times", "must be strictly increasing");
  if (functionals.empty()) fail("functionals", "must not be empty");
  for (std::size_t k = 0; k < functionals.size(); ++k) {
    for (std::size_t m = 0; m < k; ++m)
      if (functionals[m].name == functionals[k].name)
        fail("functionals[" + std::to_string(k) + "].name", "duplicates '" + functionals[k].name + "'");
    if (functionals[k].name.find_first_of(",\n/") != std::string::npos)
      fail("functionals[" + std::to_string(k) + "].name", "must not contain ',', '/' or newlines");
  }
  if (output_dir.empty()) fail("output_dir", "must not be empty");
}

const Functional& ExperimentConfig::functional(const std::string& name) const
{
  for (const auto& phi : functionals)
    if (phi.name == name) return phi;
  std::string available;
  for (const auto& phi : functionals) available += (available.empty() ? "" : ", ") + phi.name;
  throw ConfigError("functional '" + name + "' is not configured; available: " + available);
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": malformed JSON: " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
}

ExperimentConfig parse_config(const std::string& path)
{
  if (!std::filesystem::exists(path)) throw MissingInputError("config file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace robustkb
