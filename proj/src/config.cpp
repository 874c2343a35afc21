#include "stawg/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "stawg/error.hpp"

namespace stawg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

// Reads obj[key] into out when present and checks the predicate.
template <class Pred>
void read_number(const json& obj, const std::string& path, const char* key, double& out,
                 Pred&& ok, const char* requirement) {
  if (!obj.contains(key)) return;
  const std::string p = join(path, key);
  const double x = number(obj.at(key), p);
  if (!ok(x)) fail(p, requirement);
  out = x;
}

void read_bool(const json& obj, const std::string& path, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_boolean()) fail(join(path, key), "expected true or false");
  out = obj.at(key).get<bool>();
}

std::string string_field(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

auto positive = [](double x) { return x > 0.0; };
auto non_negative = [](double x) { return x >= 0.0; };

void parse_protocols(const json& v, ExperimentConfig& cfg) {
  auto one = [&](const json& item, const std::string& p) {
    try {
      cfg.protocols.push_back(protocol_from_string(string_field(item, p)));
    } catch (const ConfigError&) {
      if (!item.is_string()) throw;
      fail(p, "unknown protocol '" + item.get<std::string>() + "'");
    }
  };
  if (v.is_array()) {
    if (v.empty()) fail("protocol", "at least one protocol is required");
    for (std::size_t i = 0; i < v.size(); ++i) one(v[i], "protocol[" + std::to_string(i) + "]");
  } else {
    one(v, "protocol");
  }
}

void parse_physics(const json& v, PhysicsConfig& ph) {
  const std::string path = "physics";
  reject_unknown(v, path, {"kappa", "gamma", "label", "G0", "epsilon", "Gmax", "g", "t0"});
  read_number(v, path, "kappa", ph.kappa, non_negative, "must be >= 0");
  read_number(v, path, "gamma", ph.gamma, non_negative, "must be >= 0");
  if (v.contains("label")) ph.label = string_field(v.at("label"), join(path, "label"));
  read_number(v, path, "G0", ph.G0, positive, "must be > 0");
  read_number(v, path, "epsilon", ph.epsilon, [](double x) { return x > 0.0 && x < 1.0; },
              "must lie in (0, 1)");
  read_number(v, path, "Gmax", ph.Gmax, positive, "must be > 0");
  read_number(v, path, "g", ph.g, positive, "must be > 0");
  if (v.contains("t0")) {
    double t0 = 0.0;
    read_number(v, path, "t0", t0, positive, "must be > 0");
    ph.t0 = t0;
  }
  if (!(ph.Gmax > ph.g)) fail("physics.Gmax", "must exceed physics.g");
}

void parse_sweep(const json& v, std::vector<double>& nu) {
  const std::string path = "sweep";
  reject_unknown(v, path, {"values", "log_range"});
  if (v.contains("values") == v.contains("log_range"))
    fail(path, "exactly one of 'values' or 'log_range' is required");
  if (v.contains("values")) {
    const json& vals = v.at("values");
    if (!vals.is_array()) fail("sweep.values", "expected an array");
    nu.clear();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const std::string p = "sweep.values[" + std::to_string(i) + "]";
      const double x = number(vals[i], p);
      if (!(x > 0.0)) fail(p, "must be > 0");
      nu.push_back(x);
    }
    return;
  }
  const json& lr = v.at("log_range");
  const std::string lp = "sweep.log_range";
  reject_unknown(lr, lp, {"min", "max", "points"});
  if (!lr.contains("min") || !lr.contains("max")) fail(lp, "'min' and 'max' are required");
  double lo = 0.0, hi = 0.0, points = 25.0;
  read_number(lr, lp, "min", lo, positive, "must be > 0");
  read_number(lr, lp, "max", hi, positive, "must be > 0");
  read_number(lr, lp, "points", points,
              [](double x) { return x >= 0.0 && x == std::floor(x) && x <= 1e6; },
              "must be a non-negative integer");
  if (hi < lo) fail("sweep.log_range.max", "must be >= min");
  nu = log_range(lo, hi, static_cast<std::size_t>(points));
}

void parse_numerics(const json& v, NumericsConfig& nm) {
  const std::string path = "numerics";
  reject_unknown(v, path, {"dt", "rel_tol", "abs_tol", "tail", "tail_controls", "tail_population",
                           "tail_length", "dressing_solver"});
  if (v.contains("dt")) {
    const json& d = v.at("dt");
    if (d.is_string()) {
      if (d.get<std::string>() != "auto") fail("numerics.dt", "expected a number or \"auto\"");
      nm.dt.reset();
    } else {
      double dt = 0.0;
      read_number(v, path, "dt", dt, positive, "must be > 0");
      nm.dt = dt;
    }
  }
  read_number(v, path, "rel_tol", nm.rel_tol, positive, "must be > 0");
  read_number(v, path, "abs_tol", nm.abs_tol, positive, "must be > 0");
  read_bool(v, path, "tail", nm.tail);
  if (v.contains("tail_controls")) {
    const std::string s = string_field(v.at("tail_controls"), "numerics.tail_controls");
    if (s == "switched_off") nm.tail_controls = TailControls::switched_off;
    else if (s == "held") nm.tail_controls = TailControls::held;
    else if (s == "auto") nm.tail_controls.reset();
    else fail("numerics.tail_controls", "expected \"switched_off\", \"held\" or \"auto\"");
  }
  read_number(v, path, "tail_population", nm.tail_population, non_negative, "must be >= 0");
  read_number(v, path, "tail_length", nm.tail_length, non_negative, "must be >= 0");
  if (v.contains("dressing_solver")) {
    const std::string s = string_field(v.at("dressing_solver"), "numerics.dressing_solver");
    if (s == "bdf") nm.dressing_solver = DressingSolver::bdf;
    else if (s == "dormand_prince") nm.dressing_solver = DressingSolver::dormand_prince;
    else fail("numerics.dressing_solver", "expected \"bdf\" or \"dormand_prince\"");
  }
}

void parse_oracle(const json& v, OracleConfig& oc) {
  const std::string path = "oracle";
  reject_unknown(v, path, {"omega_max", "n_modes", "tail_time", "tol"});
  if (v.contains("omega_max") != v.contains("n_modes"))
    fail(path, "'omega_max' and 'n_modes' must be given together");
  if (v.contains("omega_max")) {
    const json& w = v.at("omega_max");
    const json& n = v.at("n_modes");
    if (!w.is_array() || !n.is_array()) fail(path, "'omega_max' and 'n_modes' must be arrays");
    if (w.size() != n.size()) fail("oracle.n_modes", "must have the same length as omega_max");
    oc.grids.clear();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string wp = "oracle.omega_max[" + std::to_string(i) + "]";
      const std::string np = "oracle.n_modes[" + std::to_string(i) + "]";
      const double wm = number(w[i], wp);
      if (!(wm > 0.0)) fail(wp, "must be > 0");
      if (!n[i].is_number_integer() || n[i].get<long long>() < 2) fail(np, "must be an integer >= 2");
      oc.grids.push_back({wm, static_cast<std::size_t>(n[i].get<long long>())});
    }
  }
  read_number(v, path, "tail_time", oc.tail_time, non_negative, "must be >= 0");
  read_number(v, path, "tol", oc.tol, positive, "must be > 0");
}

void parse_output(const json& v, OutputConfig& out) {
  const std::string path = "output";
  reject_unknown(v, path, {"directory", "write_trajectories", "max_trajectory_rows"});
  if (v.contains("directory")) out.directory = string_field(v.at("directory"), "output.directory");
  read_bool(v, path, "write_trajectories", out.write_trajectories);
  if (v.contains("max_trajectory_rows")) {
    const json& m = v.at("max_trajectory_rows");
    if (!m.is_number_integer() || m.get<long long>() < 0)
      fail("output.max_trajectory_rows", "must be a non-negative integer");
    out.max_trajectory_rows = static_cast<std::size_t>(m.get<long long>());
  }
}

}  // namespace

const char* to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::vitanov_uncorrected: return "vitanov_uncorrected";
    case Protocol::vitanov_satd: return "vitanov_satd";
    case Protocol::vitanov_satd_kappa: return "vitanov_satd_kappa";
    case Protocol::tanh_uncorrected: return "tanh_uncorrected";
    case Protocol::tanh_corrected: return "tanh_corrected";
  }
  return "unknown";
}

Protocol protocol_from_string(std::string_view name) {
  for (Protocol p : {Protocol::vitanov_uncorrected, Protocol::vitanov_satd,
                     Protocol::vitanov_satd_kappa, Protocol::tanh_uncorrected,
                     Protocol::tanh_corrected})
    if (name == to_string(p)) return p;
  throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

bool is_tanh(Protocol p) noexcept {
  return p == Protocol::tanh_uncorrected || p == Protocol::tanh_corrected;
}

std::vector<double> log_range(double min, double max, std::size_t points) {
  std::vector<double> v(points);
  if (points == 1) v[0] = min;
  const double a = std::log10(min), b = std::log10(max);
  for (std::size_t i = 0; points > 1 && i < points; ++i)
    v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  if (points > 1) {
    v.front() = min;
    v.back() = max;
  }
  return v;
}

ModelParams ExperimentConfig::model_params() const {
  return {physics.kappa, physics.gamma, physics.label};
}

VitanovSpec ExperimentConfig::vitanov_spec(double nu) const {
  VitanovSpec s{physics.G0, nu, physics.epsilon};
  s.validate();
  return s;
}

TanhSpec ExperimentConfig::tanh_spec(double nu) const {
  if (physics.t0) {
    TanhSpec s{physics.Gmax, physics.g, nu, *physics.t0, physics.epsilon};
    s.validate();
    return s;
  }
  return tanh_spec_with_delay_rule(physics.Gmax, physics.g, nu, physics.epsilon);
}

double ExperimentConfig::dt(Protocol p, double nu) const {
  if (numerics.dt) return *numerics.dt;
  const double g0_max = is_tanh(p) ? std::hypot(physics.Gmax, physics.g) : physics.G0;
  return default_dt(nu, physics.kappa, g0_max);
}

PropagationOptions ExperimentConfig::propagation_options(Protocol p) const {
  PropagationOptions o;
  o.rel_tol = numerics.rel_tol;
  o.abs_tol = numerics.abs_tol;
  o.tail = numerics.tail;
  o.tail_controls = numerics.tail_controls.value_or(is_tanh(p) ? TailControls::held
                                                               : TailControls::switched_off);
  o.tail_population = numerics.tail_population;
  o.tail_length = numerics.tail_length;
  return o;
}

OracleOptions ExperimentConfig::oracle_options(Protocol p) const {
  OracleOptions o;
  o.tol = oracle.tol;
  o.tail_time = oracle.tail_time;
  o.tail_controls = propagation_options(p).tail_controls;
  return o;
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown(root, "", {"version", "protocol", "physics", "sweep", "numerics", "oracle",
                            "output"});
  ExperimentConfig cfg;
  if (!root.contains("version")) fail("version", "required");
  if (!root.at("version").is_number_integer() || root.at("version").get<long long>() != config_version)
    fail("version", "unsupported version (expected " + std::to_string(config_version) + ")");
  if (!root.contains("protocol")) fail("protocol", "required");
  parse_protocols(root.at("protocol"), cfg);
  if (root.contains("physics")) parse_physics(root.at("physics"), cfg.physics);
  cfg.nu = log_range(0.1, 10.0, 25);
  if (root.contains("sweep")) parse_sweep(root.at("sweep"), cfg.nu);
  if (root.contains("numerics")) parse_numerics(root.at("numerics"), cfg.numerics);
  if (root.contains("oracle")) parse_oracle(root.at("oracle"), cfg.oracle);
  if (root.contains("output")) parse_output(root.at("output"), cfg.output);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace stawg
