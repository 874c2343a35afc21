#pragma once

// Experiment configuration: a JSON object with a version field. Every field is
// validated before any run and unknown keys are rejected with their path.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stawg/dynamics.hpp"
#include "stawg/model.hpp"
#include "stawg/oracle.hpp"
#include "stawg/pulses.hpp"
#include "stawg/synthesis.hpp"

namespace stawg {

enum class Protocol {
  vitanov_uncorrected,
  vitanov_satd,
  vitanov_satd_kappa,
  tanh_uncorrected,
  tanh_corrected,
};

const char* to_string(Protocol p) noexcept;
// Throws ConfigError for an unknown name.
Protocol protocol_from_string(std::string_view name);
bool is_tanh(Protocol p) noexcept;

struct PhysicsConfig {
  double kappa = 1.0;
  double gamma = 0.0;
  std::string label;
  double G0 = 1.0;        // Vitanov gap
  double epsilon = 1e-3;  // truncation ratio of both protocols
  double Gmax = 30.0;     // tanh peak
  double g = 6.0;         // tanh fixed coupling
  std::optional<double> t0;  // tanh delay; absent: delay rule
};

struct NumericsConfig {
  std::optional<double> dt;  // absent: default_dt at each nu
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  bool tail = true;
  // Absent: switched off for the Vitanov protocols, held at the endpoint values for tanh.
  std::optional<TailControls> tail_controls;
  double tail_population = 1e-14;
  double tail_length = 50.0;
  DressingSolver dressing_solver = DressingSolver::bdf;
};

struct OracleConfig {
  std::vector<GridSetting> grids{{50.0, 1024}, {100.0, 2048}, {200.0, 4096}};
  double tail_time = 20.0;
  double tol = 1e-10;
};

struct OutputConfig {
  std::string directory = "out";
  bool write_trajectories = true;
  std::size_t max_trajectory_rows = 4000;  // per trajectory/mode file, 0: every node
};

struct ExperimentConfig {
  int version = 1;
  std::vector<Protocol> protocols;
  PhysicsConfig physics;
  std::vector<double> nu;  // sweep points, in the order given
  NumericsConfig numerics;
  OracleConfig oracle;
  OutputConfig output;

  ModelParams model_params() const;
  VitanovSpec vitanov_spec(double nu) const;
  TanhSpec tanh_spec(double nu) const;
  double dt(Protocol p, double nu) const;
  PropagationOptions propagation_options(Protocol p) const;
  OracleOptions oracle_options(Protocol p) const;
};

inline constexpr int config_version = 1;

// 25 log-spaced points over [0.1, 10] (units of kappa) when the sweep is omitted.
std::vector<double> log_range(double min, double max, std::size_t points);

// Throws ConfigError naming the offending field path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace stawg
