#pragma once

// Brute-force Lambda system coupled to N discrete waveguide modes with flat coupling.
// The free mode rotation is integrated exactly (exponential time differencing);
// only the system-waveguide coupling and the controls are stepped.

#include <iosfwd>
#include <vector>

#include "stawg/dynamics.hpp"
#include "stawg/model.hpp"
#include "stawg/schedule.hpp"

namespace stawg {

struct WaveguideGrid {
  double omega_max = 0.0;
  std::size_t n_modes = 0;
  double kappa = 0.0;
  double delta_omega = 0.0;
  double coupling = 0.0;  // sqrt(kappa * delta_omega / (2 pi))
  std::vector<double> frequencies;

  double recurrence_time() const;
};

// Midpoint grid omega_k = -omega_max/2 + (k + 1/2) delta_omega. Throws
// DomainError(recurrence) unless 2 pi / delta_omega > 1.5 total_time.
WaveguideGrid build_grid(double omega_max, std::size_t n_modes, double kappa, double total_time);

struct FullState {
  SystemAmplitudes system;
  std::vector<Complex> waveguide;

  double waveguide_norm() const;
  double norm_squared() const { return system.norm_squared() + waveguide_norm(); }
};

struct OracleOptions {
  double tol = 1e-10;            // per macro step, step-doubling estimate
  double tail_time = 20.0;       // in units of 1/kappa, appended after t_f
  TailControls tail_controls = TailControls::switched_off;
  int max_level = 12;            // at most 2^max_level substeps per grid interval
};

struct OracleStats {
  std::size_t macro_steps = 0;
  std::size_t substeps = 0;
  std::size_t refinements = 0;
  int max_level = 0;
  double max_error_estimate = 0.0;
};

struct FullTrajectory {
  std::vector<double> t;
  std::vector<SystemAmplitudes> system;
  std::vector<double> waveguide_norm;
  std::size_t window_end = 0;
  FullState final_state;
  OracleStats stats;
};

// Output nodes: the schedule grid, then the same spacing through the tail.
FullTrajectory propagate_full(const ControlSchedule& schedule, const ModelParams& params,
                              const WaveguideGrid& grid,
                              const SystemAmplitudes& psi0 = SystemAmplitudes::level_a(),
                              const OracleOptions& opts = {});

struct ModeExtraction {
  std::vector<double> t;
  std::vector<Complex> f;
  double band_edge_ratio = 0.0;  // max edge |u_k| over peak |u_k|
  bool band_edge_warning = false;
};

// f(t) = sqrt(delta_omega / 2 pi) sum_k exp(-i omega_k (t - T)) u_k(T).
ModeExtraction extract_mode(const FullState& state, double final_time, const WaveguideGrid& grid,
                            std::span<const double> times);

struct DeviationRow {
  double omega_max = 0.0;
  std::size_t n_modes = 0;
  double fidelity_full = 0.0;
  double fidelity_markov = 0.0;
  double fidelity_deviation = 0.0;
  double mode_l2_relative = 0.0;
  bool band_edge_warning = false;
};

struct GridSetting {
  double omega_max = 0.0;
  std::size_t n_modes = 0;
};

// Compares the full model with the Markovian propagation at the same final time
// for each grid setting.
std::vector<DeviationRow> markovian_deviation(const ControlSchedule& schedule,
                                              const ModelParams& params,
                                              std::span<const GridSetting> grids,
                                              const SystemAmplitudes& psi0 = SystemAmplitudes::level_a(),
                                              const OracleOptions& opts = {});

// Markovian trajectory on exactly the oracle's output nodes.
Trajectory markov_reference(const ControlSchedule& schedule, const ModelParams& params,
                            const SystemAmplitudes& psi0, const OracleOptions& opts);

// Relative L2 distance of two mode samples on a shared uniform grid.
double mode_l2_relative(std::span<const Complex> f, std::span<const Complex> reference);

// Columns omega, re_u, im_u.
void write_waveguide_csv(std::ostream& out, const FullState& state, const WaveguideGrid& grid);
// Columns t, re_f, im_f.
void write_mode_csv(std::ostream& out, const ModeExtraction& mode);

}  // namespace stawg
