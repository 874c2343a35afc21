#pragma once

// Experiment runner behind the CLI: protocol construction per sweep point,
// parallel sweeps with results in input order, dressing reports, the continuum
// check and regression comparison against a stored results file.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stawg/config.hpp"
#include "stawg/dynamics.hpp"
#include "stawg/synthesis.hpp"

namespace stawg {

struct ResultRecord {
  Protocol protocol = Protocol::vitanov_uncorrected;
  double nu = 0.0;
  double final_fidelity = 0.0;  // F at the end of the emission tail
  double infidelity = 0.0;
  double window_fidelity = 0.0;  // F(t_f)
  double max_pop_b = 0.0;
  double leakage_max = 0.0;     // nan for uncorrected protocols
  double mu_mid = 0.0;          // last dressing value; nan for uncorrected protocols
  double splice_gain = 0.0;     // nan unless tanh_corrected
  std::size_t mode_oscillations = 0;  // internal oscillations of |f|
  std::string status = "ok";    // "ok" or "<error-kind>: message"
  double runtime = 0.0;         // seconds; not written to results.csv
  std::string trajectory_file;  // relative to the output directory; empty if not written
  std::string mode_file;

  bool ok() const { return status == "ok"; }
};

// Everything computed for one protocol at one nu.
struct PointRun {
  ControlSchedule schedule;
  std::optional<CorrectedSchedule> correction;
  Trajectory trajectory;
};

// Builds the protocol schedule (with its correction) and propagates it.
PointRun build_and_propagate(const ExperimentConfig& cfg, Protocol p, double nu);
// Uncorrected base pulses at nu.
ControlSchedule base_schedule(const ExperimentConfig& cfg, Protocol p, double nu);
// Correction of the base pulses; empty for uncorrected protocols.
std::optional<CorrectedSchedule> synthesize(const ExperimentConfig& cfg, Protocol p,
                                            const ControlSchedule& base);

ResultRecord summarize(const ExperimentConfig& cfg, Protocol p, double nu, const PointRun& run);

// One record per (protocol, nu) pair: protocols outer, sweep points inner, in input
// order. Per-point failures land in status. With write_files the records go to
// <dir>/results.csv and, when enabled, trajectories to <dir>/trajectories/.
std::vector<ResultRecord> run(const ExperimentConfig& cfg, unsigned threads = 1,
                              bool write_files = true);

// Columns protocol, nu, final_fidelity, infidelity, window_fidelity, max_pop_b,
// leakage_max, mu_mid, splice_gain, mode_oscillations, status, trajectory_file, mode_file.
void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_results_csv(std::istream& in);

struct MuSummary {
  double nu = 0.0;
  double t_start = 0.0;
  double t_mid = 0.0;
  double mu_start = 0.0;
  double mu_mid = 0.0;
};

// Single-control dressing mu(t) on [t_i, t0/2] for every sweep point.
// profiles: columns nu, t, mu, mu_dot. Returns the per-nu summary.
std::vector<MuSummary> mu_profile_report(const ExperimentConfig& cfg, std::ostream& profiles);
void write_mu_summary_csv(std::ostream& out, const std::vector<MuSummary>& rows);

struct OracleReport {
  Protocol protocol = Protocol::vitanov_uncorrected;
  double nu = 0.0;
  std::vector<DeviationRow> rows;
};

// Full-continuum comparison for the first protocol at each sweep point.
std::vector<OracleReport> run_oracle(const ExperimentConfig& cfg);
void write_oracle_csv(std::ostream& out, const std::vector<OracleReport>& reports);

struct Mismatch {
  Protocol protocol = Protocol::vitanov_uncorrected;
  double nu = 0.0;
  double baseline = 0.0;
  double current = 0.0;
  double relative = 0.0;
  std::string reason;
};

struct ComparisonReport {
  std::size_t compared = 0;
  std::vector<Mismatch> mismatches;
  bool passed() const { return mismatches.empty(); }
};

// Relative comparison of final_fidelity per (protocol, nu) record.
// Throws DomainError(missing_baseline) when the file does not exist.
ComparisonReport compare_with_baseline(const std::vector<ResultRecord>& results,
                                       const std::filesystem::path& baseline,
                                       double rel_tol = 1e-6);
void write_comparison(std::ostream& out, const ComparisonReport& report);

}  // namespace stawg
