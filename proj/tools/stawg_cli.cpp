// Command-line front end. Exit codes: 0 success, 1 baseline mismatch,
// 2 configuration or domain error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "stawg/config.hpp"
#include "stawg/csv.hpp"
#include "stawg/error.hpp"
#include "stawg/harness.hpp"

namespace fs = std::filesystem;
using namespace stawg;

namespace {

struct Common {
  std::string config;
  std::string out;
  unsigned threads = 0;
  bool seedless = false;
  std::optional<double> nu;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (!c.out.empty()) cfg.output.directory = c.out;
  return cfg;
}

double point_nu(const ExperimentConfig& cfg, const Common& c) {
  if (c.nu) {
    if (!(*c.nu > 0.0)) throw ConfigError("--nu must be > 0");
    return *c.nu;
  }
  if (cfg.nu.empty()) throw ConfigError("no sweep point; pass --nu");
  return cfg.nu.front();
}

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output.directory);
  const fs::path p = fs::path(cfg.output.directory) / name;
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw DomainError(ErrorKind::io, "cannot write " + p.string());
  return f;
}

unsigned thread_count(const Common& c) {
  if (c.threads > 0) return c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void print_record(const ResultRecord& r) {
  std::cout << to_string(r.protocol) << " nu=" << csv::format(r.nu);
  if (r.ok())
    std::cout << " F=" << csv::format(r.final_fidelity) << " 1-F=" << csv::format(r.infidelity)
              << " max|uB|^2=" << csv::format(r.max_pop_b);
  else
    std::cout << " failed (" << r.status << ")";
  std::cout << " [" << r.runtime << " s]\n";
}

int cmd_synthesize(const Common& c) {
  const auto cfg = load(c);
  const double nu = point_nu(cfg, c);
  for (Protocol p : cfg.protocols) {
    const ControlSchedule base = base_schedule(cfg, p, nu);
    const auto corr = synthesize(cfg, p, base);
    const std::string name = std::string("pulses_") + to_string(p) + ".csv";
    auto f = open_out(cfg, name);
    if (corr) {
      write_corrected_csv(f, *corr);
      std::cout << name << ": leakage max " << csv::format(max_leakage(*corr)) << '\n';
    } else {
      write_schedule_csv(f, base);
      std::cout << name << '\n';
    }
  }
  return 0;
}

int cmd_simulate(const Common& c) {
  const auto cfg = load(c);
  const double nu = point_nu(cfg, c);
  for (Protocol p : cfg.protocols) {
    const PointRun run = build_and_propagate(cfg, p, nu);
    auto f = open_out(cfg, std::string("trajectory_") + to_string(p) + ".csv");
    write_trajectory_csv(f, run.trajectory);
    print_record(summarize(cfg, p, nu, run));
  }
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  const auto start = std::chrono::steady_clock::now();
  const auto records = run(cfg, thread_count(c));
  std::size_t failed = 0;
  for (const auto& r : records) {
    print_record(r);
    failed += r.ok() ? 0 : 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << records.size() << " points, " << failed << " failed, " << secs << " s; wrote "
            << (fs::path(cfg.output.directory) / "results.csv").string() << '\n';
  return 0;
}

int cmd_oracle(const Common& c) {
  auto cfg = load(c);
  if (c.nu) cfg.nu = {point_nu(cfg, c)};
  const auto reports = run_oracle(cfg);
  auto f = open_out(cfg, "oracle.csv");
  write_oracle_csv(f, reports);
  for (const auto& rep : reports)
    for (const auto& r : rep.rows)
      std::cout << to_string(rep.protocol) << " nu=" << csv::format(rep.nu)
                << " omega_max=" << csv::format(r.omega_max) << " N=" << r.n_modes
                << " |dF|=" << csv::format(r.fidelity_deviation)
                << " mode L2=" << csv::format(r.mode_l2_relative)
                << (r.band_edge_warning ? " (band-edge warning)" : "") << '\n';
  return 0;
}

int cmd_mu_report(const Common& c) {
  auto cfg = load(c);
  if (c.nu) cfg.nu = {point_nu(cfg, c)};
  auto profiles = open_out(cfg, "mu_profiles.csv");
  const auto rows = mu_profile_report(cfg, profiles);
  auto summary = open_out(cfg, "mu_summary.csv");
  write_mu_summary_csv(summary, rows);
  for (const auto& r : rows)
    std::cout << "nu=" << csv::format(r.nu) << " mu(t_i)=" << csv::format(r.mu_start)
              << " mu(t0/2)=" << csv::format(r.mu_mid) << '\n';
  return 0;
}

int cmd_compare(const Common& c, const std::string& baseline, double rtol) {
  const auto cfg = load(c);
  const auto records = run(cfg, thread_count(c), !c.out.empty());
  const auto report = compare_with_baseline(records, baseline, rtol);
  write_comparison(std::cout, report);
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STA-corrected state transfer into a waveguide"};
  app.require_subcommand(1);
  Common common;
  std::string baseline;
  double rtol = 1e-6;

  auto add_common = [&](CLI::App* sub, bool with_nu) {
    sub->add_option("--config", common.config, "experiment configuration (JSON)")->required();
    sub->add_option("--out", common.out, "output directory (overrides output.directory)");
    sub->add_option("--threads", common.threads, "worker threads (default: hardware)");
    sub->add_flag("--seedless", common.seedless,
                  "no-op: every computation is deterministic and no RNG exists");
    if (with_nu) sub->add_option("--nu", common.nu, "single protocol speed (default: first sweep point)");
  };

  auto* synth = app.add_subcommand("synthesize", "write corrected pulse CSVs");
  add_common(synth, true);
  auto* sim = app.add_subcommand("simulate", "propagate one point and write its trajectory");
  add_common(sim, true);
  auto* sweep = app.add_subcommand("sweep", "run the configured nu sweep");
  add_common(sweep, false);
  auto* oracle = app.add_subcommand("oracle", "compare against the discretized continuum");
  add_common(oracle, true);
  auto* mu = app.add_subcommand("mu-report", "single-control dressing profiles");
  add_common(mu, true);
  auto* cmp = app.add_subcommand("compare", "rerun the sweep and compare with a results.csv");
  add_common(cmp, false);
  cmp->add_option("--baseline", baseline, "baseline results.csv")->required();
  cmp->add_option("--rtol", rtol, "relative tolerance on final_fidelity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synthesize(common);
    if (*sim) return cmd_simulate(common);
    if (*sweep) return cmd_sweep(common);
    if (*oracle) return cmd_oracle(common);
    if (*mu) return cmd_mu_report(common);
    if (*cmp) return cmd_compare(common, baseline, rtol);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << '\n';
    return 2;
  }
  return 2;
}
