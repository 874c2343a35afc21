#include "stawg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include "stawg/csv.hpp"
#include "stawg/error.hpp"
#include "stawg/oracle.hpp"

namespace stawg {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string point_name(Protocol p, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%03zu.csv", index);
  return std::string(to_string(p)) + buf;
}

void open_for_write(std::ofstream& f, const std::filesystem::path& path) {
  f.open(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DomainError(ErrorKind::io, "cannot write " + path.string());
}

std::size_t stride_for(const Trajectory& traj, std::size_t max_rows) {
  if (max_rows == 0 || traj.size() <= max_rows) return 1;
  return (traj.size() + max_rows - 1) / max_rows;
}

void write_mode(std::ostream& out, const Trajectory& traj, std::size_t stride) {
  const auto f = temporal_mode(traj, traj.kappa);
  csv::write_header(out, {"t", "re_f", "im_f"});
  for (std::size_t i = 0; i < f.size(); ++i)
    if (i % stride == 0 || i + 1 == f.size())
      csv::write_row(out, {traj.t[i], f[i].real(), f[i].imag()});
}

}  // namespace

ControlSchedule base_schedule(const ExperimentConfig& cfg, Protocol p, double nu) {
  const double dt = cfg.dt(p, nu);
  if (is_tanh(p)) return tanh_schedule(cfg.tanh_spec(nu), dt);
  return vitanov_schedule(cfg.vitanov_spec(nu), dt);
}

std::optional<CorrectedSchedule> synthesize(const ExperimentConfig& cfg, Protocol p,
                                            const ControlSchedule& base) {
  switch (p) {
    case Protocol::vitanov_satd: return satd_kappa_schedule(base, 0.0);
    case Protocol::vitanov_satd_kappa: return satd_kappa_schedule(base, cfg.physics.kappa);
    case Protocol::tanh_corrected: {
      SingleControlOptions opts;
      opts.solver = cfg.numerics.dressing_solver;
      return single_control_schedule(base, cfg.physics.g, cfg.physics.kappa, opts);
    }
    default: return std::nullopt;
  }
}

PointRun build_and_propagate(const ExperimentConfig& cfg, Protocol p, double nu) {
  const ModelParams params = cfg.model_params();
  params.validate();
  ControlSchedule base = base_schedule(cfg, p, nu);
  auto correction = synthesize(cfg, p, base);
  ControlSchedule schedule = correction ? correction->corrected : base;
  Trajectory traj =
      propagate(schedule, params, SystemAmplitudes::level_a(), cfg.propagation_options(p));
  return {std::move(schedule), std::move(correction), std::move(traj)};
}

ResultRecord summarize(const ExperimentConfig&, Protocol p, double nu, const PointRun& run) {
  ResultRecord r;
  r.protocol = p;
  r.nu = nu;
  const Trajectory& tr = run.trajectory;
  r.final_fidelity = fidelity_final(tr);
  r.infidelity = 1.0 - r.final_fidelity;
  r.window_fidelity = tr.fidelity.at(tr.window_end);
  const auto pb = tr.population_b();
  r.max_pop_b = pb.empty() ? 0.0 : *std::max_element(pb.begin(), pb.end());
  r.leakage_max = run.correction ? max_leakage(*run.correction) : nan;
  r.mu_mid = run.correction && run.correction->dressing.size() > 0
                 ? run.correction->dressing.mu.back()
                 : nan;
  r.splice_gain = p == Protocol::tanh_corrected ? run.correction->splice_gain : nan;
  r.mode_oscillations = tr.kappa > 0.0
                            ? internal_oscillations(mode_magnitude(temporal_mode(tr, tr.kappa)))
                            : 0;
  return r;
}

std::vector<ResultRecord> run(const ExperimentConfig& cfg, unsigned threads, bool write_files) {
  struct Task {
    Protocol protocol;
    double nu;
    std::size_t index;
  };
  std::vector<Task> tasks;
  for (Protocol p : cfg.protocols)
    for (std::size_t i = 0; i < cfg.nu.size(); ++i) tasks.push_back({p, cfg.nu[i], i});

  const std::filesystem::path dir = cfg.output.directory;
  const bool trajectories = write_files && cfg.output.write_trajectories;
  if (write_files) std::filesystem::create_directories(dir);
  if (trajectories) {
    std::filesystem::create_directories(dir / "trajectories");
    std::filesystem::create_directories(dir / "modes");
  }

  std::vector<ResultRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      const auto start = std::chrono::steady_clock::now();
      ResultRecord rec;
      try {
        const PointRun pr = build_and_propagate(cfg, task.protocol, task.nu);
        rec = summarize(cfg, task.protocol, task.nu, pr);
        if (trajectories) {
          const std::string name = point_name(task.protocol, task.index);
          rec.trajectory_file = "trajectories/" + name;
          rec.mode_file = "modes/" + name;
          std::ofstream tf, mf;
          open_for_write(tf, dir / rec.trajectory_file);
          const std::size_t stride = stride_for(pr.trajectory, cfg.output.max_trajectory_rows);
          write_trajectory_csv(tf, pr.trajectory, stride);
          open_for_write(mf, dir / rec.mode_file);
          write_mode(mf, pr.trajectory, stride);
        }
      } catch (const Error& e) {
        rec = ResultRecord{};
        rec.final_fidelity = rec.infidelity = rec.window_fidelity = nan;
        rec.max_pop_b = rec.leakage_max = rec.mu_mid = rec.splice_gain = nan;
        rec.status = std::string(to_string(e.kind())) + ": " + e.what();
      }
      rec.protocol = task.protocol;
      rec.nu = task.nu;
      rec.runtime =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      records[k] = std::move(rec);
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (write_files) {
    std::ofstream out;
    open_for_write(out, dir / "results.csv");
    write_results_csv(out, records);
  }
  return records;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << "protocol,nu,final_fidelity,infidelity,window_fidelity,max_pop_b,leakage_max,mu_mid,"
         "splice_gain,mode_oscillations,status,trajectory_file,mode_file\n";
  for (const auto& r : records) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << to_string(r.protocol) << ',' << csv::format(r.nu) << ','
        << csv::format(r.final_fidelity) << ',' << csv::format(r.infidelity) << ','
        << csv::format(r.window_fidelity) << ',' << csv::format(r.max_pop_b) << ','
        << csv::format(r.leakage_max) << ',' << csv::format(r.mu_mid) << ','
        << csv::format(r.splice_gain) << ',' << r.mode_oscillations << ',' << status << ','
        << r.trajectory_file << ',' << r.mode_file << '\n';
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  const csv::TextTable t = csv::read_text(in);
  const std::size_t c_protocol = t.column("protocol"), c_nu = t.column("nu"),
                    c_f = t.column("final_fidelity"), c_status = t.column("status");
  std::vector<ResultRecord> out;
  for (const auto& row : t.rows) {
    ResultRecord r;
    r.protocol = protocol_from_string(row[c_protocol]);
    r.nu = csv::parse_number(row[c_nu]);
    r.final_fidelity = csv::parse_number(row[c_f]);
    r.infidelity = 1.0 - r.final_fidelity;
    r.status = row[c_status];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MuSummary> mu_profile_report(const ExperimentConfig& cfg, std::ostream& profiles) {
  const bool tanh_configured =
      std::any_of(cfg.protocols.begin(), cfg.protocols.end(), [](Protocol p) { return is_tanh(p); });
  if (!tanh_configured) throw ConfigError("mu-report: a tanh protocol must be configured");
  SingleControlOptions opts;
  opts.solver = cfg.numerics.dressing_solver;
  csv::write_header(profiles, {"nu", "t", "mu", "mu_dot"});
  std::vector<MuSummary> rows;
  for (double nu : cfg.nu) {
    const ControlSchedule base = base_schedule(cfg, Protocol::tanh_corrected, nu);
    const DressingProfile d = single_control_mu(base, cfg.physics.g, cfg.physics.kappa, opts);
    const std::size_t max_rows = cfg.output.max_trajectory_rows;
    const std::size_t stride = max_rows == 0 || d.size() <= max_rows ? 1 : (d.size() + max_rows - 1) / max_rows;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (i % stride == 0 || i + 1 == d.size())
        csv::write_row(profiles, {nu, d.t[i], d.mu[i], d.mu_dot[i]});
    rows.push_back({nu, d.t.front(), d.t.back(), d.mu.front(), d.mu.back()});
  }
  return rows;
}

void write_mu_summary_csv(std::ostream& out, const std::vector<MuSummary>& rows) {
  csv::write_header(out, {"nu", "t_start", "t_mid", "mu_start", "mu_mid"});
  for (const auto& r : rows) csv::write_row(out, {r.nu, r.t_start, r.t_mid, r.mu_start, r.mu_mid});
}

std::vector<OracleReport> run_oracle(const ExperimentConfig& cfg) {
  if (cfg.protocols.empty()) throw ConfigError("oracle: no protocol configured");
  const Protocol p = cfg.protocols.front();
  const ModelParams params = cfg.model_params();
  std::vector<OracleReport> out;
  for (double nu : cfg.nu) {
    const ControlSchedule base = base_schedule(cfg, p, nu);
    const auto corr = synthesize(cfg, p, base);
    const ControlSchedule& s = corr ? corr->corrected : base;
    out.push_back({p, nu,
                   markovian_deviation(s, params, cfg.oracle.grids, SystemAmplitudes::level_a(),
                                       cfg.oracle_options(p))});
  }
  return out;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleReport>& reports) {
  out << "protocol,nu,omega_max,n_modes,fidelity_full,fidelity_markov,fidelity_deviation,"
         "mode_l2_relative,band_edge_warning\n";
  for (const auto& rep : reports)
    for (const auto& r : rep.rows)
      out << to_string(rep.protocol) << ',' << csv::format(rep.nu) << ','
          << csv::format(r.omega_max) << ',' << r.n_modes << ',' << csv::format(r.fidelity_full)
          << ',' << csv::format(r.fidelity_markov) << ',' << csv::format(r.fidelity_deviation)
          << ',' << csv::format(r.mode_l2_relative) << ',' << (r.band_edge_warning ? 1 : 0)
          << '\n';
}

ComparisonReport compare_with_baseline(const std::vector<ResultRecord>& results,
                                       const std::filesystem::path& baseline, double rel_tol) {
  if (!std::filesystem::exists(baseline))
    throw DomainError(ErrorKind::missing_baseline, "baseline not found: " + baseline.string());
  std::ifstream in(baseline);
  if (!in) throw DomainError(ErrorKind::missing_baseline, "cannot read " + baseline.string());
  const auto base = read_results_csv(in);

  std::map<std::pair<std::string, double>, const ResultRecord*> index;
  for (const auto& b : base) index[{to_string(b.protocol), b.nu}] = &b;

  ComparisonReport rep;
  for (const auto& r : results) {
    ++rep.compared;
    const auto it = index.find({to_string(r.protocol), r.nu});
    if (it == index.end()) {
      rep.mismatches.push_back({r.protocol, r.nu, nan, r.final_fidelity, nan, "absent from baseline"});
      continue;
    }
    const ResultRecord& b = *it->second;
    if (!r.ok() || !b.ok()) {
      if (r.status != b.status)
        rep.mismatches.push_back({r.protocol, r.nu, b.final_fidelity, r.final_fidelity, nan,
                                  "status differs"});
      continue;
    }
    const double rel = std::abs(r.final_fidelity - b.final_fidelity) /
                       std::max(std::abs(b.final_fidelity), std::numeric_limits<double>::min());
    if (!(rel <= rel_tol))
      rep.mismatches.push_back({r.protocol, r.nu, b.final_fidelity, r.final_fidelity, rel,
                                "final_fidelity outside tolerance"});
  }
  return rep;
}

void write_comparison(std::ostream& out, const ComparisonReport& report) {
  out << (report.passed() ? "PASS" : "FAIL") << ": " << report.compared << " records compared, "
      << report.mismatches.size() << " mismatches\n";
  for (const auto& m : report.mismatches)
    out << "  " << to_string(m.protocol) << " nu=" << csv::format(m.nu)
        << " baseline=" << csv::format(m.baseline) << " current=" << csv::format(m.current)
        << " rel=" << csv::format(m.relative) << " (" << m.reason << ")\n";
}

}  // namespace stawg
