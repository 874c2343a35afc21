#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stawg/config.hpp"
#include "stawg/csv.hpp"
#include "stawg/error.hpp"
#include "stawg/harness.hpp"

using namespace stawg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stawg_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* small_sweep = R"({
  "version": 1,
  "protocol": ["vitanov_uncorrected", "vitanov_satd", "vitanov_satd_kappa"],
  "physics": {"kappa": 1.0, "G0": 1.0},
  "sweep": {"values": [1.0, 2.0, 4.0]},
  "output": {"max_trajectory_rows": 500}
})";

}  // namespace

TEST_CASE("config defaults") {
  const auto cfg = parse_config(R"({"version": 1, "protocol": "vitanov_satd_kappa"})");
  REQUIRE(cfg.protocols.size() == 1);
  CHECK(cfg.protocols[0] == Protocol::vitanov_satd_kappa);
  REQUIRE(cfg.nu.size() == 25);
  CHECK(cfg.nu.front() == 0.1);
  CHECK(cfg.nu.back() == 10.0);
  CHECK(cfg.nu[12] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cfg.physics.kappa == 1.0);
  CHECK(cfg.physics.gamma == 0.0);
  CHECK(!cfg.numerics.dt);
  CHECK(cfg.dt(Protocol::vitanov_satd_kappa, 1.0) == doctest::Approx(0.005));
  CHECK(cfg.dt(Protocol::tanh_corrected, 1.0) == doctest::Approx(1.0 / (200.0 * std::hypot(30.0, 6.0))));
  CHECK(cfg.propagation_options(Protocol::vitanov_satd).tail_controls == TailControls::switched_off);
  CHECK(cfg.propagation_options(Protocol::tanh_corrected).tail_controls == TailControls::held);
  CHECK(cfg.tanh_spec(1.0).t0 == doctest::Approx(13.51699).epsilon(1e-5));
}

TEST_CASE("config field parsing") {
  const auto cfg = parse_config(R"({
    "version": 1,
    "protocol": ["tanh_uncorrected", "tanh_corrected"],
    "physics": {"kappa": 2.0, "gamma": 0.002, "g": 12.0, "Gmax": 60.0, "t0": 9.0, "label": "x"},
    "sweep": {"log_range": {"min": 0.5, "max": 2.0, "points": 3}},
    "numerics": {"dt": 1e-4, "tail_controls": "switched_off", "dressing_solver": "dormand_prince",
                 "tail": false, "rel_tol": 1e-9},
    "oracle": {"omega_max": [100], "n_modes": [2048], "tail_time": 10},
    "output": {"directory": "somewhere", "write_trajectories": false}
  })");
  CHECK(cfg.protocols.size() == 2);
  CHECK(cfg.nu.size() == 3);
  CHECK(cfg.nu[1] == doctest::Approx(1.0));
  CHECK(cfg.physics.t0.value() == 9.0);
  CHECK(cfg.tanh_spec(1.0).t0 == 9.0);
  CHECK(*cfg.numerics.dt == 1e-4);
  CHECK(cfg.dt(Protocol::tanh_corrected, 1.0) == 1e-4);
  CHECK(cfg.numerics.dressing_solver == DressingSolver::dormand_prince);
  CHECK(!cfg.propagation_options(Protocol::tanh_corrected).tail);
  CHECK(cfg.propagation_options(Protocol::tanh_corrected).tail_controls == TailControls::switched_off);
  CHECK(cfg.oracle.grids.size() == 1);
  CHECK(cfg.oracle.grids[0].n_modes == 2048);
  CHECK(cfg.output.directory == "somewhere");
  CHECK(!cfg.output.write_trajectories);
  CHECK(cfg.model_params().gamma == 0.002);
}

TEST_CASE("config errors name the field") {
  CHECK(error_of(R"({"protocol": "vitanov_satd"})").find("version") != std::string::npos);
  CHECK(error_of(R"({"version": 2, "protocol": "vitanov_satd"})").find("version") != std::string::npos);
  CHECK(error_of(R"({"version": 1})").find("protocol") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "x", "extra": 1})").find("extra") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": ["vitanov_satd", "nope"]})").find("protocol[1]") !=
        std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "numerics": {"dtt": 1}})")
            .find("numerics.dtt") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "physics": {"kappa": -1}})")
            .find("physics.kappa") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "physics": {"g": 40}})")
            .find("physics.Gmax") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "sweep": {"values": [1, -2]}})")
            .find("sweep.values[1]") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "sweep": {}})").find("sweep") !=
        std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "sweep": {"log_range": {"min": 1, "max": 2, "points": 2.5}}})")
            .find("sweep.log_range.points") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "oracle": {"omega_max": [1, 2], "n_modes": [4]}})")
            .find("oracle.n_modes") != std::string::npos);
  CHECK(error_of(R"({"version": 1, "protocol": "vitanov_satd", "output": {"directory": 3}})")
            .find("output.directory") != std::string::npos);
  CHECK(error_of("{not json").find("malformed") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("shipped configurations parse") {
  for (const char* name : {"vitanov_sweep.json", "vitanov_gamma_sweep.json", "tanh_sweep.json", "dressing.json", "oracle.json"}) {
    const fs::path p = fs::path(STAWG_SOURCE_DIR) / "tools" / "configs" / name;
    CHECK_NOTHROW(load_config(p));
  }
}

TEST_CASE("empty sweep succeeds with no records") {
  auto cfg = parse_config(R"({"version": 1, "protocol": "vitanov_satd", "sweep": {"values": []}})");
  cfg.output.directory = scratch("empty").string();
  const auto rec = run(cfg, 2);
  CHECK(rec.empty());
  const std::string csv = slurp(fs::path(cfg.output.directory) / "results.csv");
  CHECK(csv.find('\n') == csv.size() - 1);
}

TEST_CASE("sweep records and orderings") {
  auto cfg = parse_config(small_sweep);
  cfg.output.directory = scratch("serial").string();
  const auto serial = run(cfg, 1);
  REQUIRE(serial.size() == 9);
  CHECK(serial[0].protocol == Protocol::vitanov_uncorrected);
  CHECK(serial[3].protocol == Protocol::vitanov_satd);
  CHECK(serial[8].protocol == Protocol::vitanov_satd_kappa);
  CHECK(serial[8].nu == 4.0);
  for (const auto& r : serial) {
    CHECK(r.ok());
    CHECK(r.infidelity == 1.0 - r.final_fidelity);
    CHECK(r.infidelity >= -1e-12);
    CHECK(fs::exists(fs::path(cfg.output.directory) / r.trajectory_file));
    CHECK(fs::exists(fs::path(cfg.output.directory) / r.mode_file));
  }
  CHECK(std::isnan(serial[0].leakage_max));
  CHECK(serial[6].leakage_max < 1e-8);
  // the kappa-aware correction wins at every point
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial[6 + i].infidelity < serial[i].infidelity);
    CHECK(serial[6 + i].infidelity < serial[3 + i].infidelity);
  }
  // faster protocols populate B more
  CHECK(serial[6].max_pop_b < serial[7].max_pop_b);
  CHECK(serial[7].max_pop_b < serial[8].max_pop_b);

  auto par = cfg;
  par.output.directory = scratch("parallel").string();
  run(par, 4);
  const fs::path a = cfg.output.directory, b = par.output.directory;
  CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
  for (const auto& r : serial) CHECK(slurp(a / r.trajectory_file) == slurp(b / r.trajectory_file));
  const std::string first = slurp(a / "results.csv");
  run(cfg, 3);
  CHECK(slurp(a / "results.csv") == first);
}

TEST_CASE("per-point failures are recorded") {
  auto cfg = parse_config(R"({"version": 1, "protocol": "vitanov_satd_kappa",
    "sweep": {"values": [0.5, 5.0]}, "numerics": {"dt": 0.01}})");
  const auto rec = run(cfg, 1, false);
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].ok());
  CHECK(!rec[1].ok());
  CHECK(rec[1].status.rfind("step-too-coarse", 0) == 0);
  CHECK(std::isnan(rec[1].final_fidelity));
}

TEST_CASE("baseline comparison") {
  auto cfg = parse_config(small_sweep);
  cfg.output.directory = scratch("baseline").string();
  cfg.output.write_trajectories = false;
  const auto base = run(cfg, 1);
  const fs::path file = fs::path(cfg.output.directory) / "results.csv";

  CHECK(compare_with_baseline(run(cfg, 2, false), file).passed());

  auto fine = cfg;
  fine.numerics.dt = 0.0025;
  const auto halved = run(fine, 1, false);
  CHECK(compare_with_baseline(halved, file, 1e-5).passed());

  auto perturbed = cfg;
  perturbed.physics.kappa = 1.01;
  const auto rep = compare_with_baseline(run(perturbed, 1, false), file);
  CHECK(!rep.passed());
  CHECK(rep.mismatches.size() >= 3);
  std::ostringstream msg;
  write_comparison(msg, rep);
  CHECK(msg.str().rfind("FAIL", 0) == 0);

  try {
    compare_with_baseline(base, "/nonexistent/results.csv");
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(e.kind() == ErrorKind::missing_baseline);
  }
}

TEST_CASE("results csv round trip") {
  std::vector<ResultRecord> recs(2);
  recs[0].protocol = Protocol::tanh_corrected;
  recs[0].nu = 0.1 + 0.2;
  recs[0].final_fidelity = 0.9999999999991;
  recs[1].status = "singularity: a, b";
  std::stringstream ss;
  write_results_csv(ss, recs);
  const auto back = read_results_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].protocol == Protocol::tanh_corrected);
  CHECK(back[0].nu == 0.1 + 0.2);
  CHECK(back[0].final_fidelity == 0.9999999999991);
  CHECK(back[1].status == "singularity: a; b");
}

TEST_CASE("dressing report") {
  auto cfg = parse_config(R"({"version": 1, "protocol": "tanh_corrected",
    "sweep": {"values": [2.0]}, "output": {"max_trajectory_rows": 300}})");
  std::stringstream prof;
  const auto rows = mu_profile_report(cfg, prof);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mu_mid == doctest::Approx(0.0031437).epsilon(1e-4));
  CHECK(rows[0].mu_start < rows[0].mu_mid);
  CHECK(rows[0].t_mid == doctest::Approx(cfg.tanh_spec(2.0).t0 / 2));
  CHECK(csv::read(prof).rows.size() <= 301);

  auto k0 = cfg;
  k0.physics.kappa = 0.0;
  std::stringstream p0;
  CHECK_THROWS_AS(mu_profile_report(k0, p0), NumericalError);

  auto v = parse_config(R"({"version": 1, "protocol": "vitanov_satd"})");
  std::stringstream pv;
  CHECK_THROWS_AS(mu_profile_report(v, pv), ConfigError);
}
