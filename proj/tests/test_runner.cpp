#include <doctest.h>

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gps/runner.hpp"

using namespace gps;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.graphon = Graphon::constant(1.0);
  cfg.drift = DriftSpec::linear_mean_reverting(2.0, 0.5);
  cfg.initial = InitialLawFamily::gaussian({0, 1}, {{1.0}}, {{0.0}}, 1.0, 0.2);
  cfg.numerics.n_values = {32};
  cfg.numerics.dt = 0.02;
  cfg.numerics.T = 0.3;
  cfg.numerics.save_times = {0.3};
  cfg.numerics.times = {0.3};
  cfg.numerics.epsilons = {0.15};
  cfg.numerics.replications = 40;
  cfg.numerics.quad_points = 256;
  cfg.numerics.m = 8;
  cfg.seed = 17;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("gps_test_" + tag)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("validate experiment passes on the built-in linear config") {
  TempDir dir("validate");
  CHECK(run_experiment(small_config(ExperimentKind::validate), dir.path.string()) ==
        kExitOk);
  CHECK(fs::exists(dir.path / "validate.txt"));
  CHECK(fs::exists(dir.path / "manifest.json"));
  const std::string log = read_file(dir.path / "validate.txt");
  CHECK(log.find("FAIL") == std::string::npos);
}

TEST_CASE("rerun with identical config produces byte-identical artifacts") {
  TempDir d1("rerun1"), d2("rerun2"), d3("rerun3");
  const ExperimentConfig cfg = small_config(ExperimentKind::tail_marginal);
  omp_set_num_threads(1);
  REQUIRE(run_experiment(cfg, d1.path.string()) == kExitOk);
  omp_set_num_threads(2);
  REQUIRE(run_experiment(cfg, d2.path.string()) == kExitOk);
  omp_set_num_threads(8);
  REQUIRE(run_experiment(cfg, d3.path.string()) == kExitOk);
  omp_set_num_threads(2);
  CHECK(read_file(d1.path / "tail.csv") == read_file(d2.path / "tail.csv"));
  CHECK(read_file(d1.path / "tail.csv") == read_file(d3.path / "tail.csv"));
}

TEST_CASE("simulate experiment writes trajectory and diagnostic artifacts") {
  TempDir dir("simulate");
  ExperimentConfig cfg = small_config(ExperimentKind::simulate);
  cfg.numerics.replications = 2;
  REQUIRE(run_experiment(cfg, dir.path.string()) == kExitOk);
  const std::string traj = read_file(dir.path / "trajectories.csv");
  CHECK(traj.find("replication,t,i,x0") != std::string::npos);
  const std::string diag = read_file(dir.path / "diagnostics.csv");
  CHECK(diag.find("discounted_integral") != std::string::npos);
  // identical rerun into the same directory is allowed (hash matches)
  CHECK(run_experiment(cfg, dir.path.string()) == kExitOk);
}

TEST_CASE("limit experiment exports the flow") {
  TempDir dir("limit");
  ExperimentConfig cfg = small_config(ExperimentKind::limit);
  REQUIRE(run_experiment(cfg, dir.path.string()) == kExitOk);
  const std::string csv = read_file(dir.path / "limitlaw.csv");
  CHECK(csv.find("u,t,mean0,variance") != std::string::npos);
}

TEST_CASE("mismatched config hash in the output directory is refused") {
  TempDir dir("hashclash");
  ExperimentConfig cfg = small_config(ExperimentKind::tail_marginal);
  REQUIRE(run_experiment(cfg, dir.path.string()) == kExitOk);
  cfg.seed = 999;  // different experiment, same directory
  CHECK(run_experiment(cfg, dir.path.string()) == kExitConfig);
}

TEST_CASE("unwritable output path exits with the io code and leaves nothing") {
  ExperimentConfig cfg = small_config(ExperimentKind::tail_marginal);
  cfg.numerics.replications = 4;
  CHECK(run_experiment(cfg, "/proc/definitely/not/writable") == kExitIo);
}

TEST_CASE("mgf experiment runs the hoeffding and sub-gaussian batteries") {
  TempDir dir("mgf");
  ExperimentConfig cfg = small_config(ExperimentKind::mgf_checks);
  cfg.graphon = Graphon::constant(0.5);
  cfg.mode = SampleMode::bernoulli;
  cfg.numerics.n_values = {32};
  cfg.numerics.replications = 2000;
  cfg.numerics.theta_grid = {1.0, 4.0};
  CHECK(run_experiment(cfg, dir.path.string()) == kExitOk);
  CHECK(read_file(dir.path / "mgf.csv").find("margin") != std::string::npos);
  CHECK(read_file(dir.path / "subgaussian.csv").find("rademacher") !=
        std::string::npos);
}

TEST_CASE("appendix_c experiment emits tail rows") {
  TempDir dir("appc");
  ExperimentConfig cfg = small_config(ExperimentKind::appendix_c);
  cfg.initial = InitialLawFamily::gaussian({0, 1}, {{0.0}}, {{1.0}}, 1.0, 0.2);
  cfg.numerics.n_values = {16, 32, 64};
  cfg.numerics.epsilons = {0.25};
  cfg.numerics.replications = 400;
  const int code = run_experiment(cfg, dir.path.string());
  CHECK((code == kExitOk || code == kExitInconclusive));
  CHECK(read_file(dir.path / "tail.csv").find("n,epsilon") != std::string::npos);
}
