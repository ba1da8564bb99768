#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gps/dynamics.hpp"
#include "gps/graphon.hpp"

namespace gps {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentKind {
  simulate,
  limit,
  tail_sup,
  tail_marginal,
  invariant,
  appendix_c,
  mgf_checks,
  validate,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_of(const std::string& name);

struct NumericsConfig {
  std::vector<int> n_values{256};
  int m = 256;       // u-grid size
  int M = 2000;      // picard particles per node
  double dt = 0.01;
  double T = 1.0;
  std::vector<double> save_times;
  std::vector<double> times;      // evaluation times for tail experiments
  std::vector<double> epsilons{0.1};
  int replications = 1000;
  int quad_points = 4096;
  int picard_iterations = 20;
  double picard_tol = 1e-3;
  int d_prime = 2;
  int p_order = 1;                // appendix_c harness
  std::vector<double> theta_grid{1.0, 4.0, 16.0};  // mgf checks
  int mgf_row = 0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::validate;
  Graphon graphon = Graphon::constant(1.0);
  SampleMode mode = SampleMode::deterministic;
  DriftSpec drift = DriftSpec::linear_mean_reverting(2.0, 0.5);
  InitialLawFamily initial = InitialLawFamily::gaussian(
      {0.0, 1.0}, {{1.0}}, {{0.0}}, 1.0, 0.2);
  NumericsConfig numerics;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: library default
  std::string output_dir = "out";

  void validate() const;  // cross-field consistency
};

// Parse/serialize. Unknown keys are hard errors carrying the field path;
// parse(serialize(c)) reproduces c exactly.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a of the canonical serialization
std::uint64_t config_hash(const ExperimentConfig& cfg);

// FNV-1a of the canonical graphon block alone
std::uint64_t graphon_spec_hash(const Graphon& g);

}  // namespace gps
