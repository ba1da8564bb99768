#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gps/dynamics.hpp"
#include "gps/graphon.hpp"
#include "gps/limitlaw.hpp"
#include "gps/measure.hpp"

namespace gps {

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct SimOptions {
  double dt = 0.01;
  double T = 1.0;
  std::vector<double> save_times;  // subset of the dt grid
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::deterministic;
  bool parallel = true;       // serial reference path kept for testing
  bool force_general = false; // bypass the aggregated fast path
};

struct Snapshot {
  double t = 0.0;
  EmpiricalMeasure nu;
};

// Euler-Maruyama for the finite heterogeneous system
//   dX_i = [f(X_i) + (1/n) sum_j xi_ij b(X_i,X_j)] dt + dB_i.
// Aggregated O(n) path for deterministic constant/block-constant graphons,
// dense O(n^2) path otherwise; bit-reproducible from (seed, n, dt).
std::vector<Snapshot> run_finite(const Graphon& g, const DriftSpec& spec,
                                 const InitialLawFamily& init, int n,
                                 const SimOptions& opt);

struct DiagnosticsFrame {
  double t = 0.0;
  std::vector<double> R_norm;        // |R^{n,i}|
  std::vector<double> T_tilde_norm;  // |T~^{n,i}|
  std::vector<double> T_norm;        // |T^{n,i}|
  double p_integrand = 0.0;
  double discounted_integral = 0.0;
  double max_identity_gap = 0.0;  // max_i |R - (T~ + T)| over components
  double coupling_rms = 0.0;      // sqrt((1/n) sum |X_i - Xbar_i|^2)
};

struct CoupledResult {
  std::vector<double> times;
  std::vector<EmpiricalMeasure> nu;      // finite system
  std::vector<EmpiricalMeasure> nu_bar;  // coupled limit particles
  std::vector<DiagnosticsFrame> frames;
};

// Finite system and limit particles driven by identical initial draws and
// Brownian increments; limit drift evaluated against the LimitLaw.
CoupledResult run_coupled(const Graphon& g, const DriftSpec& spec,
                          const InitialLawFamily& init, const LimitLaw& law,
                          int n, const SimOptions& opt);

// per-time root-mean-square coupling distance
std::vector<double> coupling_gap(const CoupledResult& res);

}  // namespace gps
