#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "gps/dynamics.hpp"
#include "gps/graphon.hpp"
#include "gps/measure.hpp"

namespace gps {

// Block-respecting u-grid: each block is split into equal cells, nodes at
// cell midpoints, weight = cell width. No cell straddles a boundary.
struct UGrid {
  std::vector<double> boundaries;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<int> block;
  std::vector<int> block_start;  // node index range of block b: [start[b], start[b+1])

  int size() const { return static_cast<int>(nodes.size()); }
  int block_of(double u) const;
};

UGrid build_ugrid(const std::vector<double>& boundaries, int m);

// merge two boundary lists (graphon blocks and initial-law blocks)
std::vector<double> merge_boundaries(const std::vector<double>& a,
                                     const std::vector<double>& b);

// Gaussian marginals mu_bar_{u,t} = N(mean_u(t), var_u(t) I_d) on the grid,
// stored on the full dt time grid.
struct GaussianFlow {
  UGrid grid;
  int dim = 1;
  double dt = 0.0;
  std::vector<double> times;                // times[k] = k*dt
  std::vector<std::vector<double>> mean;    // [step][node*dim + c]
  std::vector<std::vector<double>> var;     // [step][node]

  int step_count() const { return static_cast<int>(times.size()); }
  // exact grid lookup; throws on off-grid t (no interpolation in time)
  int time_index(double t) const;
  // piecewise-linear in u within the block containing u
  void marginal_at(double u, int step, std::span<double> mean_out,
                   double& var_out) const;
};

struct StationaryLaw {
  UGrid grid;
  int dim = 1;
  std::vector<double> mean;  // node*dim
  std::vector<double> var;   // node
};

// Coupled linear integral-ODE system for the linear mean-reverting drift
// with Gaussian initial laws, integrated by classical RK4:
//   m_u' = (c2 deg(u) - c1 - c2) m_u + c2 sum_k w_k G(u,u_k) m_{u_k}
//   v_u' = 2 (c2 deg(u) - c1 - c2) v_u + 1
GaussianFlow solve_linear_gaussian(const Graphon& g, const DriftSpec& spec,
                                   const InitialLawFamily& init, int m,
                                   double dt, double T);

// Fixed point of the mean system (direct linear solve) and
// v_u = 1 / (2 (c1 + c2 - c2 deg(u))). Requires dissipativity.
StationaryLaw stationary_linear_gaussian(const Graphon& g,
                                         const DriftSpec& spec, int m);

// Picard law iteration: per-node particle clouds simulated against the
// previous iterate's marginals, common random numbers across iterations.
struct SampleCloud {
  UGrid grid;
  int dim = 1;
  int particles = 0;
  double dt = 0.0;
  std::vector<double> save_times;
  // clouds[s][node*particles*dim + p*dim + c] at save_times[s]
  std::vector<std::vector<double>> clouds;
  // per-step node means driving the drift, [step][node*dim + c]
  std::vector<std::vector<double>> mean_path;

  bool converged = false;
  int iterations = 0;
  double achieved_gap = 0.0;

  EmpiricalMeasure node_cloud(int save_idx, int node) const;
};

struct PicardOptions {
  int m = 64;
  int particles = 2000;  // M
  int max_iterations = 20;
  double dt = 0.01;
  double T = 1.0;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  std::vector<double> save_times;
  bool parallel = true;
};

SampleCloud solve_picard(const Graphon& g, const DriftSpec& spec,
                         const InitialLawFamily& init,
                         const PicardOptions& opt);

using LimitLaw = std::variant<GaussianFlow, SampleCloud>;

// u-averaged law at a saved time: mixture over grid nodes (GaussianFlow)
MixtureLaw1D hat_mu(const GaussianFlow& flow, double t);
MixtureLaw1D hat_mu(const StationaryLaw& st);
// pooled union of the per-node clouds (SampleCloud)
EmpiricalMeasure hat_mu_pooled(const SampleCloud& cloud, double t);

}  // namespace gps
