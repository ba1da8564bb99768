#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gps/dynamics.hpp"
#include "gps/graphon.hpp"
#include "gps/limitlaw.hpp"
#include "gps/simulate.hpp"

namespace gps {

struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};
WilsonInterval wilson_interval(int count, int total, double z = 1.959963984540054);

struct TailRow {
  int n = 0;
  double epsilon = 0.0;
  double t = -1.0;  // -1 encodes "sup over saved times"
  int replications = 0;
  int exceed_count = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0, ci_hi = 1.0;
  bool censored = false;  // p_hat below 5/R, upper bound only
};

struct RateFit {
  double slope_n_eps2 = 0.0, r2_n_eps2 = 0.0;
  double slope_sqrtn_eps = 0.0, r2_sqrtn_eps = 0.0;
  int points_used = 0;
  bool non_decaying = false;
};

struct TailEstimate {
  std::vector<TailRow> rows;
  std::optional<RateFit> fit;  // across n at the first epsilon
  int d_prime = 0;             // recorded only; N0 is not constructive
  bool condition_special = false;
  double mixture_bias_bound = 0.0;  // O(K/m) u-discretization bias of hat_mu
  std::string flag;  // "", "inconclusive", "epsilon_too_small", ...
};

// weighted least squares of -log p against n*eps^2 and sqrt(n)*eps;
// throws std::runtime_error when fewer than 3 rows have p_hat in (0,1)
RateFit rate_fit(std::span<const TailRow> rows);

struct TailConfig {
  Graphon g = Graphon::constant(1.0);
  DriftSpec drift;
  InitialLawFamily init;
  std::vector<int> n_values;
  std::vector<double> epsilons;
  std::vector<double> times;  // evaluation times (marginal) or save grid (sup)
  double dt = 0.01;
  double T = 0.0;  // 0: use max(times)
  SampleMode mode = SampleMode::deterministic;
  int replications = 1000;
  int quad_points = 4096;
  int m = 256;  // u-grid size for hat_mu
  // picard reference knobs (custom drifts only)
  int picard_particles = 2000;
  int picard_iterations = 20;
  double picard_tol = 1e-3;
  std::uint64_t seed = 0;
  int d_prime = 2;
  bool parallel = true;
};

// P(sup_{t in save grid} W1(nu^n_t, hat_mu_t) > eps); precondition: the
// fitted time-regularity modulus satisfies C_hat * sqrt(grid step) <= eps/10.
TailEstimate estimate_tail_sup(const TailConfig& cfg);

// per-time P(W1(nu^n_t, hat_mu_t) > eps) over the time list
TailEstimate estimate_tail_marginal(const TailConfig& cfg);

struct InvariantReport {
  std::vector<double> decay_times;
  std::vector<double> decay_w2;  // W2(hat_mu_t, hat_mu_inf)
  double fitted_rate = 0.0;
  double fitted_r2 = 0.0;
  double C_tilde = 0.0;  // fitted prefactor
  double T0_hat = 0.0;   // 2/kappa
  double eps0_hat = 0.0; // 2*C_tilde
  double t_star = 0.0;   // T0_hat * log(eps0_hat/eps), clamped at 0
  TailRow row_t1;        // p_hat(W1(nu_t, hat_mu_inf) > eps) at t=1
  TailRow row_tstar;     //                                    at t=t_star
};

// Invariant-measure reconstruction experiment; refuses non-dissipative
// configurations.
InvariantReport invariant_experiment(const TailConfig& cfg);

// Independent-draws harness: X^i ~ mu_i independent (not identically distributed),
// W_p(hat mu^n, mu^n) exceedance over an n list.
TailEstimate indep_empirical_tail(const InitialLawFamily& laws,
                                  std::span<const int> n_values, double epsilon,
                                  int p_order, int replications,
                                  std::uint64_t seed, int quad_points = 4096,
                                  bool parallel = true);

// Centered 1-D test laws for the sub-Gaussian bound check.
struct RademacherLaw {};
struct UniformLaw {
  double halfwidth = 1.0;
};
struct TruncatedGaussianLaw {
  double sigma = 1.0;
  double radius = 1.0;
};
struct PointMassLaw {};
using CenteredLaw1D =
    std::variant<RademacherLaw, UniformLaw, TruncatedGaussianLaw, PointMassLaw>;

double sqexp_moment(const CenteredLaw1D& law, double inv_a);  // E e^{|Y|^2/a}
double mgf(const CenteredLaw1D& law, double lambda);          // E e^{lambda Y}

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& w) : std::runtime_error(w) {}
};

// max over the lambda grid of log E e^{lambda Y} - (5a/2) lambda^2.
// Throws PreconditionError if E e^{|Y|^2/a} > 2.
double subgaussian_bound_check(const CenteredLaw1D& law, double a,
                               std::span<const double> lambda_grid);

struct MgfCheckRow {
  double theta = 0.0;
  int sign = +1;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  double bound = 0.0;  // exp(theta^2 / 8n)
  double margin = 0.0; // estimate - bound - 3*stderr
};
struct MgfCheckResult {
  std::vector<MgfCheckRow> rows;
  double worst_margin = 0.0;
};

// E exp(+-(theta/n) sum_j (xi_ij - G)) vs exp(theta^2/8n), Bernoulli mode.
MgfCheckResult hoeffding_mgf_check(const Graphon& g, int n, int i,
                                   std::span<const double> theta_grid, int R,
                                   std::uint64_t seed);

}  // namespace gps
