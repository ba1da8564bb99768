#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gps/measure.hpp"
#include "gps/rng.hpp"

namespace gps {

// Drift pair (f,b). Both kinds have b affine in each argument,
//   b(x,y) = bx*x + by*y + b0   (componentwise),
// which keeps the interaction average closed-form. f is linear for the
// mean-reverting kind and -alpha*x + gamma*sin(x) (componentwise) for custom.
struct DriftSpec {
  enum class Kind { linear_mean_reverting, custom };

  Kind kind = Kind::linear_mean_reverting;
  int dim = 1;

  // linear_mean_reverting: f(x) = -(c1+c2) x, b(x,y) = c2 (x+y)
  double c1 = 0.0, c2 = 0.0;

  // custom f coefficients
  double alpha = 0.0, gamma = 0.0;
  // custom b coefficients
  double beta_x = 0.0, beta_y = 0.0, beta_0 = 0.0;

  // declared constants (exact for the linear kind)
  double K_f = 0.0, K_b = 0.0, c0 = 0.0;
  bool b_at_zero_bounded = false;

  static DriftSpec linear_mean_reverting(double c1, double c2, int dim = 1);
  static DriftSpec custom(double alpha, double gamma, double beta_x,
                          double beta_y, double beta_0, double declared_K_f,
                          double declared_K_b, double declared_c0,
                          int dim = 1);

  void f(std::span<const double> x, std::span<double> out) const;

  double bx() const {
    return kind == Kind::linear_mean_reverting ? c2 : beta_x;
  }
  double by() const {
    return kind == Kind::linear_mean_reverting ? c2 : beta_y;
  }
  double b0() const { return kind == Kind::linear_mean_reverting ? 0.0 : beta_0; }
};

double kappa_of(const DriftSpec& spec);       // c0 - 2 K_b
bool is_dissipative(const DriftSpec& spec);   // kappa > 0

// min over sampled pairs in the ball of -(x1-x2).(f(x1)-f(x2))/|x1-x2|^2;
// an upper-bound estimate of c0. Throws if every pair degenerates.
double estimate_c0(const DriftSpec& spec, int sample_count, double radius,
                   std::uint64_t seed);

// Per-u initial laws, block-wise affine in u with a shared scalar variance.
struct InitialLawFamily {
  enum class Kind { gaussian_per_block, point_mass };

  Kind kind = Kind::gaussian_per_block;
  int dim = 1;
  std::vector<double> boundaries{0.0, 1.0};
  // mean(u) = intercept[block] + slope[block] * u, componentwise
  std::vector<std::vector<double>> intercepts;  // [block][dim]
  std::vector<std::vector<double>> slopes;      // [block][dim]
  double variance = 1.0;                        // sigma0^2 (0 for point mass)
  double theta0 = 0.0;
  double K_G_init = 0.0;

  static InitialLawFamily gaussian(std::vector<double> boundaries,
                                   std::vector<std::vector<double>> intercepts,
                                   std::vector<std::vector<double>> slopes,
                                   double variance, double theta0,
                                   int dim = 1);
  static InitialLawFamily point_mass(std::vector<double> boundaries,
                                     std::vector<std::vector<double>> intercepts,
                                     std::vector<std::vector<double>> slopes,
                                     int dim = 1);

  int block_of(double u) const;
  void mean_at(double u, std::span<double> out) const;
  double sigma() const;
  void validate() const;

  // one draw addressed by key; used by samplers and the simulator
  void draw(double u, rng::Key k, std::span<double> out) const;
};

EmpiricalMeasure sample_initial(const InitialLawFamily& family, double u,
                                int count, std::uint64_t seed);

}  // namespace gps
