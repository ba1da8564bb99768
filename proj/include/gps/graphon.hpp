#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gps/rng.hpp"

namespace gps {

enum class SampleMode { deterministic, bernoulli };

// Directed graphon restricted to a closed-form family so range and block
// Lipschitz invariants are checkable. Blocks partition [0,1] as
// [a0,a1) ... [a_{N-1}, a_N] with a0=0, a_N=1.
class Graphon {
 public:
  enum class Kind { constant, block_constant, product, min, block_affine };

  // g = a + b*u + c*v on a block rectangle
  struct Affine {
    double a = 0.0, b = 0.0, c = 0.0;
  };

  static Graphon constant(double c);
  static Graphon product();
  static Graphon min();
  static Graphon block_constant(std::vector<double> boundaries,
                                std::vector<std::vector<double>> values);
  static Graphon block_affine(std::vector<double> boundaries,
                              std::vector<std::vector<Affine>> coeffs);

  Kind kind() const { return kind_; }
  const std::vector<double>& boundaries() const { return boundaries_; }
  int block_count() const { return static_cast<int>(boundaries_.size()) - 1; }
  int block_of(double u) const;  // throws std::domain_error outside [0,1]
  double block_value(int bi, int bj) const { return values_[bi][bj]; }
  double lipschitz() const { return lipschitz_; }

  std::string describe() const;

 private:
  Graphon() = default;
  void validate() const;

  Kind kind_ = Kind::constant;
  std::vector<double> boundaries_{0.0, 1.0};
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<Affine>> affine_;
  double constant_ = 0.0;
  double lipschitz_ = 0.0;

  friend double eval(const Graphon&, double, double);
  friend double degree(const Graphon&, double);
};

double eval(const Graphon& g, double u, double v);

// \int_0^1 G(u,v) dv; closed form except block_affine (composite quadrature)
double degree(const Graphon& g, double u);

// max over same-block grid pairs of |dG| / (|du|+|dv|); testing helper
double check_block_lipschitz(const Graphon& g, double grid_step);

// Particle index convention: 0-based index p corresponds to u = (p+1)/n,
// matching evaluation of G at (i/n, j/n) with i,j in {1..n}.
inline double u_of_index(int p, int n) {
  return static_cast<double>(p + 1) / static_cast<double>(n);
}

// Sampled interaction weights. Entries derive from a counter-based function
// of (seed,i,j), so single entries are computable without the full matrix.
class InteractionMatrix {
 public:
  InteractionMatrix(Graphon g, int n, SampleMode mode, std::uint64_t seed = 0,
                    bool undirected = false);

  int size() const { return n_; }
  SampleMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  const Graphon& graphon() const { return g_; }

  double entry(int i, int j) const;       // 0-based
  std::vector<double> dense() const;      // row-major n*n
  double row_mean(int i) const;           // (1/n) sum_j entry(i,j)

 private:
  Graphon g_;
  int n_;
  SampleMode mode_;
  std::uint64_t seed_;
  bool undirected_;
  rng::Key xi_key_;
};

InteractionMatrix sample_interaction(const Graphon& g, int n, SampleMode mode,
                                     std::uint64_t seed = 0);

}  // namespace gps
