#pragma once

#include <span>
#include <vector>

namespace gps {

// Equally weighted point cloud in R^d, stored row-major.
struct EmpiricalMeasure {
  int dim = 1;
  std::vector<double> data;

  EmpiricalMeasure() = default;
  EmpiricalMeasure(int d, std::vector<double> pts) : dim(d), data(std::move(pts)) {}

  int size() const { return dim == 0 ? 0 : static_cast<int>(data.size()) / dim; }
  std::span<const double> point(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  void validate() const;  // nonempty, finite, consistent

  // dim==1 only: sorted copy of the samples
  std::vector<double> sorted_values() const;
};

struct Gaussian1D {
  double mean = 0.0;
  double var = 1.0;
};

double gaussian_cdf(double x, const Gaussian1D& g);

// Finite mixture of 1-D Gaussians; the discretized u-averaged law.
struct MixtureLaw1D {
  std::vector<double> weights;
  std::vector<Gaussian1D> components;

  void validate() const;
  double cdf(double x) const;
  // bisection on the cdf, |interval| <= 1e-12
  double quantile(double q) const;
  double mean() const;
};

// Cached mixture quantiles at midpoint levels (j+0.5)/Q; one build serves
// many empirical-vs-mixture distance evaluations.
struct MixtureQuantileTable {
  int quad_points = 0;
  std::vector<double> quantiles;

  static MixtureQuantileTable build(const MixtureLaw1D& law, int quad_points);
};

}  // namespace gps
