#include "gps/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gps {

void EmpiricalMeasure::validate() const {
  if (dim < 1) throw std::invalid_argument("empirical measure dimension must be >= 1");
  if (data.empty() || data.size() % dim != 0)
    throw std::invalid_argument("empirical measure must hold >= 1 complete point");
  for (double v : data)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical measure holds non-finite point");
}

std::vector<double> EmpiricalMeasure::sorted_values() const {
  if (dim != 1) throw std::domain_error("sorted_values requires d = 1");
  std::vector<double> v = data;
  std::sort(v.begin(), v.end());
  return v;
}

double gaussian_cdf(double x, const Gaussian1D& g) {
  const double z = (x - g.mean) / std::sqrt(g.var);
  return 0.5 * std::erfc(-z * 0.70710678118654752440084436210485);
}

void MixtureLaw1D::validate() const {
  if (components.empty() || weights.size() != components.size())
    throw std::invalid_argument("mixture needs matching weights and components");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("mixture weight negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("mixture weights must sum to 1");
  for (const auto& c : components)
    if (!(c.var > 0.0)) throw std::invalid_argument("mixture variance must be positive");
}

double MixtureLaw1D::cdf(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i)
    s += weights[i] * gaussian_cdf(x, components[i]);
  return s;
}

double MixtureLaw1D::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile level must be in (0,1)");
  double lo = components[0].mean, hi = components[0].mean, smax = 0.0;
  for (const auto& c : components) {
    lo = std::min(lo, c.mean);
    hi = std::max(hi, c.mean);
    smax = std::max(smax, std::sqrt(c.var));
  }
  lo -= 10.0 * smax;
  hi += 10.0 * smax;
  while (cdf(lo) > q) lo -= 10.0 * smax;
  while (cdf(hi) < q) hi += 10.0 * smax;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // reached double resolution
    if (cdf(mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double MixtureLaw1D::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i)
    s += weights[i] * components[i].mean;
  return s;
}

MixtureQuantileTable MixtureQuantileTable::build(const MixtureLaw1D& law,
                                                 int quad_points) {
  if (quad_points < 64)
    throw std::invalid_argument("quantile quadrature needs at least 64 points");
  law.validate();
  MixtureQuantileTable t;
  t.quad_points = quad_points;
  t.quantiles.resize(quad_points);
  for (int j = 0; j < quad_points; ++j)
    t.quantiles[j] = law.quantile((j + 0.5) / quad_points);
  return t;
}

}  // namespace gps
