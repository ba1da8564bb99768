#include "gps/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gps {

namespace {

double point_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                  int i, int j, int p) {
  const auto x = mu.point(i);
  const auto y = nu.point(j);
  double d2 = 0.0;
  for (int c = 0; c < mu.dim; ++c) d2 += (x[c] - y[c]) * (x[c] - y[c]);
  const double d = std::sqrt(d2);
  return p == 1 ? d : d2;
}

}  // namespace

double w1_sorted_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim != 1 || nu.dim != 1)
    throw std::domain_error("w1_sorted_1d requires d = 1");
  mu.validate();
  nu.validate();
  const std::vector<double> xs = mu.sorted_values();
  const std::vector<double> ys = nu.sorted_values();
  const int n = static_cast<int>(xs.size());
  const int m = static_cast<int>(ys.size());
  if (n == m) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::abs(xs[i] - ys[i]);
    return s / n;
  }
  // unequal sizes: integrate |F^-1_mu - F^-1_nu| over merged quantile levels
  double s = 0.0, level = 0.0;
  int i = 0, j = 0;
  while (i < n && j < m) {
    const double next = std::min(static_cast<double>(i + 1) / n,
                                 static_cast<double>(j + 1) / m);
    s += (next - level) * std::abs(xs[i] - ys[j]);
    level = next;
    if (static_cast<double>(i + 1) / n <= next + 1e-15) ++i;
    if (static_cast<double>(j + 1) / m <= next + 1e-15) ++j;
  }
  return s;
}

double wp_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     int p, int size_cap) {
  if (p != 1 && p != 2) throw std::domain_error("wp_assignment supports p in {1,2}");
  mu.validate();
  nu.validate();
  if (mu.dim != nu.dim) throw std::domain_error("dimension mismatch");
  const int n = mu.size();
  if (n != nu.size()) throw std::domain_error("wp_assignment requires equal point counts");
  if (n > size_cap) throw std::domain_error("point count exceeds assignment size cap");

  // shortest augmenting path with dual potentials, costs computed on the fly
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = point_cost(mu, nu, i0 - 1, j - 1, p) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += point_cost(mu, nu, match[j] - 1, j - 1, p);
  const double mean_cost = total / n;
  return p == 1 ? mean_cost : std::sqrt(mean_cost);
}

double wp_vs_quantile_table(std::span<const double> sorted_values,
                            const MixtureQuantileTable& table, int p) {
  const int q = table.quad_points;
  const int n = static_cast<int>(sorted_values.size());
  double s = 0.0;
  for (int j = 0; j < q; ++j) {
    const double level = (j + 0.5) / q;
    // empirical quantile: x_(k) for level in ((k-1)/n, k/n]
    int k = static_cast<int>(std::ceil(level * n));
    k = std::clamp(k, 1, n);
    const double diff = std::abs(sorted_values[k - 1] - table.quantiles[j]);
    s += p == 1 ? diff : diff * diff;
  }
  const double mean = s / q;
  return p == 1 ? mean : std::sqrt(mean);
}

double wp_vs_mixture_1d(const EmpiricalMeasure& mu, const MixtureLaw1D& law,
                        int p, int quad_points) {
  if (mu.dim != 1) throw std::domain_error("mixture distances require d = 1");
  if (p != 1 && p != 2) throw std::domain_error("p must be 1 or 2");
  mu.validate();
  const MixtureQuantileTable table = MixtureQuantileTable::build(law, quad_points);
  const std::vector<double> xs = mu.sorted_values();
  return wp_vs_quantile_table(xs, table, p);
}

double w1_vs_mixture_1d(const EmpiricalMeasure& mu, const MixtureLaw1D& law,
                        int quad_points) {
  return wp_vs_mixture_1d(mu, law, 1, quad_points);
}

double w2_gaussian_1d(const Gaussian1D& g1, const Gaussian1D& g2) {
  if (!(g1.var > 0.0) || !(g2.var > 0.0))
    throw std::domain_error("w2_gaussian_1d needs positive variances");
  const double dm = g1.mean - g2.mean;
  const double ds = std::sqrt(g1.var) - std::sqrt(g2.var);
  return std::sqrt(dm * dm + ds * ds);
}

double wp_mixture_mixture_1d(const MixtureLaw1D& a, const MixtureLaw1D& b,
                             int p, int quad_points) {
  if (p != 1 && p != 2) throw std::domain_error("p must be 1 or 2");
  const MixtureQuantileTable ta = MixtureQuantileTable::build(a, quad_points);
  const MixtureQuantileTable tb = MixtureQuantileTable::build(b, quad_points);
  double s = 0.0;
  for (int j = 0; j < quad_points; ++j) {
    const double diff = std::abs(ta.quantiles[j] - tb.quantiles[j]);
    s += p == 1 ? diff : diff * diff;
  }
  const double mean = s / quad_points;
  return p == 1 ? mean : std::sqrt(mean);
}

}  // namespace gps
