#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gps {

// Summation with a fixed pairwise tree, independent of thread count and
// insensitive to accumulation-order roundoff drift.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double sq(double x) { return x * x; }

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Adaptive Simpson quadrature.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Weighted least squares of y on x (affine). Weights default to 1.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w = {});

}  // namespace gps
