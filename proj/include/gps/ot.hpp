#pragma once

#include <span>

#include "gps/measure.hpp"

namespace gps {

// Exact W1 on the line via sorted samples; unequal sizes fall back to the
// merged quantile-function form (still exact).
double w1_sorted_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Exact W_p (p in {1,2}) via minimum-cost perfect matching
// (Jonker-Volgenant shortest augmenting paths), any dimension.
double wp_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     int p, int size_cap = 4096);

// W1 between an empirical measure and a Gaussian mixture by midpoint
// quadrature of |F^-1_mu - F^-1_law| over quad_points quantile levels.
double w1_vs_mixture_1d(const EmpiricalMeasure& mu, const MixtureLaw1D& law,
                        int quad_points);

// Same quantile coupling for p in {1,2}.
double wp_vs_mixture_1d(const EmpiricalMeasure& mu, const MixtureLaw1D& law,
                        int p, int quad_points);

// Hot path: sorted sample values against a prebuilt quantile table.
double wp_vs_quantile_table(std::span<const double> sorted_values,
                            const MixtureQuantileTable& table, int p);

// W2 between 1-D Gaussians: sqrt((m1-m2)^2 + (s1-s2)^2)
double w2_gaussian_1d(const Gaussian1D& g1, const Gaussian1D& g2);

// W_p (quantile coupling) between two 1-D Gaussian mixtures by quadrature.
double wp_mixture_mixture_1d(const MixtureLaw1D& a, const MixtureLaw1D& b,
                             int p, int quad_points);

}  // namespace gps
