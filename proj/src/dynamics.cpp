#include "gps/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gps/util.hpp"

namespace gps {

DriftSpec DriftSpec::linear_mean_reverting(double c1, double c2, int dim) {
  if (!(c1 > 0.0) || c2 < 0.0) throw std::invalid_argument("need c1 > 0 and c2 >= 0");
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  DriftSpec s;
  s.kind = Kind::linear_mean_reverting;
  s.dim = dim;
  s.c1 = c1;
  s.c2 = c2;
  s.K_f = c1 + c2;
  s.K_b = c2;
  s.c0 = c1 + c2;
  s.b_at_zero_bounded = (c2 == 0.0);  // b(x,0) = c2 x
  return s;
}

DriftSpec DriftSpec::custom(double alpha, double gamma, double beta_x,
                            double beta_y, double beta_0, double declared_K_f,
                            double declared_K_b, double declared_c0, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  DriftSpec s;
  s.kind = Kind::custom;
  s.dim = dim;
  s.alpha = alpha;
  s.gamma = gamma;
  s.beta_x = beta_x;
  s.beta_y = beta_y;
  s.beta_0 = beta_0;
  s.K_f = declared_K_f;
  s.K_b = declared_K_b;
  s.c0 = declared_c0;
  if (std::abs(declared_c0) > declared_K_f + 1e-12)
    throw std::invalid_argument("|c0| <= K_f violated by declared constants");
  s.b_at_zero_bounded = (beta_x == 0.0);  // b(x,0) = beta_x x + beta_0
  return s;
}

void DriftSpec::f(std::span<const double> x, std::span<double> out) const {
  if (kind == Kind::linear_mean_reverting) {
    const double r = -(c1 + c2);
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = r * x[c];
  } else {
    for (std::size_t c = 0; c < x.size(); ++c)
      out[c] = -alpha * x[c] + gamma * std::sin(x[c]);
  }
}

double kappa_of(const DriftSpec& spec) { return spec.c0 - 2.0 * spec.K_b; }

bool is_dissipative(const DriftSpec& spec) { return kappa_of(spec) > 0.0; }

double estimate_c0(const DriftSpec& spec, int sample_count, double radius,
                   std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const int d = spec.dim;
  const rng::Key k = rng::master(seed).with(rng::stream_pairs);
  std::vector<double> x1(d), x2(d), f1(d), f2(d);

  auto draw_point = [&](rng::Key kp, std::span<double> out) {
    // isotropic direction scaled to a uniform radius in the ball
    double n2 = 0.0;
    for (int c = 0; c < d; ++c) {
      out[c] = rng::normal(kp.with(static_cast<std::uint64_t>(c)));
      n2 += out[c] * out[c];
    }
    const double r =
        radius * std::pow(rng::uniform01(kp, 7), 1.0 / d) / std::max(std::sqrt(n2), 1e-300);
    for (int c = 0; c < d; ++c) out[c] *= r;
  };

  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int s = 0; s < sample_count; ++s) {
    const rng::Key ks = k.with(static_cast<std::uint64_t>(s));
    draw_point(ks.with(1), x1);
    draw_point(ks.with(2), x2);
    double dist2 = 0.0;
    for (int c = 0; c < d; ++c) dist2 += sq(x1[c] - x2[c]);
    if (dist2 < 1e-24) continue;  // degenerate pair, skip
    spec.f(x1, f1);
    spec.f(x2, f2);
    double dot = 0.0;
    for (int c = 0; c < d; ++c) dot += (x1[c] - x2[c]) * (f1[c] - f2[c]);
    best = std::min(best, -dot / dist2);
    any = true;
  }
  if (!any) throw std::runtime_error("estimate_c0: all sampled pairs degenerate");
  return best;
}

InitialLawFamily InitialLawFamily::gaussian(
    std::vector<double> boundaries, std::vector<std::vector<double>> intercepts,
    std::vector<std::vector<double>> slopes, double variance, double theta0,
    int dim) {
  InitialLawFamily f;
  f.kind = Kind::gaussian_per_block;
  f.dim = dim;
  f.boundaries = std::move(boundaries);
  f.intercepts = std::move(intercepts);
  f.slopes = std::move(slopes);
  f.variance = variance;
  f.theta0 = theta0;
  f.validate();
  double lip = 0.0;
  for (const auto& s : f.slopes) {
    double n2 = 0.0;
    for (double v : s) n2 += v * v;
    lip = std::max(lip, std::sqrt(n2));
  }
  f.K_G_init = lip;  // exact for shared-variance Gaussians: W2 = |mean gap|
  return f;
}

InitialLawFamily InitialLawFamily::point_mass(
    std::vector<double> boundaries, std::vector<std::vector<double>> intercepts,
    std::vector<std::vector<double>> slopes, int dim) {
  InitialLawFamily f;
  f.kind = Kind::point_mass;
  f.dim = dim;
  f.boundaries = std::move(boundaries);
  f.intercepts = std::move(intercepts);
  f.slopes = std::move(slopes);
  f.variance = 0.0;
  f.theta0 = 0.0;
  f.validate();
  double lip = 0.0;
  for (const auto& s : f.slopes) {
    double n2 = 0.0;
    for (double v : s) n2 += v * v;
    lip = std::max(lip, std::sqrt(n2));
  }
  f.K_G_init = lip;
  return f;
}

void InitialLawFamily::validate() const {
  if (dim < 1) throw std::invalid_argument("initial law dimension must be >= 1");
  if (boundaries.size() < 2 || boundaries.front() != 0.0 || boundaries.back() != 1.0)
    throw std::invalid_argument("initial law boundaries must run from 0 to 1");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (!(boundaries[i] > boundaries[i - 1]))
      throw std::invalid_argument("initial law boundaries must be strictly increasing");
  const std::size_t nb = boundaries.size() - 1;
  if (intercepts.size() != nb || slopes.size() != nb)
    throw std::invalid_argument("initial law needs one affine mean per block");
  for (std::size_t b = 0; b < nb; ++b)
    if (intercepts[b].size() != static_cast<std::size_t>(dim) ||
        slopes[b].size() != static_cast<std::size_t>(dim))
      throw std::invalid_argument("initial law mean coefficients must have length dim");
  if (kind == Kind::gaussian_per_block) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian initial law needs variance > 0");
    if (!(theta0 > 0.0)) throw std::invalid_argument("theta0 must be positive");
    // finiteness criterion for the square-exponential moment
    if (!(theta0 < 1.0 / (2.0 * variance * dim)))
      throw std::invalid_argument("theta0 too large for the declared variance");
  }
}

int InitialLawFamily::block_of(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("u outside [0,1]");
  const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), u);
  int idx = static_cast<int>(it - boundaries.begin()) - 1;
  return std::min(idx, static_cast<int>(boundaries.size()) - 2);
}

void InitialLawFamily::mean_at(double u, std::span<double> out) const {
  const int b = block_of(u);
  for (int c = 0; c < dim; ++c) out[c] = intercepts[b][c] + slopes[b][c] * u;
}

double InitialLawFamily::sigma() const { return std::sqrt(variance); }

void InitialLawFamily::draw(double u, rng::Key k, std::span<double> out) const {
  mean_at(u, out);
  if (kind == Kind::gaussian_per_block) {
    const double s = sigma();
    for (int c = 0; c < dim; ++c)
      out[c] += s * rng::normal(k.with(static_cast<std::uint64_t>(c)));
  }
}

EmpiricalMeasure sample_initial(const InitialLawFamily& family, double u,
                                int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  const rng::Key k = rng::master(seed).with(rng::stream_init).with_double(u);
  EmpiricalMeasure m;
  m.dim = family.dim;
  m.data.resize(static_cast<std::size_t>(count) * family.dim);
  for (int i = 0; i < count; ++i)
    family.draw(u, k.with(static_cast<std::uint64_t>(i)),
                {m.data.data() + static_cast<std::size_t>(i) * family.dim,
                 static_cast<std::size_t>(family.dim)});
  return m;
}

}  // namespace gps
