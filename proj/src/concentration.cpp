#include "gps/concentration.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gps/ot.hpp"
#include "gps/util.hpp"

namespace gps {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

WilsonInterval wilson_interval(int count, int total, double z) {
  if (total < 1 || count < 0 || count > total)
    throw std::invalid_argument("wilson_interval needs 0 <= count <= total");
  const double n = total, p = static_cast<double>(count) / n, z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

RateFit rate_fit(std::span<const TailRow> rows) {
  std::vector<double> x1, x2, y, w;
  for (const TailRow& r : rows) {
    if (!(r.p_hat > 0.0 && r.p_hat < 1.0)) continue;
    x1.push_back(r.n * r.epsilon * r.epsilon);
    x2.push_back(std::sqrt(static_cast<double>(r.n)) * r.epsilon);
    y.push_back(-std::log(r.p_hat));
    // delta-method variance of -log p_hat is (1-p)/(R p)
    w.push_back(r.replications * r.p_hat / std::max(1.0 - r.p_hat, 1e-12));
  }
  if (x1.size() < 3)
    throw std::runtime_error("rate_fit needs at least 3 points with p_hat in (0,1)");
  RateFit fit;
  const LineFit f1 = fit_line(x1, y, w);
  const LineFit f2 = fit_line(x2, y, w);
  fit.slope_n_eps2 = f1.slope;
  fit.r2_n_eps2 = f1.r2;
  fit.slope_sqrtn_eps = f2.slope;
  fit.r2_sqrtn_eps = f2.r2;
  fit.points_used = static_cast<int>(x1.size());
  fit.non_decaying = !(fit.slope_n_eps2 > 1e-12);
  return fit;
}

namespace {

struct ReferenceLaw {
  // quantiles of hat_mu at each evaluation time
  std::vector<MixtureQuantileTable> tables;
  std::vector<MixtureLaw1D> mixtures;
  double bias_bound = 0.0;
};

std::uint64_t replication_seed(std::uint64_t master_seed, int replication) {
  return rng::master(master_seed)
      .with(rng::stream_replication)
      .with(static_cast<std::uint64_t>(replication))
      .state;
}

ReferenceLaw build_reference(const TailConfig& cfg, const GaussianFlow& flow,
                             const std::vector<double>& times) {
  ReferenceLaw ref;
  for (double t : times) {
    MixtureLaw1D law = hat_mu(flow, t);
    ref.tables.push_back(MixtureQuantileTable::build(law, cfg.quad_points));
    ref.mixtures.push_back(std::move(law));
  }
  // u-discretization bias of the mixture: same-block W2/|du| ratio of the
  // flow times half a cell width
  double klip = 0.0;
  const auto& grid = flow.grid;
  double wmax = 0.0;
  for (int k = 0; k + 1 < grid.size(); ++k) {
    if (grid.block[k] != grid.block[k + 1]) continue;
    wmax = std::max(wmax, grid.weights[k]);
    for (std::size_t s = 0; s < flow.mean.size(); s += std::max<std::size_t>(1, flow.mean.size() / 64)) {
      const double w2 = w2_gaussian_1d({flow.mean[s][k], flow.var[s][k]},
                                       {flow.mean[s][k + 1], flow.var[s][k + 1]});
      klip = std::max(klip, w2 / (grid.nodes[k + 1] - grid.nodes[k]));
    }
  }
  ref.bias_bound = 0.5 * wmax * klip;
  return ref;
}

MixtureQuantileTable empirical_table(std::vector<double> pooled, int quad_points) {
  std::sort(pooled.begin(), pooled.end());
  MixtureQuantileTable t;
  t.quad_points = quad_points;
  t.quantiles.resize(quad_points);
  const int n = static_cast<int>(pooled.size());
  for (int j = 0; j < quad_points; ++j) {
    const double q = (j + 0.5) / quad_points;
    const int k = std::clamp(static_cast<int>(std::ceil(q * n)), 1, n);
    t.quantiles[j] = pooled[k - 1];
  }
  return t;
}

// per-time reference quantiles of hat_mu: gaussian mixture for the linear
// drift, pooled picard clouds otherwise
ReferenceLaw build_reference_any(const TailConfig& cfg,
                                 const std::vector<double>& times, double T) {
  if (cfg.drift.kind == DriftSpec::Kind::linear_mean_reverting &&
      cfg.init.kind == InitialLawFamily::Kind::gaussian_per_block) {
    const GaussianFlow flow =
        solve_linear_gaussian(cfg.g, cfg.drift, cfg.init, cfg.m, cfg.dt, T);
    return build_reference(cfg, flow, times);
  }
  PicardOptions popt;
  popt.m = cfg.m;
  popt.particles = cfg.picard_particles;
  popt.max_iterations = cfg.picard_iterations;
  popt.dt = cfg.dt;
  popt.T = T;
  popt.tol = cfg.picard_tol;
  popt.seed = rng::master(cfg.seed).with(rng::stream_picard).state;
  popt.save_times = times;
  popt.parallel = cfg.parallel;
  const SampleCloud cloud = solve_picard(cfg.g, cfg.drift, cfg.init, popt);
  ReferenceLaw ref;
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    ref.tables.push_back(empirical_table(cloud.clouds[ti], cfg.quad_points));
  // node-mean spread as the same-block u-resolution bias proxy
  double klip = 0.0, wmax = 0.0;
  const auto& grid = cloud.grid;
  for (int k = 0; k + 1 < grid.size(); ++k) {
    if (grid.block[k] != grid.block[k + 1]) continue;
    wmax = std::max(wmax, grid.weights[k]);
    for (const auto& step_means : cloud.mean_path)
      klip = std::max(klip, std::abs(step_means[k + 1] - step_means[k]) /
                                (grid.nodes[k + 1] - grid.nodes[k]));
  }
  ref.bias_bound = 0.5 * wmax * klip;
  return ref;
}

// per-replication exceedance bits, aggregated in replication order
struct ExceedanceCounts {
  // counts[time][eps]
  std::vector<std::vector<int>> counts;
};

}  // namespace

TailEstimate estimate_tail_marginal(const TailConfig& cfg) {
  if (cfg.drift.dim != 1)
    throw std::invalid_argument("tail experiments require d = 1");
  if (cfg.times.empty() || cfg.n_values.empty() || cfg.epsilons.empty())
    throw std::invalid_argument("tail experiment needs times, n values and epsilons");
  if (!is_dissipative(cfg.drift))
    throw std::invalid_argument("dissipativity required for marginal tail experiments");
  const double T = cfg.T > 0.0 ? cfg.T : *std::max_element(cfg.times.begin(), cfg.times.end());
  const ReferenceLaw ref = build_reference_any(cfg, cfg.times, T);

  TailEstimate est;
  est.d_prime = cfg.d_prime;
  est.condition_special =
      cfg.mode == SampleMode::deterministic || cfg.drift.b_at_zero_bounded;
  est.mixture_bias_bound = ref.bias_bound;

  const int R = cfg.replications;
  const int nt = static_cast<int>(cfg.times.size());
  const int ne = static_cast<int>(cfg.epsilons.size());

  for (int n : cfg.n_values) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(R) * nt * ne, 0);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (int r = 0; r < R; ++r) {
      SimOptions opt;
      opt.dt = cfg.dt;
      opt.T = T;
      opt.save_times = cfg.times;
      opt.seed = replication_seed(cfg.seed, r);
      opt.mode = cfg.mode;
      opt.parallel = false;  // parallelism lives at the replication level
      const auto snaps = run_finite(cfg.g, cfg.drift, cfg.init, n, opt);
      for (int ti = 0; ti < nt; ++ti) {
        const std::vector<double> xs = snaps[ti].nu.sorted_values();
        const double w1 = wp_vs_quantile_table(xs, ref.tables[ti], 1);
        for (int ei = 0; ei < ne; ++ei)
          bits[(static_cast<std::size_t>(r) * nt + ti) * ne + ei] =
              w1 > cfg.epsilons[ei] ? 1 : 0;
      }
    }
    for (int ti = 0; ti < nt; ++ti)
      for (int ei = 0; ei < ne; ++ei) {
        int count = 0;
        for (int r = 0; r < R; ++r)
          count += bits[(static_cast<std::size_t>(r) * nt + ti) * ne + ei];
        TailRow row;
        row.n = n;
        row.epsilon = cfg.epsilons[ei];
        row.t = cfg.times[ti];
        row.replications = R;
        row.exceed_count = count;
        row.p_hat = static_cast<double>(count) / R;
        const WilsonInterval ci = wilson_interval(count, R);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        row.censored = row.p_hat < 5.0 / R;
        est.rows.push_back(row);
      }
  }

  // rate fit across n at the first epsilon and first time
  std::vector<TailRow> fit_rows;
  for (const TailRow& r : est.rows)
    if (r.epsilon == cfg.epsilons.front() && r.t == cfg.times.front())
      fit_rows.push_back(r);
  try {
    est.fit = rate_fit(fit_rows);
  } catch (const std::runtime_error&) {
    est.flag = "inconclusive";
  }
  bool all_zero = true, all_one = true;
  for (const TailRow& r : est.rows) {
    all_zero = all_zero && r.exceed_count == 0;
    all_one = all_one && r.exceed_count == r.replications;
  }
  if (all_zero) est.flag = "epsilon_too_large";
  if (all_one) est.flag = "epsilon_too_small";
  return est;
}

TailEstimate estimate_tail_sup(const TailConfig& cfg) {
  if (cfg.drift.dim != 1)
    throw std::invalid_argument("tail experiments require d = 1");
  if (cfg.times.size() < 2)
    throw std::invalid_argument("sup experiment needs a saved time grid");
  const double T = cfg.T > 0.0 ? cfg.T : cfg.times.back();
  const ReferenceLaw ref = build_reference_any(cfg, cfg.times, T);

  // fitted time-regularity modulus C_hat: W1(hat_mu_t, hat_mu_s) <= C sqrt(dt)
  double c_hat = 0.0, dmax = 0.0;
  for (std::size_t k = 0; k + 1 < cfg.times.size(); ++k) {
    const double gap = cfg.times[k + 1] - cfg.times[k];
    dmax = std::max(dmax, gap);
    double w1 = 0.0;
    for (int j = 0; j < cfg.quad_points; ++j)
      w1 += std::abs(ref.tables[k].quantiles[j] - ref.tables[k + 1].quantiles[j]);
    w1 /= cfg.quad_points;
    c_hat = std::max(c_hat, w1 / std::sqrt(gap));
  }
  const double eps_min = *std::min_element(cfg.epsilons.begin(), cfg.epsilons.end());
  if (c_hat * std::sqrt(dmax) > eps_min / 10.0)
    throw std::invalid_argument(
        "save grid too coarse: fitted modulus * sqrt(step) exceeds epsilon/10");

  TailEstimate est;
  est.d_prime = cfg.d_prime;
  est.condition_special =
      cfg.mode == SampleMode::deterministic || cfg.drift.b_at_zero_bounded;
  est.mixture_bias_bound = ref.bias_bound;

  const int R = cfg.replications;
  const int nt = static_cast<int>(cfg.times.size());
  const int ne = static_cast<int>(cfg.epsilons.size());

  for (int n : cfg.n_values) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(R) * ne, 0);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (int r = 0; r < R; ++r) {
      SimOptions opt;
      opt.dt = cfg.dt;
      opt.T = T;
      opt.save_times = cfg.times;
      opt.seed = replication_seed(cfg.seed, r);
      opt.mode = cfg.mode;
      opt.parallel = false;
      const auto snaps = run_finite(cfg.g, cfg.drift, cfg.init, n, opt);
      double wmax = 0.0;
      for (int ti = 0; ti < nt; ++ti) {
        const std::vector<double> xs = snaps[ti].nu.sorted_values();
        wmax = std::max(wmax, wp_vs_quantile_table(xs, ref.tables[ti], 1));
      }
      for (int ei = 0; ei < ne; ++ei)
        bits[static_cast<std::size_t>(r) * ne + ei] =
            wmax > cfg.epsilons[ei] ? 1 : 0;
    }
    for (int ei = 0; ei < ne; ++ei) {
      int count = 0;
      for (int r = 0; r < R; ++r)
        count += bits[static_cast<std::size_t>(r) * ne + ei];
      TailRow row;
      row.n = n;
      row.epsilon = cfg.epsilons[ei];
      row.t = -1.0;  // sup marker
      row.replications = R;
      row.exceed_count = count;
      row.p_hat = static_cast<double>(count) / R;
      const WilsonInterval ci = wilson_interval(count, R);
      row.ci_lo = ci.lo;
      row.ci_hi = ci.hi;
      row.censored = row.p_hat < 5.0 / R;
      est.rows.push_back(row);
    }
  }
  std::vector<TailRow> fit_rows;
  for (const TailRow& r : est.rows)
    if (r.epsilon == cfg.epsilons.front()) fit_rows.push_back(r);
  try {
    est.fit = rate_fit(fit_rows);
  } catch (const std::runtime_error&) {
    est.flag = "inconclusive";
  }
  bool all_zero = true, all_one = true;
  for (const TailRow& r : est.rows) {
    all_zero = all_zero && r.exceed_count == 0;
    all_one = all_one && r.exceed_count == r.replications;
  }
  if (all_zero) est.flag = "epsilon_too_large";
  if (all_one) est.flag = "epsilon_too_small";
  return est;
}

InvariantReport invariant_experiment(const TailConfig& cfg) {
  if (!is_dissipative(cfg.drift))
    throw std::invalid_argument("invariant experiment requires a dissipative drift");
  if (cfg.drift.dim != 1)
    throw std::invalid_argument("invariant experiment requires d = 1");
  const double kappa = kappa_of(cfg.drift);
  const double eps = cfg.epsilons.front();

  InvariantReport rep;
  rep.T0_hat = 2.0 / kappa;

  // closed-form decay curve from the Gaussian flow
  const double t_fit = std::max(5.0, 4.0 / kappa);
  const GaussianFlow flow =
      solve_linear_gaussian(cfg.g, cfg.drift, cfg.init, cfg.m, cfg.dt, t_fit);
  const StationaryLaw st = stationary_linear_gaussian(cfg.g, cfg.drift, cfg.m);
  const MixtureLaw1D mix_inf = hat_mu(st);

  const int fit_points = 21;
  std::vector<double> ts, ys;
  for (int k = 0; k < fit_points; ++k) {
    const double t = t_fit * k / (fit_points - 1);
    const MixtureLaw1D mix_t = hat_mu(flow, flow.times[flow.time_index(
                                                std::round(t / cfg.dt) * cfg.dt)]);
    double w2;
    if (mix_t.components.size() == 1 && mix_inf.components.size() == 1)
      w2 = w2_gaussian_1d(mix_t.components[0], mix_inf.components[0]);
    else
      w2 = wp_mixture_mixture_1d(mix_t, mix_inf, 2, cfg.quad_points);
    rep.decay_times.push_back(t);
    rep.decay_w2.push_back(w2);
    if (w2 > 1e-9) {
      ts.push_back(t);
      ys.push_back(std::log(w2));
    }
  }
  if (ts.size() < 3) throw std::runtime_error("decay curve degenerate");
  const LineFit lf = fit_line(ts, ys);
  rep.fitted_rate = -lf.slope;
  rep.fitted_r2 = lf.r2;
  rep.C_tilde = std::exp(lf.intercept);
  rep.eps0_hat = 2.0 * rep.C_tilde;
  rep.t_star = std::max(0.0, rep.T0_hat * std::log(rep.eps0_hat / eps));
  // evaluation times must sit on the dt grid
  const double t1 = 1.0;
  double tstar = std::max(cfg.dt, std::round(rep.t_star / cfg.dt) * cfg.dt);
  rep.t_star = tstar;

  const MixtureQuantileTable table_inf =
      MixtureQuantileTable::build(mix_inf, cfg.quad_points);
  const int n = cfg.n_values.front();
  const int R = cfg.replications;
  std::vector<double> save = t1 < tstar ? std::vector<double>{t1, tstar}
                             : t1 > tstar ? std::vector<double>{tstar, t1}
                                          : std::vector<double>{t1};
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(R) * 2, 0);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (int r = 0; r < R; ++r) {
    SimOptions opt;
    opt.dt = cfg.dt;
    opt.T = std::max(t1, tstar);
    opt.save_times = save;
    opt.seed = replication_seed(cfg.seed, r);
    opt.mode = cfg.mode;
    opt.parallel = false;
    const auto snaps = run_finite(cfg.g, cfg.drift, cfg.init, n, opt);
    for (const auto& snap : snaps) {
      const double w1 =
          wp_vs_quantile_table(snap.nu.sorted_values(), table_inf, 1);
      const int slot = std::abs(snap.t - t1) < 1e-9 ? 0 : 1;
      if (w1 > eps) bits[static_cast<std::size_t>(r) * 2 + slot] = 1;
    }
  }
  auto make_row = [&](int slot, double t) {
    int count = 0;
    for (int r = 0; r < R; ++r) count += bits[static_cast<std::size_t>(r) * 2 + slot];
    TailRow row;
    row.n = n;
    row.epsilon = eps;
    row.t = t;
    row.replications = R;
    row.exceed_count = count;
    row.p_hat = static_cast<double>(count) / R;
    const WilsonInterval ci = wilson_interval(count, R);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.censored = row.p_hat < 5.0 / R;
    return row;
  };
  rep.row_t1 = make_row(0, t1);
  rep.row_tstar = std::abs(tstar - t1) < 1e-12 ? rep.row_t1 : make_row(1, tstar);
  return rep;
}

TailEstimate indep_empirical_tail(const InitialLawFamily& laws,
                                  std::span<const int> n_values, double epsilon,
                                  int p_order, int replications,
                                  std::uint64_t seed, int quad_points,
                                  bool parallel) {
  if (laws.dim != 1)
    throw std::invalid_argument("independent empirical harness requires d = 1");
  if (p_order != 1 && p_order != 2)
    throw std::invalid_argument("p must be 1 or 2");
  TailEstimate est;
  est.d_prime = 2;
  est.condition_special = true;  // documentation only: i.i.d.-style harness

  for (int n : n_values) {
    // mu^n = (1/n) sum_i mu_{u_i}; point-mass families degenerate to the
    // discrete quantile function of the atom list
    MixtureQuantileTable table;
    if (laws.kind == InitialLawFamily::Kind::point_mass) {
      std::vector<double> atoms(n), mean(1);
      for (int i = 0; i < n; ++i) {
        laws.mean_at(u_of_index(i, n), mean);
        atoms[i] = mean[0];
      }
      std::sort(atoms.begin(), atoms.end());
      table.quad_points = quad_points;
      table.quantiles.resize(quad_points);
      for (int j = 0; j < quad_points; ++j) {
        const double q = (j + 0.5) / quad_points;
        int k = std::clamp(static_cast<int>(std::ceil(q * n)), 1, n);
        table.quantiles[j] = atoms[k - 1];
      }
    } else {
      MixtureLaw1D mix;
      mix.weights.assign(n, 1.0 / n);
      mix.components.resize(n);
      std::vector<double> mean(1);
      for (int i = 0; i < n; ++i) {
        laws.mean_at(u_of_index(i, n), mean);
        mix.components[i] = Gaussian1D{mean[0], laws.variance};
      }
      table = MixtureQuantileTable::build(mix, quad_points);
    }

    std::vector<std::uint8_t> bits(replications, 0);
    const rng::Key kroot = rng::master(seed).with(rng::stream_replication);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int r = 0; r < replications; ++r) {
      std::vector<double> xs(n);
      const rng::Key kr = kroot.with(static_cast<std::uint64_t>(r));
      double draw[1];
      for (int i = 0; i < n; ++i) {
        laws.draw(u_of_index(i, n), kr.with(static_cast<std::uint64_t>(i)), draw);
        xs[i] = draw[0];
      }
      std::sort(xs.begin(), xs.end());
      const double w = wp_vs_quantile_table(xs, table, p_order);
      bits[r] = w > epsilon ? 1 : 0;
    }
    int count = 0;
    for (int r = 0; r < replications; ++r) count += bits[r];
    TailRow row;
    row.n = n;
    row.epsilon = epsilon;
    row.t = -1.0;
    row.replications = replications;
    row.exceed_count = count;
    row.p_hat = static_cast<double>(count) / replications;
    const WilsonInterval ci = wilson_interval(count, replications);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.censored = row.p_hat < 5.0 / replications;
    est.rows.push_back(row);
  }
  try {
    est.fit = rate_fit(est.rows);
  } catch (const std::runtime_error&) {
    est.flag = "inconclusive";
  }
  return est;
}

double sqexp_moment(const CenteredLaw1D& law, double inv_a) {
  if (std::holds_alternative<RademacherLaw>(law)) return std::exp(inv_a);
  if (std::holds_alternative<PointMassLaw>(law)) return 1.0;
  if (std::holds_alternative<UniformLaw>(law)) {
    const double h = std::get<UniformLaw>(law).halfwidth;
    return integrate([&](double y) { return std::exp(inv_a * y * y) / (2.0 * h); },
                     -h, h, 1e-12 * std::exp(inv_a * h * h));
  }
  const auto& tg = std::get<TruncatedGaussianLaw>(law);
  const double s = tg.sigma, R = tg.radius;
  const double z = std::erf(R / (s * std::sqrt(2.0)));
  const double norm = 1.0 / (z * s * std::sqrt(2.0 * kPi));
  return integrate(
      [&](double y) {
        return norm * std::exp(inv_a * y * y - y * y / (2.0 * s * s));
      },
      -R, R, 1e-13 * std::exp(inv_a * R * R));
}

double mgf(const CenteredLaw1D& law, double lambda) {
  if (std::holds_alternative<RademacherLaw>(law)) return std::cosh(lambda);
  if (std::holds_alternative<PointMassLaw>(law)) return 1.0;
  if (std::holds_alternative<UniformLaw>(law)) {
    const double h = std::get<UniformLaw>(law).halfwidth;
    const double x = lambda * h;
    if (std::abs(x) < 1e-8) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
  }
  const auto& tg = std::get<TruncatedGaussianLaw>(law);
  const double s = tg.sigma, R = tg.radius;
  const double z = std::erf(R / (s * std::sqrt(2.0)));
  const double norm = 1.0 / (z * s * std::sqrt(2.0 * kPi));
  return integrate(
      [&](double y) {
        return norm * std::exp(lambda * y - y * y / (2.0 * s * s));
      },
      -R, R, 1e-13 * std::exp(std::abs(lambda) * R));
}

double subgaussian_bound_check(const CenteredLaw1D& law, double a,
                               std::span<const double> lambda_grid) {
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  const double moment = sqexp_moment(law, 1.0 / a);
  if (moment > 2.0 + 1e-12)
    throw PreconditionError("E exp(|Y|^2/a) exceeds 2; bound precondition fails");
  double worst = -std::numeric_limits<double>::infinity();
  for (double lam : lambda_grid) {
    const double lhs = std::log(mgf(law, lam));
    const double rhs = 2.5 * a * lam * lam;
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

MgfCheckResult hoeffding_mgf_check(const Graphon& g, int n, int i,
                                   std::span<const double> theta_grid, int R,
                                   std::uint64_t seed) {
  if (n < 1 || i < 0 || i >= n) throw std::invalid_argument("bad row index");
  if (R < 2) throw std::invalid_argument("need R >= 2");
  std::vector<double> gvals(n);
  for (int j = 0; j < n; ++j)
    gvals[j] = eval(g, u_of_index(i, n), u_of_index(j, n));

  // fresh Bernoulli row per replication; store S_r = sum_j (xi - G)
  std::vector<double> S(R);
  const rng::Key kroot = rng::master(seed).with(rng::stream_xi);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < R; ++r) {
    const rng::Key kr = kroot.with(static_cast<std::uint64_t>(r));
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double u = rng::uniform01(kr.with(static_cast<std::uint64_t>(j)));
      s += (u < gvals[j] ? 1.0 : 0.0) - gvals[j];
    }
    S[r] = s;
  }

  MgfCheckResult res;
  res.worst_margin = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(R);
  for (double theta : theta_grid) {
    for (int sign : {+1, -1}) {
      for (int r = 0; r < R; ++r)
        vals[r] = std::exp(sign * theta * S[r] / n);
      const double mean = pairwise_sum(vals) / R;
      std::vector<double> dev(R);
      for (int r = 0; r < R; ++r) dev[r] = sq(vals[r] - mean);
      const double se = std::sqrt(pairwise_sum(dev) / (R - 1.0) / R);
      MgfCheckRow row;
      row.theta = theta;
      row.sign = sign;
      row.mc_estimate = mean;
      row.mc_stderr = se;
      row.bound = std::exp(theta * theta / (8.0 * n));
      row.margin = mean - row.bound - 3.0 * se;
      res.worst_margin = std::max(res.worst_margin, row.margin);
      res.rows.push_back(row);
    }
  }
  return res;
}

}  // namespace gps
