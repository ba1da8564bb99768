#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gps/limitlaw.hpp"
#include "gps/ot.hpp"
#include "gps/simulate.hpp"

using namespace gps;

namespace {

const Graphon kTwoBlock =
    Graphon::block_constant({0.0, 0.5, 1.0}, {{0.9, 0.3}, {0.3, 0.7}});

InitialLawFamily unit_mean_init(double variance = 1.0) {
  return InitialLawFamily::gaussian({0.0, 1.0}, {{1.0}}, {{0.0}}, variance, 0.2);
}

DriftSpec zero_drift() { return DriftSpec::custom(0, 0, 0, 0, 0, 0, 0, 0); }

}  // namespace

TEST_CASE("identity dynamics reduce to a Brownian path and replay exactly") {
  SimOptions opt;
  opt.dt = 0.05;
  opt.T = 1.0;
  opt.save_times = {0.5, 1.0};
  opt.seed = 5;
  const InitialLawFamily init = InitialLawFamily::point_mass({0, 1}, {{0.0}}, {{0.0}});
  const auto s1 = run_finite(Graphon::constant(1.0), zero_drift(), init, 256, opt);
  const auto s2 = run_finite(Graphon::constant(1.0), zero_drift(), init, 256, opt);
  REQUIRE(s1.size() == 2);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].nu.data == s2[i].nu.data);
  // X(1) ~ N(0,1): crude variance sanity at 5 sigma
  double v = 0.0;
  for (double x : s1[1].nu.data) v += x * x;
  v /= 256;
  CHECK(std::abs(v - 1.0) < 5.0 * std::sqrt(2.0 / 256.0));
}

TEST_CASE("pure OU matches the closed-form variance within 3 standard errors") {
  // f(x) = -x, b = 0, point-mass start at 0, T = 2
  const DriftSpec ou = DriftSpec::custom(1, 0, 0, 0, 0, 1.0, 0.0, 1.0);
  const InitialLawFamily init = InitialLawFamily::point_mass({0, 1}, {{0.0}}, {{0.0}});
  SimOptions opt;
  opt.dt = 0.005;
  opt.T = 2.0;
  opt.save_times = {2.0};
  opt.seed = 8;
  const int n = 10000;
  const auto snaps = run_finite(Graphon::constant(1.0), ou, init, n, opt);
  double v = 0.0;
  for (double x : snaps[0].nu.data) v += x * x;
  v /= n;
  const double target = (1.0 - std::exp(-4.0)) / 2.0;
  const double se = target * std::sqrt(2.0 / n);  // chi-square spread
  CHECK(std::abs(v - target) <= 3.0 * se + 0.01 * opt.dt * 2.0 + 0.005);
}

TEST_CASE("ensemble mean tracks the gaussian flow") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  SimOptions opt;
  opt.dt = 0.01;
  opt.T = 1.0;
  opt.save_times = {1.0};
  opt.seed = 99;
  const int n = 4000;
  const auto snaps =
      run_finite(Graphon::constant(1.0), spec, unit_mean_init(), n, opt);
  double mean = 0.0;
  for (double x : snaps[0].nu.data) mean += x;
  mean /= n;
  const GaussianFlow flow = solve_linear_gaussian(
      Graphon::constant(1.0), spec, unit_mean_init(), 8, 0.01, 1.0);
  const int s = flow.time_index(1.0);
  const double tol = 3.0 * std::sqrt(flow.var[s][0] / n) + 0.05 * opt.dt * opt.T;
  CHECK(std::abs(mean - flow.mean[s][0]) <= tol);
}

TEST_CASE("aggregated fast path agrees with the dense general path") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 0.5;
  opt.save_times = {0.26, 0.5};
  opt.seed = 13;
  const auto fast = run_finite(kTwoBlock, spec, unit_mean_init(), 300, opt);
  opt.force_general = true;
  opt.parallel = false;  // serial reference
  const auto ref = run_finite(kTwoBlock, spec, unit_mean_init(), 300, opt);
  REQUIRE(fast.size() == ref.size());
  for (std::size_t si = 0; si < fast.size(); ++si) {
    REQUIRE(fast[si].nu.data.size() == ref[si].nu.data.size());
    for (std::size_t i = 0; i < fast[si].nu.data.size(); ++i)
      CHECK(fast[si].nu.data[i] ==
            doctest::Approx(ref[si].nu.data[i]).epsilon(1e-10));
  }
}

TEST_CASE("bitwise determinism across thread counts") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 0.5;
  opt.save_times = {0.5};
  opt.seed = 77;
  opt.mode = SampleMode::bernoulli;
  std::vector<std::vector<double>> results;
  for (int threads : {1, 2, 8}) {
    omp_set_num_threads(threads);
    const auto snaps = run_finite(kTwoBlock, spec, unit_mean_init(), 200, opt);
    results.push_back(snaps[0].nu.data);
  }
  omp_set_num_threads(2);
  CHECK(results[0] == results[1]);
  CHECK(results[0] == results[2]);
  opt.parallel = false;
  const auto serial = run_finite(kTwoBlock, spec, unit_mean_init(), 200, opt);
  CHECK(serial[0].nu.data == results[0]);
}

TEST_CASE("divergent drift raises a divergence error naming the step") {
  // f(x) = +50x explodes under dt = 0.1
  const DriftSpec bad = DriftSpec::custom(-50, 0, 0, 0, 0, 50.0, 0.0, -50.0);
  SimOptions opt;
  opt.dt = 0.1;
  opt.T = 50.0;
  opt.save_times = {50.0};
  opt.seed = 1;
  CHECK_THROWS_AS(
      run_finite(Graphon::constant(1.0), bad, unit_mean_init(), 8, opt),
      DivergenceError);
}

TEST_CASE("coupled run: deterministic mode zeroes T-tilde and splits R exactly") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  const GaussianFlow flow =
      solve_linear_gaussian(kTwoBlock, spec, unit_mean_init(), 16, 0.02, 0.5);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 0.5;
  opt.save_times = {0.0, 0.26, 0.5};
  opt.seed = 31;
  const CoupledResult res =
      run_coupled(kTwoBlock, spec, unit_mean_init(), LimitLaw{flow}, 128, opt);
  REQUIRE(res.frames.size() == 3);
  for (const DiagnosticsFrame& f : res.frames) {
    CHECK(f.max_identity_gap <= 1e-12);
    for (double v : f.T_tilde_norm) CHECK(v == 0.0);
  }
  // t = 0: identical initial draws
  CHECK(res.frames[0].coupling_rms == 0.0);
}

TEST_CASE("coupled run under bernoulli sampling keeps the exact R split") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  const GaussianFlow flow =
      solve_linear_gaussian(kTwoBlock, spec, unit_mean_init(), 16, 0.02, 0.4);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 0.4;
  opt.save_times = {0.2, 0.4};
  opt.seed = 33;
  opt.mode = SampleMode::bernoulli;
  const CoupledResult res =
      run_coupled(kTwoBlock, spec, unit_mean_init(), LimitLaw{flow}, 96, opt);
  bool ttilde_nonzero = false;
  for (const DiagnosticsFrame& f : res.frames) {
    CHECK(f.max_identity_gap <= 1e-12);
    for (double v : f.T_tilde_norm) ttilde_nonzero = ttilde_nonzero || v > 0.0;
  }
  CHECK(ttilde_nonzero);
}

TEST_CASE("interaction-free coupling stays glued to the limit particles") {
  // b = 0: finite and limit dynamics coincide pathwise
  const DriftSpec ou = DriftSpec::custom(1, 0, 0, 0, 0, 1.0, 0.0, 1.0);
  const GaussianFlow flow = solve_linear_gaussian(
      Graphon::constant(1.0), DriftSpec::linear_mean_reverting(1.0, 0.0),
      unit_mean_init(), 8, 0.02, 0.5);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 0.5;
  opt.save_times = {0.26, 0.5};
  opt.seed = 41;
  const CoupledResult res = run_coupled(Graphon::constant(1.0), ou,
                                        unit_mean_init(), LimitLaw{flow}, 64, opt);
  for (const DiagnosticsFrame& f : res.frames)
    CHECK(f.coupling_rms <= 1e-12);
}

TEST_CASE("W1 between the coupled empirical measures is below the rms gap") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  const GaussianFlow flow =
      solve_linear_gaussian(kTwoBlock, spec, unit_mean_init(), 16, 0.02, 0.5);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 0.5;
  opt.save_times = {0.26, 0.5};
  opt.seed = 51;
  opt.mode = SampleMode::bernoulli;
  const CoupledResult res =
      run_coupled(kTwoBlock, spec, unit_mean_init(), LimitLaw{flow}, 128, opt);
  for (std::size_t i = 0; i < res.times.size(); ++i)
    CHECK(w1_sorted_1d(res.nu[i], res.nu_bar[i]) <=
          res.frames[i].coupling_rms + 1e-12);
}

TEST_CASE("dissipative coupling gap shows no upward long-run trend") {
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  const GaussianFlow flow =
      solve_linear_gaussian(kTwoBlock, spec, unit_mean_init(), 16, 0.025, 20.0);
  SimOptions opt;
  opt.dt = 0.025;
  opt.T = 20.0;
  for (int k = 4; k <= 80; ++k) opt.save_times.push_back(k * 0.25);
  opt.mode = SampleMode::bernoulli;
  // window maxima pooled over independent runs; a single max over a handful
  // of saves is too noisy for a 1.5x self-consistency bound
  double early = 0.0, late = 0.0;
  for (std::uint64_t seed : {61, 62, 63, 64, 65, 66}) {
    opt.seed = seed;
    const CoupledResult res =
        run_coupled(kTwoBlock, spec, unit_mean_init(), LimitLaw{flow}, 300, opt);
    const std::vector<double> gap = coupling_gap(res);
    for (std::size_t i = 0; i < gap.size(); ++i) {
      if (res.times[i] <= 10.0) early = std::max(early, gap[i]);
      if (res.times[i] >= 10.0) late = std::max(late, gap[i]);
    }
  }
  CHECK(late <= 1.5 * early);
}

TEST_CASE("pathwise identity tested against the discounted-integral bound") {
  // Gronwall-shaped check: gap(t) <= C sqrt(discounted integral) with one
  // fitted constant per configuration
  const DriftSpec spec = DriftSpec::linear_mean_reverting(2.0, 0.5);
  const GaussianFlow flow =
      solve_linear_gaussian(kTwoBlock, spec, unit_mean_init(), 16, 0.02, 4.0);
  SimOptions opt;
  opt.dt = 0.02;
  opt.T = 4.0;
  for (double t = 0.5; t <= 4.0; t += 0.5) opt.save_times.push_back(t);
  opt.seed = 71;
  opt.mode = SampleMode::bernoulli;
  const CoupledResult res =
      run_coupled(kTwoBlock, spec, unit_mean_init(), LimitLaw{flow}, 150, opt);
  double c_fit = 0.0;
  for (const DiagnosticsFrame& f : res.frames)
    if (f.discounted_integral > 0.0)
      c_fit = std::max(c_fit, f.coupling_rms / std::sqrt(f.discounted_integral));
  CHECK(c_fit > 0.0);
  for (const DiagnosticsFrame& f : res.frames)
    CHECK(f.coupling_rms <= c_fit * std::sqrt(f.discounted_integral) + 1e-12);
}
