// Timing comparison of the OpenMP kernels against the serial reference paths.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "gps/limitlaw.hpp"
#include "gps/simulate.hpp"

using namespace gps;

namespace {

double seconds_of(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
  omp_set_num_threads(threads);
  std::printf("threads: %d\n\n", threads);

  const Graphon g = Graphon::block_constant({0.0, 0.5, 1.0},
                                            {{0.9, 0.3}, {0.3, 0.7}});
  const DriftSpec drift = DriftSpec::linear_mean_reverting(2.0, 0.5);
  const InitialLawFamily init =
      InitialLawFamily::gaussian({0.0, 1.0}, {{1.0}}, {{0.0}}, 1.0, 0.2);

  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "omp[s]", "speedup");

  for (int n : {2000, 8000}) {
    SimOptions opt;
    opt.dt = 0.005;
    opt.T = 1.0;
    opt.save_times = {1.0};
    opt.seed = 42;
    double ts = 0, tp = 0;
    opt.parallel = false;
    ts = seconds_of([&] { run_finite(g, drift, init, n, opt); });
    opt.parallel = true;
    tp = seconds_of([&] { run_finite(g, drift, init, n, opt); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n",
                ("run_finite aggregated n=" + std::to_string(n)).c_str(), ts, tp,
                ts / tp);
  }

  {
    const int n = 768;
    SimOptions opt;
    opt.dt = 0.005;
    opt.T = 1.0;
    opt.save_times = {1.0};
    opt.seed = 42;
    opt.mode = SampleMode::bernoulli;
    double ts = 0, tp = 0;
    opt.parallel = false;
    ts = seconds_of([&] { run_finite(g, drift, init, n, opt); });
    opt.parallel = true;
    tp = seconds_of([&] { run_finite(g, drift, init, n, opt); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n",
                ("run_finite dense n=" + std::to_string(n)).c_str(), ts, tp,
                ts / tp);
  }

  {
    PicardOptions popt;
    popt.m = 32;
    popt.particles = 1000;
    popt.max_iterations = 6;
    popt.dt = 0.01;
    popt.T = 0.5;
    popt.tol = 1e-4;
    popt.seed = 42;
    double ts = 0, tp = 0;
    popt.parallel = false;
    ts = seconds_of([&] { solve_picard(g, drift, init, popt); });
    popt.parallel = true;
    tp = seconds_of([&] { solve_picard(g, drift, init, popt); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n", "solve_picard m=32 M=1000", ts,
                tp, ts / tp);
  }

  {
    const GaussianFlow flow = solve_linear_gaussian(g, drift, init, 64, 0.01, 1.0);
    SimOptions opt;
    opt.dt = 0.01;
    opt.T = 1.0;
    opt.save_times = {0.5, 1.0};
    opt.seed = 42;
    const int n = 512;
    double ts = 0, tp = 0;
    opt.parallel = false;
    ts = seconds_of([&] { run_coupled(g, drift, init, LimitLaw{flow}, n, opt); });
    opt.parallel = true;
    tp = seconds_of([&] { run_coupled(g, drift, init, LimitLaw{flow}, n, opt); });
    std::printf("%-34s %10.3f %10.3f %7.2fx\n",
                ("run_coupled n=" + std::to_string(n)).c_str(), ts, tp, ts / tp);
  }

  return 0;
}
