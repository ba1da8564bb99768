#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <vector>

#include "gps/measure.hpp"
#include "gps/ot.hpp"
#include "gps/rng.hpp"

using namespace gps;

namespace {

EmpiricalMeasure points1d(std::vector<double> xs) {
  return EmpiricalMeasure(1, std::move(xs));
}

EmpiricalMeasure random_cloud(int n, int d, rng::Key k) {
  EmpiricalMeasure m;
  m.dim = d;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c)
      m.data.push_back(rng::normal(k.with(i).with(c)));
  return m;
}

// exhaustive minimum over all assignments; the oracle for wp_assignment
double brute_force_wp(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                      int p) {
  const int n = mu.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (int c = 0; c < mu.dim; ++c)
        d2 += (mu.point(i)[c] - nu.point(perm[i])[c]) *
              (mu.point(i)[c] - nu.point(perm[i])[c]);
      cost += p == 1 ? std::sqrt(d2) : d2;
    }
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double mean = best / n;
  return p == 1 ? mean : std::sqrt(mean);
}

}  // namespace

TEST_CASE("w1 on the line, equal sizes") {
  CHECK(w1_sorted_1d(points1d({0, 1}), points1d({0, 1})) == 0.0);
  // oracle: exhaustive over both couplings of {0,1} vs {0.5,2}
  const double oracle = brute_force_wp(points1d({0, 1}), points1d({0.5, 2}), 1);
  CHECK(oracle == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(w1_sorted_1d(points1d({0, 1}), points1d({0.5, 2})) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(w1_sorted_1d(points1d({3.2}), points1d({-1.3})) ==
        doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("w1 on the line, unequal sizes uses the quantile form") {
  // {0,1} vs {0.5}: integral of |F^-1 - 0.5| = 0.5
  CHECK(w1_sorted_1d(points1d({0, 1}), points1d({0.5})) ==
        doctest::Approx(0.5).epsilon(1e-15));
  // replicate to equal sizes and cross-check on random data
  const rng::Key k = rng::master(17);
  for (int trial = 0; trial < 20; ++trial) {
    EmpiricalMeasure a = random_cloud(6, 1, k.with(1).with(trial));
    EmpiricalMeasure b = random_cloud(4, 1, k.with(2).with(trial));
    EmpiricalMeasure a_rep, b_rep;  // lcm(6,4)=12 copies
    a_rep.dim = b_rep.dim = 1;
    for (double x : a.data) for (int r = 0; r < 2; ++r) a_rep.data.push_back(x);
    for (double x : b.data) for (int r = 0; r < 3; ++r) b_rep.data.push_back(x);
    CHECK(w1_sorted_1d(a, b) ==
          doctest::Approx(w1_sorted_1d(a_rep, b_rep)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(w1_sorted_1d(random_cloud(3, 2, rng::master(1)),
                               random_cloud(3, 2, rng::master(2))),
                  std::domain_error);
}

TEST_CASE("assignment solver: trivial geometry") {
  const rng::Key k = rng::master(23);
  const EmpiricalMeasure m = random_cloud(12, 3, k);
  CHECK(wp_assignment(m, m, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(wp_assignment(m, m, 2) == doctest::Approx(0.0).epsilon(1e-15));

  EmpiricalMeasure a(2, {0, 0, 1, 0});
  EmpiricalMeasure b(2, {0, 1, 1, 1});
  CHECK(wp_assignment(a, b, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(wp_assignment(points1d({1, 2}), points1d({1}), 1),
                  std::domain_error);
}

TEST_CASE("assignment solver equals exhaustive brute force") {
  const rng::Key k = rng::master(29);
  for (int trial = 0; trial < 10; ++trial) {
    const EmpiricalMeasure a = random_cloud(6, 3, k.with(1).with(trial));
    const EmpiricalMeasure b = random_cloud(6, 3, k.with(2).with(trial));
    for (int p : {1, 2})
      CHECK(wp_assignment(a, b, p) ==
            doctest::Approx(brute_force_wp(a, b, p)).epsilon(1e-9));
  }
}

TEST_CASE("w1 agreement between the sorted and assignment solvers in 1-D") {
  const rng::Key k = rng::master(31);
  for (int trial = 0; trial < 10; ++trial) {
    const EmpiricalMeasure a = random_cloud(64, 1, k.with(1).with(trial));
    const EmpiricalMeasure b = random_cloud(64, 1, k.with(2).with(trial));
    CHECK(w1_sorted_1d(a, b) ==
          doctest::Approx(wp_assignment(a, b, 1)).epsilon(1e-9));
  }
}

TEST_CASE("metric properties on random triples") {
  const rng::Key k = rng::master(37);
  for (int trial = 0; trial < 10; ++trial) {
    const EmpiricalMeasure a = random_cloud(16, 2, k.with(1).with(trial));
    const EmpiricalMeasure b = random_cloud(16, 2, k.with(2).with(trial));
    const EmpiricalMeasure c = random_cloud(16, 2, k.with(3).with(trial));
    for (int p : {1, 2}) {
      const double ab = wp_assignment(a, b, p);
      const double ba = wp_assignment(b, a, p);
      const double ac = wp_assignment(a, c, p);
      const double cb = wp_assignment(c, b, p);
      CHECK(ab >= 0.0);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
      CHECK(ab <= ac + cb + 1e-9);
    }
    // Jensen ordering
    CHECK(wp_assignment(a, b, 1) <= wp_assignment(a, b, 2) + 1e-12);
  }
}

TEST_CASE("translation equivariance") {
  const rng::Key k = rng::master(41);
  const EmpiricalMeasure a = random_cloud(32, 2, k.with(1));
  const EmpiricalMeasure b = random_cloud(32, 2, k.with(2));
  EmpiricalMeasure at = a, bt = b;
  for (int i = 0; i < 32; ++i) {
    at.data[2 * i] += 3.75;
    at.data[2 * i + 1] -= 1.25;
    bt.data[2 * i] += 3.75;
    bt.data[2 * i + 1] -= 1.25;
  }
  for (int p : {1, 2})
    CHECK(wp_assignment(a, b, p) ==
          doctest::Approx(wp_assignment(at, bt, p)).epsilon(1e-12));
}

TEST_CASE("mixture quantiles invert the cdf") {
  MixtureLaw1D law;
  law.weights = {0.3, 0.7};
  law.components = {{-1.0, 0.5}, {2.0, 2.0}};
  for (double q : {0.01, 0.2, 0.5, 0.9, 0.999})
    CHECK(law.cdf(law.quantile(q)) == doctest::Approx(q).epsilon(1e-9));
  CHECK(law.mean() == doctest::Approx(0.3 * -1.0 + 0.7 * 2.0));
}

TEST_CASE("empirical vs mixture distance") {
  // large gaussian sample against its own law
  MixtureLaw1D std_normal;
  std_normal.weights = {1.0};
  std_normal.components = {{0.0, 1.0}};
  EmpiricalMeasure m;
  m.dim = 1;
  const rng::Key k = rng::master(43);
  for (int i = 0; i < 10000; ++i) m.data.push_back(rng::normal(k.with(i)));
  CHECK(w1_vs_mixture_1d(m, std_normal, 10000) <= 0.05);

  // point mass at the center of N(c, s^2): E|X - c| = s sqrt(2/pi)
  const double c = 1.7, s2 = 0.49;
  MixtureLaw1D g;
  g.weights = {1.0};
  g.components = {{c, s2}};
  const double folded = std::sqrt(s2) * std::sqrt(2.0 / 3.14159265358979323846);
  CHECK(w1_vs_mixture_1d(points1d({c}), g, 1 << 16) ==
        doctest::Approx(folded).epsilon(2e-3));

  // the law's own midpoint quantiles are at distance zero
  const int q = 512;
  const MixtureQuantileTable table = MixtureQuantileTable::build(g, q);
  EmpiricalMeasure own;
  own.dim = 1;
  own.data = table.quantiles;
  CHECK(w1_vs_mixture_1d(own, g, q) == 0.0);

  CHECK_THROWS_AS(w1_vs_mixture_1d(points1d({0.0}), g, 32), std::invalid_argument);
}

TEST_CASE("gaussian W2 closed form") {
  CHECK(w2_gaussian_1d({0, 1}, {0, 1}) == 0.0);
  CHECK(w2_gaussian_1d({0, 1}, {1, 4}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(w2_gaussian_1d({2.5, 0.81}, {2.5 + 0.3, 0.81}) == doctest::Approx(0.3));
}
