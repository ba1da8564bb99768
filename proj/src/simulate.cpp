#include "gps/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gps/util.hpp"

namespace gps {

namespace {

std::vector<int> save_steps_of(const SimOptions& opt, int steps) {
  std::vector<double> ts = opt.save_times.empty()
                               ? std::vector<double>{opt.T}
                               : opt.save_times;
  std::vector<int> out;
  for (double t : ts) {
    const long k = std::lround(t / opt.dt);
    if (k < 0 || k > steps || std::abs(t / opt.dt - static_cast<double>(k)) > 1e-6)
      throw std::invalid_argument("save time off the dt grid");
    out.push_back(static_cast<int>(k));
  }
  if (!std::is_sorted(out.begin(), out.end()))
    throw std::invalid_argument("save times must be increasing");
  return out;
}

void check_finite(const std::vector<double>& x, int step, double t) {
  for (double v : x)
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "state diverged at step " << step << " (t = " << t << ")";
      throw DivergenceError(os.str());
    }
}

// per-particle keys shared by the finite system and the coupled limit
// particles; sharing them verbatim is the coupling
struct NoiseSource {
  rng::Key init_root, bm_root;
  explicit NoiseSource(std::uint64_t seed)
      : init_root(rng::master(seed).with(rng::stream_init)),
        bm_root(rng::master(seed).with(rng::stream_brownian)) {}
  rng::Key init(int i) const { return init_root.with(static_cast<std::uint64_t>(i)); }
  rng::Key bm(int i, int s) const {
    return bm_root.with(static_cast<std::uint64_t>(i))
        .with(static_cast<std::uint64_t>(s));
  }
};

bool block_structured(const Graphon& g) {
  return g.kind() == Graphon::Kind::constant ||
         g.kind() == Graphon::Kind::block_constant;
}

// block value lookup usable for both constant and block_constant kinds
double block_val(const Graphon& g, int bi, int bj) {
  if (g.kind() == Graphon::Kind::constant) return eval(g, 0.0, 0.0);
  return g.block_value(bi, bj);
}

constexpr int kDenseCap = 8192;

struct FiniteSystem {
  const Graphon& g;
  const DriftSpec& spec;
  int n, dim;
  bool aggregated;
  int nblocks = 1;
  std::vector<int> pblock;      // block of each particle
  std::vector<double> bcount;   // particles per block
  std::vector<double> xi;       // dense matrix when not aggregated
  std::vector<double> rho;      // (1/n) row sums of xi

  FiniteSystem(const Graphon& g_, const DriftSpec& spec_, int n_,
               SampleMode mode, std::uint64_t seed, bool force_general)
      : g(g_), spec(spec_), n(n_), dim(spec_.dim) {
    aggregated = !force_general && mode == SampleMode::deterministic &&
                 block_structured(g);
    pblock.resize(n);
    for (int i = 0; i < n; ++i) pblock[i] = g.block_of(u_of_index(i, n));
    nblocks = g.block_count();
    bcount.assign(nblocks, 0.0);
    for (int i = 0; i < n; ++i) bcount[pblock[i]] += 1.0;
    if (!aggregated) {
      if (n > kDenseCap)
        throw std::invalid_argument("general interaction path capped at n <= 8192");
      xi = InteractionMatrix(g, n, mode, seed).dense();
      rho.assign(n, 0.0);
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += xi[static_cast<std::size_t>(i) * n + j];
        rho[i] = s / n;
      }
    }
  }

  // per-step aggregates over current states (serial, fixed order)
  void aggregates(const std::vector<double>& X, std::vector<double>& bsum) const {
    bsum.assign(static_cast<std::size_t>(nblocks) * dim, 0.0);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < dim; ++c)
        bsum[static_cast<std::size_t>(pblock[i]) * dim + c] +=
            X[static_cast<std::size_t>(i) * dim + c];
  }

  // (1/n) sum_j xi_ij b(x_i, X_j) for particle i, written to inter
  void interaction(int i, const double* xi_state, const std::vector<double>& X,
                   const std::vector<double>& bsum, double* inter) const {
    const double bx = spec.bx(), by = spec.by(), b0 = spec.b0();
    if (aggregated) {
      const int bi = pblock[i];
      double wcnt = 0.0;
      for (int b = 0; b < nblocks; ++b) wcnt += block_val(g, bi, b) * bcount[b];
      wcnt /= n;
      for (int c = 0; c < dim; ++c) {
        double wsum = 0.0;
        for (int b = 0; b < nblocks; ++b)
          wsum += block_val(g, bi, b) * bsum[static_cast<std::size_t>(b) * dim + c];
        wsum /= n;
        inter[c] = bx * xi_state[c] * wcnt + by * wsum + b0 * wcnt;
      }
    } else {
      const double* row = xi.data() + static_cast<std::size_t>(i) * n;
      for (int c = 0; c < dim; ++c) {
        double dot = 0.0;
        for (int j = 0; j < n; ++j)
          dot += row[j] * X[static_cast<std::size_t>(j) * dim + c];
        dot /= n;
        inter[c] = bx * xi_state[c] * rho[i] + by * dot + b0 * rho[i];
      }
    }
  }
};

EmpiricalMeasure snapshot_of(const std::vector<double>& X, int dim) {
  EmpiricalMeasure m;
  m.dim = dim;
  m.data = X;
  return m;
}

}  // namespace

std::vector<Snapshot> run_finite(const Graphon& g, const DriftSpec& spec,
                                 const InitialLawFamily& init, int n,
                                 const SimOptions& opt) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("need dt > 0");
  if (spec.dim != init.dim) throw std::invalid_argument("drift/init dimension mismatch");
  if (spec.dim > 8) throw std::invalid_argument("dimension capped at 8");
  const int dim = spec.dim;
  const int steps = static_cast<int>(std::lround(opt.T / opt.dt));
  const std::vector<int> saves = save_steps_of(opt, steps);
  const NoiseSource noise(opt.seed);
  const FiniteSystem sys(g, spec, n, opt.mode, opt.seed, opt.force_general);
  const double sdt = std::sqrt(opt.dt);

  std::vector<double> X(static_cast<std::size_t>(n) * dim), Xn(X.size());
  for (int i = 0; i < n; ++i)
    init.draw(u_of_index(i, n), noise.init(i),
              {X.data() + static_cast<std::size_t>(i) * dim,
               static_cast<std::size_t>(dim)});

  std::vector<Snapshot> out;
  std::size_t save_pos = 0;
  auto maybe_save = [&](int step) {
    while (save_pos < saves.size() && saves[save_pos] == step) {
      out.push_back({step * opt.dt, snapshot_of(X, dim)});
      ++save_pos;
    }
  };
  maybe_save(0);

  std::vector<double> bsum;
  for (int s = 0; s < steps; ++s) {
    if (sys.aggregated) sys.aggregates(X, bsum);
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (int i = 0; i < n; ++i) {
      double fx[8], inter[8];
      const double* x = X.data() + static_cast<std::size_t>(i) * dim;
      double* xn = Xn.data() + static_cast<std::size_t>(i) * dim;
      spec.f({x, static_cast<std::size_t>(dim)}, {fx, static_cast<std::size_t>(dim)});
      sys.interaction(i, x, X, bsum, inter);
      const rng::Key kb = noise.bm(i, s);
      for (int c = 0; c < dim; ++c)
        xn[c] = x[c] + opt.dt * (fx[c] + inter[c]) +
                sdt * rng::normal(kb.with(static_cast<std::uint64_t>(c)));
    }
    X.swap(Xn);
    check_finite(X, s + 1, (s + 1) * opt.dt);
    maybe_save(s + 1);
  }
  return out;
}

namespace {

// unified view of the law's per-step node means
struct LawMeans {
  const UGrid* grid = nullptr;
  const std::vector<std::vector<double>>* path = nullptr;
  int dim = 1;
  double dt = 0.0;
  bool interpolate = true;  // lerp for GaussianFlow, nearest for SampleCloud
};

LawMeans law_means(const LimitLaw& law) {
  LawMeans v;
  if (std::holds_alternative<GaussianFlow>(law)) {
    const auto& f = std::get<GaussianFlow>(law);
    v.grid = &f.grid;
    v.path = &f.mean;
    v.dim = f.dim;
    v.dt = f.dt;
    v.interpolate = true;
  } else {
    const auto& c = std::get<SampleCloud>(law);
    v.grid = &c.grid;
    v.path = &c.mean_path;
    v.dim = c.dim;
    v.dt = c.dt;
    v.interpolate = false;
  }
  return v;
}

// (left node, right node, lerp weight) of position u in the law grid
struct Interp {
  int left = 0, right = 0;
  double w = 0.0;
};

Interp make_interp(const UGrid& grid, double u, bool lerp) {
  const int b = grid.block_of(u);
  const int first = grid.block_start[b];
  const int last = grid.block_start[b + 1] - 1;
  const auto it = std::lower_bound(grid.nodes.begin() + first,
                                   grid.nodes.begin() + last + 1, u);
  const int pos = static_cast<int>(it - grid.nodes.begin());
  Interp ip;
  if (pos <= first) {
    ip.left = ip.right = first;
  } else if (pos > last) {
    ip.left = ip.right = last;
  } else {
    ip.left = pos - 1;
    ip.right = pos;
    ip.w = (u - grid.nodes[ip.left]) /
           (grid.nodes[ip.right] - grid.nodes[ip.left]);
  }
  if (!lerp && ip.left != ip.right) {
    // nearest node
    const int pick = ip.w > 0.5 ? ip.right : ip.left;
    ip.left = ip.right = pick;
    ip.w = 0.0;
  }
  return ip;
}

}  // namespace

CoupledResult run_coupled(const Graphon& g, const DriftSpec& spec,
                          const InitialLawFamily& init, const LimitLaw& law,
                          int n, const SimOptions& opt) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  const int dim = spec.dim;
  if (dim != init.dim) throw std::invalid_argument("drift/init dimension mismatch");
  if (dim > 8) throw std::invalid_argument("dimension capped at 8");
  const int steps = static_cast<int>(std::lround(opt.T / opt.dt));
  const std::vector<int> saves = save_steps_of(opt, steps);
  const LawMeans lm = law_means(law);
  if (lm.dim != dim) throw std::invalid_argument("law dimension mismatch");
  if (std::abs(lm.dt - opt.dt) > 1e-12)
    throw std::invalid_argument("limit law must be solved at the simulation dt");
  if (static_cast<int>(lm.path->size()) < steps + 1)
    throw std::invalid_argument("limit law does not cover the horizon");

  const NoiseSource noise(opt.seed);
  const FiniteSystem sys(g, spec, n, opt.mode, opt.seed, opt.force_general);
  const double sdt = std::sqrt(opt.dt);
  const double bx = spec.bx(), by = spec.by(), b0 = spec.b0();
  const double kappa = kappa_of(spec);
  const int nodes = lm.grid->size();

  // W[i][k] = w_k G(u_i, u_k): limit drift weights on the law grid
  std::vector<double> W(static_cast<std::size_t>(n) * nodes);
  std::vector<double> D(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double u = u_of_index(i, n);
    for (int k = 0; k < nodes; ++k) {
      const double w = lm.grid->weights[k] * eval(g, u, lm.grid->nodes[k]);
      W[static_cast<std::size_t>(i) * nodes + k] = w;
      D[i] += w;
    }
  }
  // law mean at u_j for the diagnostics
  std::vector<Interp> interp(n);
  for (int j = 0; j < n; ++j)
    interp[j] = make_interp(*lm.grid, u_of_index(j, n), lm.interpolate);
  auto law_mean_at = [&](int j, int step, int c) {
    const Interp& ip = interp[j];
    const std::vector<double>& row = (*lm.path)[step];
    return (1.0 - ip.w) * row[static_cast<std::size_t>(ip.left) * dim + c] +
           ip.w * row[static_cast<std::size_t>(ip.right) * dim + c];
  };

  // dense G matrix for diagnostics when the graphon is not block structured
  std::vector<double> gdense;
  if (!block_structured(g)) {
    if (n > kDenseCap)
      throw std::invalid_argument("coupled diagnostics capped at n <= 8192 for this graphon");
    gdense.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gdense[static_cast<std::size_t>(i) * n + j] =
            eval(g, u_of_index(i, n), u_of_index(j, n));
  }
  auto g_entry = [&](int i, int j) {
    if (!gdense.empty()) return gdense[static_cast<std::size_t>(i) * n + j];
    return block_val(g, sys.pblock[i], sys.pblock[j]);
  };
  auto xi_entry = [&](int i, int j) {
    if (sys.aggregated) return g_entry(i, j);
    return sys.xi[static_cast<std::size_t>(i) * n + j];
  };

  std::vector<double> X(static_cast<std::size_t>(n) * dim), Xn(X.size());
  std::vector<double> Xb(X.size()), Xbn(X.size());
  for (int i = 0; i < n; ++i) {
    init.draw(u_of_index(i, n), noise.init(i),
              {X.data() + static_cast<std::size_t>(i) * dim,
               static_cast<std::size_t>(dim)});
    std::copy_n(X.data() + static_cast<std::size_t>(i) * dim, dim,
                Xb.data() + static_cast<std::size_t>(i) * dim);
  }

  CoupledResult res;

  // fast |R| row values for the running integrand; exact identity checks use
  // the direct O(n^2) sums at save times
  std::vector<double> rfast(n);
  std::vector<double> gamma(n, 0.0), rho(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double gs = 0.0, rs = 0.0;
    for (int j = 0; j < n; ++j) {
      gs += g_entry(i, j);
      rs += xi_entry(i, j);
    }
    gamma[i] = gs / n;
    rho[i] = rs / n;
  }

  auto compute_rfast = [&](const std::vector<double>& Xbar, int step) {
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int c = 0; c < dim; ++c) {
        double axi = 0.0, bmean = 0.0;
        for (int j = 0; j < n; ++j) {
          axi += xi_entry(i, j) * Xbar[static_cast<std::size_t>(j) * dim + c];
          bmean += g_entry(i, j) * law_mean_at(j, step, c);
        }
        axi /= n;
        bmean /= n;
        const double xc = Xbar[static_cast<std::size_t>(i) * dim + c];
        const double rc = bx * xc * (rho[i] - gamma[i]) + b0 * (rho[i] - gamma[i]) +
                          by * (axi - bmean);
        acc += rc * rc;
      }
      rfast[i] = std::sqrt(acc);
    }
  };

  auto p_integrand_of = [&](const std::vector<double>& Xbar) {
    std::vector<double> terms(n);
    for (int i = 0; i < n; ++i) {
      double nx = 0.0;
      for (int c = 0; c < dim; ++c)
        nx += sq(Xbar[static_cast<std::size_t>(i) * dim + c]);
      terms[i] = sq(rfast[i] + (1.0 + std::sqrt(nx)) / n);
    }
    return pairwise_sum(terms) / n;
  };

  double discounted = 0.0;
  compute_rfast(Xb, 0);
  double p_prev = p_integrand_of(Xb);

  auto emit_frame = [&](int step) {
    DiagnosticsFrame fr;
    fr.t = step * opt.dt;
    fr.R_norm.resize(n);
    fr.T_tilde_norm.resize(n);
    fr.T_norm.resize(n);
    double worst_gap = 0.0;
    std::vector<double> crms(n);
#pragma omp parallel for schedule(static) reduction(max : worst_gap) if (opt.parallel)
    for (int i = 0; i < n; ++i) {
      double r2 = 0.0, tt2 = 0.0, t2 = 0.0;
      for (int c = 0; c < dim; ++c) {
        const double xbc = Xb[static_cast<std::size_t>(i) * dim + c];
        double r = 0.0, ttilde = 0.0, tterm = 0.0;
        for (int j = 0; j < n; ++j) {
          const double xj = Xb[static_cast<std::size_t>(j) * dim + c];
          const double mj = law_mean_at(j, step, c);
          const double xij = xi_entry(i, j), gij = g_entry(i, j);
          r += xij * (bx * xbc + by * xj + b0) - gij * (bx * xbc + by * mj + b0);
          ttilde += (xij - gij) * (bx * xbc + b0);
          tterm += (xij - gij) * (by * xj) + gij * by * (xj - mj);
        }
        r /= n;
        ttilde /= n;
        tterm /= n;
        r2 += r * r;
        tt2 += ttilde * ttilde;
        t2 += tterm * tterm;
        worst_gap = std::max(worst_gap, std::abs(r - ttilde - tterm));
      }
      fr.R_norm[i] = std::sqrt(r2);
      fr.T_tilde_norm[i] = std::sqrt(tt2);
      fr.T_norm[i] = std::sqrt(t2);
      double c2s = 0.0;
      for (int c = 0; c < dim; ++c)
        c2s += sq(X[static_cast<std::size_t>(i) * dim + c] -
                  Xb[static_cast<std::size_t>(i) * dim + c]);
      crms[i] = c2s;
    }
    fr.max_identity_gap = worst_gap;
    fr.coupling_rms = std::sqrt(pairwise_sum(crms) / n);
    fr.p_integrand = p_prev;
    fr.discounted_integral = discounted;
    res.times.push_back(fr.t);
    res.nu.push_back(snapshot_of(X, dim));
    res.nu_bar.push_back(snapshot_of(Xb, dim));
    res.frames.push_back(std::move(fr));
  };

  std::size_t save_pos = 0;
  auto maybe_save = [&](int step) {
    while (save_pos < saves.size() && saves[save_pos] == step) {
      emit_frame(step);
      ++save_pos;
    }
  };
  maybe_save(0);

  std::vector<double> bsum;
  std::vector<double> cw(static_cast<std::size_t>(n) * dim);
  const double decay = std::exp(-kappa * opt.dt);
  for (int s = 0; s < steps; ++s) {
    if (sys.aggregated) sys.aggregates(X, bsum);
    // limit drift field under the law at step s
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (int i = 0; i < n; ++i) {
      const double* row = W.data() + static_cast<std::size_t>(i) * nodes;
      const std::vector<double>& lmrow = (*lm.path)[s];
      for (int c = 0; c < dim; ++c) {
        double acc = 0.0;
        for (int k = 0; k < nodes; ++k)
          acc += row[k] * lmrow[static_cast<std::size_t>(k) * dim + c];
        cw[static_cast<std::size_t>(i) * dim + c] = acc;
      }
    }
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (int i = 0; i < n; ++i) {
      double fx[8], inter[8];
      const double* x = X.data() + static_cast<std::size_t>(i) * dim;
      const double* xb = Xb.data() + static_cast<std::size_t>(i) * dim;
      double* xn = Xn.data() + static_cast<std::size_t>(i) * dim;
      double* xbn = Xbn.data() + static_cast<std::size_t>(i) * dim;
      const rng::Key kb = noise.bm(i, s);
      // finite system
      spec.f({x, static_cast<std::size_t>(dim)}, {fx, static_cast<std::size_t>(dim)});
      sys.interaction(i, x, X, bsum, inter);
      for (int c = 0; c < dim; ++c) {
        const double z = rng::normal(kb.with(static_cast<std::uint64_t>(c)));
        xn[c] = x[c] + opt.dt * (fx[c] + inter[c]) + sdt * z;
        // limit particle, same increment
        xbn[c] = xb[c] + sdt * z;
      }
      spec.f({xb, static_cast<std::size_t>(dim)}, {fx, static_cast<std::size_t>(dim)});
      for (int c = 0; c < dim; ++c) {
        const double interb =
            bx * xb[c] * D[i] + by * cw[static_cast<std::size_t>(i) * dim + c] +
            b0 * D[i];
        xbn[c] += opt.dt * (fx[c] + interb);
      }
    }
    X.swap(Xn);
    Xb.swap(Xbn);
    check_finite(X, s + 1, (s + 1) * opt.dt);
    check_finite(Xb, s + 1, (s + 1) * opt.dt);

    compute_rfast(Xb, s + 1);
    const double p_cur = p_integrand_of(Xb);
    discounted = decay * discounted + 0.5 * opt.dt * (decay * p_prev + p_cur);
    p_prev = p_cur;
    maybe_save(s + 1);
  }
  return res;
}

std::vector<double> coupling_gap(const CoupledResult& res) {
  std::vector<double> out;
  out.reserve(res.frames.size());
  for (const auto& f : res.frames) out.push_back(f.coupling_rms);
  return out;
}

}  // namespace gps
