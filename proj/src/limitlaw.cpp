#include "gps/limitlaw.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "gps/ot.hpp"
#include "gps/util.hpp"

namespace gps {

int UGrid::block_of(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("u outside [0,1]");
  const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), u);
  const int idx = static_cast<int>(it - boundaries.begin()) - 1;
  return std::min(idx, static_cast<int>(boundaries.size()) - 2);
}

UGrid build_ugrid(const std::vector<double>& boundaries, int m) {
  if (m < 1) throw std::invalid_argument("u-grid needs m >= 1");
  UGrid grid;
  grid.boundaries = boundaries;
  const int nb = static_cast<int>(boundaries.size()) - 1;
  grid.block_start.push_back(0);
  for (int b = 0; b < nb; ++b) {
    const double lo = boundaries[b], hi = boundaries[b + 1];
    const int cells = std::max(1, static_cast<int>(std::lround(m * (hi - lo))));
    const double w = (hi - lo) / cells;
    for (int c = 0; c < cells; ++c) {
      grid.nodes.push_back(lo + (c + 0.5) * w);
      grid.weights.push_back(w);
      grid.block.push_back(b);
    }
    grid.block_start.push_back(static_cast<int>(grid.nodes.size()));
  }
  return grid;
}

std::vector<double> merge_boundaries(const std::vector<double>& a,
                                     const std::vector<double>& b) {
  std::vector<double> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-12; }),
            out.end());
  return out;
}

int GaussianFlow::time_index(double t) const {
  const double idx = t / dt;
  const long k = std::lround(idx);
  if (k < 0 || k >= static_cast<long>(times.size()) ||
      std::abs(idx - static_cast<double>(k)) > 1e-6)
    throw std::domain_error("requested time is not on the saved time grid");
  return static_cast<int>(k);
}

void GaussianFlow::marginal_at(double u, int step, std::span<double> mean_out,
                               double& var_out) const {
  // linear interpolation between the neighboring nodes of the block holding
  // u; constant within half a cell of the block edges
  const int b = grid.block_of(u);
  const int first = grid.block_start[b];
  const int last = grid.block_start[b + 1] - 1;
  int left, right;
  double w;
  const auto it = std::lower_bound(grid.nodes.begin() + first,
                                   grid.nodes.begin() + last + 1, u);
  const int pos = static_cast<int>(it - grid.nodes.begin());
  if (pos <= first) {
    left = right = first;
    w = 0.0;
  } else if (pos > last) {
    left = right = last;
    w = 0.0;
  } else {
    left = pos - 1;
    right = pos;
    w = (u - grid.nodes[left]) / (grid.nodes[right] - grid.nodes[left]);
  }
  const double* mrow = mean[step].data();
  for (int c = 0; c < dim; ++c)
    mean_out[c] = (1.0 - w) * mrow[left * dim + c] + w * mrow[right * dim + c];
  var_out = (1.0 - w) * var[step][left] + w * var[step][right];
}

namespace {

// dense coupling matrix M[k][l] = delta_kl * (c2 deg_k - c1 - c2) + c2 w_l G(u_k,u_l)
std::vector<double> mean_system_matrix(const Graphon& g, const DriftSpec& spec,
                                       const UGrid& grid) {
  const int m = grid.size();
  std::vector<double> M(static_cast<std::size_t>(m) * m);
  for (int k = 0; k < m; ++k) {
    const double ak = spec.c2 * degree(g, grid.nodes[k]) - spec.c1 - spec.c2;
    for (int l = 0; l < m; ++l) {
      double v = spec.c2 * grid.weights[l] * eval(g, grid.nodes[k], grid.nodes[l]);
      if (k == l) v += ak;
      M[static_cast<std::size_t>(k) * m + l] = v;
    }
  }
  return M;
}

void matvec(const std::vector<double>& M, int m, int dim,
            const std::vector<double>& x, std::vector<double>& out) {
  for (int k = 0; k < m; ++k) {
    const double* row = M.data() + static_cast<std::size_t>(k) * m;
    for (int c = 0; c < dim; ++c) {
      double s = 0.0;
      for (int l = 0; l < m; ++l) s += row[l] * x[static_cast<std::size_t>(l) * dim + c];
      out[static_cast<std::size_t>(k) * dim + c] = s;
    }
  }
}

}  // namespace

GaussianFlow solve_linear_gaussian(const Graphon& g, const DriftSpec& spec,
                                   const InitialLawFamily& init, int m,
                                   double dt, double T) {
  if (spec.kind != DriftSpec::Kind::linear_mean_reverting)
    throw std::invalid_argument("solve_linear_gaussian requires the linear mean-reverting drift");
  if (init.kind != InitialLawFamily::Kind::gaussian_per_block)
    throw std::invalid_argument("solve_linear_gaussian requires a Gaussian initial law");
  if (m < 2 || !(dt > 0.0) || !(T >= 0.0))
    throw std::invalid_argument("need m >= 2, dt > 0, T >= 0");
  if (spec.dim != init.dim) throw std::invalid_argument("drift/init dimension mismatch");

  GaussianFlow flow;
  flow.grid = build_ugrid(merge_boundaries(g.boundaries(), init.boundaries), m);
  flow.dim = spec.dim;
  flow.dt = dt;
  const int nodes = flow.grid.size();
  const int dim = spec.dim;
  const int steps = static_cast<int>(std::lround(T / dt));

  const std::vector<double> M = mean_system_matrix(g, spec, flow.grid);
  std::vector<double> avar(nodes);  // variance rate 2*(c2 deg - c1 - c2)
  for (int k = 0; k < nodes; ++k)
    avar[k] = 2.0 * (spec.c2 * degree(g, flow.grid.nodes[k]) - spec.c1 - spec.c2);

  std::vector<double> mean0(static_cast<std::size_t>(nodes) * dim);
  for (int k = 0; k < nodes; ++k)
    init.mean_at(flow.grid.nodes[k],
                 {mean0.data() + static_cast<std::size_t>(k) * dim,
                  static_cast<std::size_t>(dim)});
  std::vector<double> var0(nodes, init.variance);

  flow.times.resize(steps + 1);
  flow.mean.resize(steps + 1);
  flow.var.resize(steps + 1);
  flow.mean[0] = mean0;
  flow.var[0] = var0;
  flow.times[0] = 0.0;

  std::vector<double> k1(mean0.size()), k2(mean0.size()), k3(mean0.size()),
      k4(mean0.size()), tmp(mean0.size());
  for (int s = 0; s < steps; ++s) {
    const std::vector<double>& y = flow.mean[s];
    matvec(M, nodes, dim, y, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    matvec(M, nodes, dim, tmp, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    matvec(M, nodes, dim, tmp, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
    matvec(M, nodes, dim, tmp, k4);
    std::vector<double> next(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    std::vector<double> vnext(nodes);
    for (int k = 0; k < nodes; ++k) {
      // RK4 on v' = a v + 1 (closed-form stages of the scalar linear ODE)
      const double v = flow.var[s][k], a = avar[k];
      const double q1 = a * v + 1.0;
      const double q2 = a * (v + 0.5 * dt * q1) + 1.0;
      const double q3 = a * (v + 0.5 * dt * q2) + 1.0;
      const double q4 = a * (v + dt * q3) + 1.0;
      vnext[k] = v + dt / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
      if (!(vnext[k] > 0.0))
        throw std::runtime_error("gaussian flow variance left (0,inf)");
    }
    flow.mean[s + 1] = std::move(next);
    flow.var[s + 1] = std::move(vnext);
    flow.times[s + 1] = (s + 1) * dt;
  }
  return flow;
}

StationaryLaw stationary_linear_gaussian(const Graphon& g,
                                         const DriftSpec& spec, int m) {
  if (spec.kind != DriftSpec::Kind::linear_mean_reverting)
    throw std::invalid_argument("stationary solver requires the linear drift");
  if (!is_dissipative(spec))
    throw std::invalid_argument("stationary law requires a dissipative drift");
  StationaryLaw st;
  st.grid = build_ugrid(g.boundaries(), m);
  st.dim = spec.dim;
  const int nodes = st.grid.size();

  // direct solve of M x = 0 per component (Gaussian elimination, partial pivot)
  std::vector<double> A = mean_system_matrix(g, spec, st.grid);
  std::vector<double> rhs(static_cast<std::size_t>(nodes) * spec.dim, 0.0);
  std::vector<int> perm(nodes);
  for (int i = 0; i < nodes; ++i) perm[i] = i;
  for (int col = 0; col < nodes; ++col) {
    int piv = col;
    for (int r = col + 1; r < nodes; ++r)
      if (std::abs(A[static_cast<std::size_t>(r) * nodes + col]) >
          std::abs(A[static_cast<std::size_t>(piv) * nodes + col]))
        piv = r;
    if (std::abs(A[static_cast<std::size_t>(piv) * nodes + col]) < 1e-14)
      throw std::runtime_error("stationary mean system is numerically singular");
    if (piv != col) {
      for (int c = 0; c < nodes; ++c)
        std::swap(A[static_cast<std::size_t>(piv) * nodes + c],
                  A[static_cast<std::size_t>(col) * nodes + c]);
      for (int c = 0; c < spec.dim; ++c)
        std::swap(rhs[static_cast<std::size_t>(piv) * spec.dim + c],
                  rhs[static_cast<std::size_t>(col) * spec.dim + c]);
    }
    for (int r = col + 1; r < nodes; ++r) {
      const double f = A[static_cast<std::size_t>(r) * nodes + col] /
                       A[static_cast<std::size_t>(col) * nodes + col];
      if (f == 0.0) continue;
      for (int c = col; c < nodes; ++c)
        A[static_cast<std::size_t>(r) * nodes + c] -=
            f * A[static_cast<std::size_t>(col) * nodes + c];
      for (int c = 0; c < spec.dim; ++c)
        rhs[static_cast<std::size_t>(r) * spec.dim + c] -=
            f * rhs[static_cast<std::size_t>(col) * spec.dim + c];
    }
  }
  st.mean.assign(static_cast<std::size_t>(nodes) * spec.dim, 0.0);
  for (int r = nodes - 1; r >= 0; --r) {
    for (int c = 0; c < spec.dim; ++c) {
      double s = rhs[static_cast<std::size_t>(r) * spec.dim + c];
      for (int k = r + 1; k < nodes; ++k)
        s -= A[static_cast<std::size_t>(r) * nodes + k] *
             st.mean[static_cast<std::size_t>(k) * spec.dim + c];
      st.mean[static_cast<std::size_t>(r) * spec.dim + c] =
          s / A[static_cast<std::size_t>(r) * nodes + r];
    }
  }

  st.var.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    const double denom =
        2.0 * (spec.c1 + spec.c2 - spec.c2 * degree(g, st.grid.nodes[k]));
    if (!(denom > 0.0))
      throw std::runtime_error("stationary variance denominator not positive");
    st.var[k] = 1.0 / denom;
  }
  return st;
}

EmpiricalMeasure SampleCloud::node_cloud(int save_idx, int node) const {
  EmpiricalMeasure m;
  m.dim = dim;
  const std::size_t base =
      static_cast<std::size_t>(node) * particles * dim;
  m.data.assign(clouds[save_idx].begin() + base,
                clouds[save_idx].begin() + base +
                    static_cast<std::size_t>(particles) * dim);
  return m;
}

SampleCloud solve_picard(const Graphon& g, const DriftSpec& spec,
                         const InitialLawFamily& init,
                         const PicardOptions& opt) {
  if (opt.particles < 100) throw std::invalid_argument("picard needs M >= 100");
  if (opt.max_iterations < 1) throw std::invalid_argument("picard needs K >= 1");
  if (spec.dim != init.dim) throw std::invalid_argument("drift/init dimension mismatch");
  const int dim = spec.dim;
  const int M = opt.particles;
  const double dt = opt.dt;
  const int steps = static_cast<int>(std::lround(opt.T / dt));

  SampleCloud out;
  out.grid = build_ugrid(merge_boundaries(g.boundaries(), init.boundaries), opt.m);
  out.dim = dim;
  out.particles = M;
  out.dt = dt;
  out.save_times = opt.save_times.empty() ? std::vector<double>{opt.T} : opt.save_times;
  const int nodes = out.grid.size();

  std::vector<int> save_steps;
  for (double t : out.save_times) {
    const long k = std::lround(t / dt);
    if (k < 0 || k > steps || std::abs(t / dt - static_cast<double>(k)) > 1e-6)
      throw std::invalid_argument("picard save time off the dt grid");
    save_steps.push_back(static_cast<int>(k));
  }

  // interaction weights W[k][l] = w_l G(u_k, u_l), degree D_k = sum_l W[k][l]
  std::vector<double> W(static_cast<std::size_t>(nodes) * nodes);
  std::vector<double> D(nodes, 0.0);
  for (int k = 0; k < nodes; ++k) {
    for (int l = 0; l < nodes; ++l) {
      W[static_cast<std::size_t>(k) * nodes + l] =
          out.grid.weights[l] * eval(g, out.grid.nodes[k], out.grid.nodes[l]);
      D[k] += W[static_cast<std::size_t>(k) * nodes + l];
    }
  }

  // candidate mean path, iteration 0: initial-law means frozen in time
  std::vector<std::vector<double>> cand(steps + 1,
                                        std::vector<double>(nodes * dim));
  for (int k = 0; k < nodes; ++k)
    init.mean_at(out.grid.nodes[k],
                 {cand[0].data() + static_cast<std::size_t>(k) * dim,
                  static_cast<std::size_t>(dim)});
  for (int s = 1; s <= steps; ++s) cand[s] = cand[0];

  const rng::Key kroot = rng::master(opt.seed).with(rng::stream_picard);
  const double sdt = std::sqrt(dt);
  const double bx = spec.bx(), by = spec.by(), b0 = spec.b0();

  std::vector<std::vector<double>> prev_clouds;
  std::vector<std::vector<double>> new_mean(steps + 1,
                                            std::vector<double>(nodes * dim));
  out.clouds.assign(save_steps.size(),
                    std::vector<double>(static_cast<std::size_t>(nodes) * M * dim));

  double gap = std::numeric_limits<double>::infinity();
  int sweep = 0;
  while (sweep < opt.max_iterations + 1) {
    ++sweep;
    for (auto& v : new_mean) std::fill(v.begin(), v.end(), 0.0);
    std::vector<std::vector<double>> clouds_now(
        save_steps.size(),
        std::vector<double>(static_cast<std::size_t>(nodes) * M * dim));

#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (int k = 0; k < nodes; ++k) {
      std::vector<double> X(static_cast<std::size_t>(M) * dim);
      std::vector<double> fx(dim);
      const rng::Key knode = kroot.with(static_cast<std::uint64_t>(k));
      for (int p = 0; p < M; ++p)
        init.draw(out.grid.nodes[k], knode.with(rng::stream_init).with(p),
                  {X.data() + static_cast<std::size_t>(p) * dim,
                   static_cast<std::size_t>(dim)});
      const double* Wrow = W.data() + static_cast<std::size_t>(k) * nodes;

      auto record_mean = [&](int step) {
        double* acc = new_mean[step].data() + static_cast<std::size_t>(k) * dim;
        for (int c = 0; c < dim; ++c) {
          double s = 0.0;
          for (int p = 0; p < M; ++p) s += X[static_cast<std::size_t>(p) * dim + c];
          acc[c] = s / M;
        }
      };
      auto record_cloud = [&](int step) {
        for (std::size_t si = 0; si < save_steps.size(); ++si)
          if (save_steps[si] == step)
            std::memcpy(clouds_now[si].data() +
                            static_cast<std::size_t>(k) * M * dim,
                        X.data(), sizeof(double) * M * dim);
      };
      record_mean(0);
      record_cloud(0);
      std::vector<double> cmix(dim);
      for (int s = 0; s < steps; ++s) {
        // law-averaged mean under the candidate at this step
        for (int c = 0; c < dim; ++c) {
          double acc = 0.0;
          for (int l = 0; l < nodes; ++l)
            acc += Wrow[l] * cand[s][static_cast<std::size_t>(l) * dim + c];
          cmix[c] = acc;
        }
        const rng::Key kstep = knode.with(rng::stream_brownian)
                                   .with(static_cast<std::uint64_t>(s));
        for (int p = 0; p < M; ++p) {
          double* x = X.data() + static_cast<std::size_t>(p) * dim;
          spec.f({x, static_cast<std::size_t>(dim)}, fx);
          const rng::Key kp = kstep.with(static_cast<std::uint64_t>(p));
          for (int c = 0; c < dim; ++c) {
            const double inter = bx * x[c] * D[k] + by * cmix[c] + b0 * D[k];
            x[c] += dt * (fx[c] + inter) +
                    sdt * rng::normal(kp.with(static_cast<std::uint64_t>(c)));
          }
        }
        record_mean(s + 1);
        record_cloud(s + 1);
      }
    }

    if (!prev_clouds.empty()) {
      // worst per-node W1 between this sweep and the previous one
      double worst = 0.0;
      for (std::size_t si = 0; si < save_steps.size(); ++si) {
        for (int k = 0; k < nodes; ++k) {
          if (dim == 1) {
            std::vector<double> a(clouds_now[si].begin() + static_cast<std::size_t>(k) * M,
                                  clouds_now[si].begin() + static_cast<std::size_t>(k + 1) * M);
            std::vector<double> b(prev_clouds[si].begin() + static_cast<std::size_t>(k) * M,
                                  prev_clouds[si].begin() + static_cast<std::size_t>(k + 1) * M);
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            double s = 0.0;
            for (int p = 0; p < M; ++p) s += std::abs(a[p] - b[p]);
            worst = std::max(worst, s / M);
          } else {
            // multi-d: RMS of the common-random-number pairing
            double s = 0.0;
            for (int p = 0; p < M * dim; ++p)
              s += sq(clouds_now[si][static_cast<std::size_t>(k) * M * dim + p] -
                      prev_clouds[si][static_cast<std::size_t>(k) * M * dim + p]);
            worst = std::max(worst, std::sqrt(s / M));
          }
        }
      }
      gap = worst;
    }
    prev_clouds = clouds_now;
    out.clouds = std::move(clouds_now);
    cand = new_mean;

    if (sweep >= 2 && gap < opt.tol) {
      out.converged = true;
      out.iterations = sweep - 1;  // previous sweep already was the fixed point
      break;
    }
  }
  if (!out.converged) out.iterations = sweep;
  out.achieved_gap = gap;
  out.mean_path = std::move(cand);
  return out;
}

MixtureLaw1D hat_mu(const GaussianFlow& flow, double t) {
  if (flow.dim != 1) throw std::domain_error("hat_mu mixture requires d = 1");
  const int s = flow.time_index(t);
  MixtureLaw1D law;
  const int nodes = flow.grid.size();
  law.weights.resize(nodes);
  law.components.resize(nodes);
  double wsum = 0.0;
  for (int k = 0; k < nodes; ++k) wsum += flow.grid.weights[k];
  for (int k = 0; k < nodes; ++k) {
    law.weights[k] = flow.grid.weights[k] / wsum;
    law.components[k] = Gaussian1D{flow.mean[s][k], flow.var[s][k]};
  }
  return law;
}

MixtureLaw1D hat_mu(const StationaryLaw& st) {
  if (st.dim != 1) throw std::domain_error("hat_mu mixture requires d = 1");
  MixtureLaw1D law;
  const int nodes = st.grid.size();
  law.weights.resize(nodes);
  law.components.resize(nodes);
  double wsum = 0.0;
  for (int k = 0; k < nodes; ++k) wsum += st.grid.weights[k];
  for (int k = 0; k < nodes; ++k) {
    law.weights[k] = st.grid.weights[k] / wsum;
    law.components[k] = Gaussian1D{st.mean[k], st.var[k]};
  }
  return law;
}

EmpiricalMeasure hat_mu_pooled(const SampleCloud& cloud, double t) {
  int si = -1;
  for (std::size_t i = 0; i < cloud.save_times.size(); ++i)
    if (std::abs(cloud.save_times[i] - t) < 1e-9) si = static_cast<int>(i);
  if (si < 0) throw std::domain_error("requested time was not saved");
  EmpiricalMeasure m;
  m.dim = cloud.dim;
  m.data = cloud.clouds[si];
  return m;
}

}  // namespace gps
