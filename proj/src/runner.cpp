#include "gps/runner.hpp"

#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gps/concentration.hpp"
#include "gps/limitlaw.hpp"
#include "gps/ot.hpp"
#include "gps/simulate.hpp"
#include "gps/util.hpp"

namespace gps {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct ArtifactSet {
  std::map<std::string, std::string> files;  // name -> content

  std::string& open(const std::string& name) { return files[name]; }
};

// all-or-nothing write of the buffered artifacts
void flush_artifacts(const ArtifactSet& art, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<fs::path> written;
  for (const auto& [name, content] : art.files) {
    const fs::path p = dir / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os || !(os << content) || !os.flush()) {
      for (const fs::path& w : written) fs::remove(w, ec);
      fs::remove(p, ec);
      throw std::ios_base::failure("cannot write " + p.string());
    }
    written.push_back(p);
  }
}

// tabular artifact rendered as CSV or JSON; cells are preformatted so both
// formats stay byte-deterministic
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string>& add_row() { return rows.emplace_back(); }
};

void write_table(ArtifactSet& art, const ExperimentConfig& cfg,
                 ArtifactFormat format, const std::string& base,
                 const Table& table) {
  if (format == ArtifactFormat::csv) {
    std::string& out = art.open(base + ".csv");
    out += "# config_hash=" + std::to_string(config_hash(cfg)) + "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out += (c ? "," : "") + table.columns[c];
    out += "\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
      out += "\n";
    }
  } else {
    json j;
    j["config_hash"] = config_hash(cfg);
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    art.open(base + ".json") = j.dump(2) + "\n";
  }
}

TailConfig tail_config_of(const ExperimentConfig& cfg) {
  TailConfig tc;
  tc.g = cfg.graphon;
  tc.drift = cfg.drift;
  tc.init = cfg.initial;
  tc.n_values = cfg.numerics.n_values;
  tc.epsilons = cfg.numerics.epsilons;
  tc.times = cfg.numerics.times;
  tc.dt = cfg.numerics.dt;
  tc.T = cfg.numerics.T;
  tc.mode = cfg.mode;
  tc.replications = cfg.numerics.replications;
  tc.quad_points = cfg.numerics.quad_points;
  tc.m = cfg.numerics.m;
  tc.picard_particles = cfg.numerics.M;
  tc.picard_iterations = cfg.numerics.picard_iterations;
  tc.picard_tol = cfg.numerics.picard_tol;
  tc.seed = cfg.seed;
  tc.d_prime = cfg.numerics.d_prime;
  return tc;
}

Table tail_table(const TailEstimate& est) {
  Table t;
  t.columns = {"n",      "epsilon", "t_or_sup", "replications",
               "exceed_count", "p_hat", "ci_low", "ci_high"};
  for (const TailRow& r : est.rows) {
    auto& row = t.add_row();
    row = {std::to_string(r.n),
           fmt(r.epsilon),
           r.t < 0 ? std::string("sup") : fmt(r.t),
           std::to_string(r.replications),
           std::to_string(r.exceed_count),
           fmt(r.p_hat),
           fmt(r.ci_lo),
           fmt(r.ci_hi)};
  }
  return t;
}

json tail_summary(const ExperimentConfig& cfg, const TailEstimate& est) {
  json s;
  s["d_prime"] = est.d_prime;
  s["d_prime_note"] =
      "threshold n >= N0*max(eps^-(d'+2),1) involves a non-constructive N0; "
      "only the tested (n, eps) range is recorded";
  s["condition_special"] = est.condition_special;
  s["mixture_bias_bound"] = est.mixture_bias_bound;
  s["flag"] = est.flag;
  if (est.fit) {
    s["rate_fit"] = {{"slope_n_eps2", est.fit->slope_n_eps2},
                     {"r2_n_eps2", est.fit->r2_n_eps2},
                     {"slope_sqrtn_eps", est.fit->slope_sqrtn_eps},
                     {"r2_sqrtn_eps", est.fit->r2_sqrtn_eps},
                     {"points_used", est.fit->points_used},
                     {"non_decaying", est.fit->non_decaying}};
  }
  s["provenance"] = {{"seed", cfg.seed},
                     {"dt", cfg.numerics.dt},
                     {"m", cfg.numerics.m},
                     {"quad_points", cfg.numerics.quad_points},
                     {"graphon", cfg.graphon.describe()},
                     {"graphon_hash", graphon_spec_hash(cfg.graphon)},
                     {"config_hash", config_hash(cfg)}};
  return s;
}

int exit_code_of(const TailEstimate& est) {
  bool all_censored = true;
  for (const TailRow& r : est.rows) all_censored = all_censored && r.censored;
  return all_censored ? kExitInconclusive : kExitOk;
}

std::vector<double> default_sup_grid(const ExperimentConfig& cfg) {
  // 32 evenly spaced save points on the dt grid over (0, T]
  std::vector<double> times;
  const int steps = static_cast<int>(std::lround(cfg.numerics.T / cfg.numerics.dt));
  const int stride = std::max(1, steps / 32);
  for (int s = stride; s <= steps; s += stride) times.push_back(s * cfg.numerics.dt);
  return times;
}

int run_simulate(const ExperimentConfig& cfg, ArtifactSet& art,
                 ArtifactFormat format) {
  const int n = cfg.numerics.n_values.front();
  const int R = cfg.numerics.replications;
  const bool coupled = cfg.drift.kind == DriftSpec::Kind::linear_mean_reverting &&
                       cfg.initial.kind == InitialLawFamily::Kind::gaussian_per_block;

  Table traj;
  traj.columns = {"replication", "t", "i"};
  for (int c = 0; c < cfg.drift.dim; ++c)
    traj.columns.push_back("x" + std::to_string(c));
  Table diag;
  diag.columns = {"replication", "t",           "R_rms",
                  "Ttilde_rms",  "T_rms",       "p_integrand",
                  "discounted_integral"};

  LimitLaw law = GaussianFlow{};
  if (coupled)
    law = solve_linear_gaussian(cfg.graphon, cfg.drift, cfg.initial,
                                cfg.numerics.m, cfg.numerics.dt, cfg.numerics.T);

  for (int r = 0; r < R; ++r) {
    SimOptions opt;
    opt.dt = cfg.numerics.dt;
    opt.T = cfg.numerics.T;
    opt.save_times = cfg.numerics.save_times;
    opt.seed = rng::master(cfg.seed)
                   .with(rng::stream_replication)
                   .with(static_cast<std::uint64_t>(r))
                   .state;
    opt.mode = cfg.mode;
    auto emit_points = [&](double t, const EmpiricalMeasure& nu) {
      for (int i = 0; i < n; ++i) {
        auto& row = traj.add_row();
        row = {std::to_string(r), fmt(t), std::to_string(i)};
        for (int c = 0; c < cfg.drift.dim; ++c) row.push_back(fmt(nu.point(i)[c]));
      }
    };
    if (coupled) {
      const CoupledResult res =
          run_coupled(cfg.graphon, cfg.drift, cfg.initial, law, n, opt);
      for (std::size_t s = 0; s < res.times.size(); ++s) {
        emit_points(res.times[s], res.nu[s]);
        const DiagnosticsFrame& f = res.frames[s];
        auto rms = [&](const std::vector<double>& v) {
          std::vector<double> sqv(v.size());
          for (std::size_t k = 0; k < v.size(); ++k) sqv[k] = v[k] * v[k];
          return std::sqrt(pairwise_sum(sqv) / v.size());
        };
        auto& row = diag.add_row();
        row = {std::to_string(r),      fmt(f.t),
               fmt(rms(f.R_norm)),     fmt(rms(f.T_tilde_norm)),
               fmt(rms(f.T_norm)),     fmt(f.p_integrand),
               fmt(f.discounted_integral)};
      }
    } else {
      const auto snaps = run_finite(cfg.graphon, cfg.drift, cfg.initial, n, opt);
      for (const Snapshot& s : snaps) emit_points(s.t, s.nu);
    }
  }
  write_table(art, cfg, format, "trajectories", traj);
  if (coupled) write_table(art, cfg, format, "diagnostics", diag);
  return kExitOk;
}

int run_limit(const ExperimentConfig& cfg, ArtifactSet& art,
              ArtifactFormat format) {
  const std::vector<double> saves = cfg.numerics.save_times.empty()
                                        ? std::vector<double>{cfg.numerics.T}
                                        : cfg.numerics.save_times;
  if (cfg.drift.kind == DriftSpec::Kind::linear_mean_reverting &&
      cfg.initial.kind == InitialLawFamily::Kind::gaussian_per_block) {
    const GaussianFlow flow =
        solve_linear_gaussian(cfg.graphon, cfg.drift, cfg.initial, cfg.numerics.m,
                              cfg.numerics.dt, cfg.numerics.T);
    Table t;
    t.columns = {"u", "t"};
    for (int c = 0; c < flow.dim; ++c) t.columns.push_back("mean" + std::to_string(c));
    t.columns.push_back("variance");
    for (double save : saves) {
      const int s = flow.time_index(save);
      for (int k = 0; k < flow.grid.size(); ++k) {
        auto& row = t.add_row();
        row = {fmt(flow.grid.nodes[k]), fmt(save)};
        for (int c = 0; c < flow.dim; ++c)
          row.push_back(fmt(flow.mean[s][static_cast<std::size_t>(k) * flow.dim + c]));
        row.push_back(fmt(flow.var[s][k]));
      }
    }
    write_table(art, cfg, format, "limitlaw", t);
  } else {
    PicardOptions popt;
    popt.m = cfg.numerics.m;
    popt.particles = cfg.numerics.M;
    popt.max_iterations = cfg.numerics.picard_iterations;
    popt.dt = cfg.numerics.dt;
    popt.T = cfg.numerics.T;
    popt.tol = cfg.numerics.picard_tol;
    popt.seed = cfg.seed;
    popt.save_times = saves;
    const SampleCloud cloud = solve_picard(cfg.graphon, cfg.drift, cfg.initial, popt);
    Table t;
    t.columns = {"u", "t"};
    for (int c = 0; c < cloud.dim; ++c)
      t.columns.push_back(c == 0 ? "sample" : "sample" + std::to_string(c));
    for (std::size_t si = 0; si < cloud.save_times.size(); ++si)
      for (int k = 0; k < cloud.grid.size(); ++k)
        for (int p = 0; p < cloud.particles; ++p) {
          auto& row = t.add_row();
          row = {fmt(cloud.grid.nodes[k]), fmt(cloud.save_times[si])};
          for (int c = 0; c < cloud.dim; ++c)
            row.push_back(fmt(
                cloud.clouds[si][(static_cast<std::size_t>(k) * cloud.particles + p) *
                                     cloud.dim +
                                 c]));
        }
    write_table(art, cfg, format, "limitlaw", t);
    json s;
    s["picard"] = {{"converged", cloud.converged},
                   {"iterations", cloud.iterations},
                   {"achieved_gap", cloud.achieved_gap}};
    art.open("summary.json") = s.dump(2) + "\n";
    if (!cloud.converged)
      std::cerr << "warning: picard iteration did not reach tolerance\n";
  }
  return kExitOk;
}

int run_tail(const ExperimentConfig& cfg, ArtifactSet& art,
             ArtifactFormat format) {
  TailConfig tc = tail_config_of(cfg);
  TailEstimate est;
  if (cfg.kind == ExperimentKind::tail_sup) {
    if (tc.times.empty()) tc.times = default_sup_grid(cfg);
    est = estimate_tail_sup(tc);
  } else {
    if (tc.times.empty()) tc.times = {cfg.numerics.T};
    est = estimate_tail_marginal(tc);
  }
  write_table(art, cfg, format, "tail", tail_table(est));
  json s = tail_summary(cfg, est);
  if (cfg.kind == ExperimentKind::tail_marginal && tc.times.size() > 1) {
    // trend over time at the first (n, epsilon): level and drift
    std::vector<double> ts, ps;
    for (const TailRow& r : est.rows)
      if (r.n == tc.n_values.front() && r.epsilon == tc.epsilons.front()) {
        ts.push_back(r.t);
        ps.push_back(r.p_hat);
      }
    if (ts.size() >= 2) {
      const LineFit trend = fit_line(ts, ps);
      double pmax = 0.0;
      for (double p : ps) pmax = std::max(pmax, p);
      s["time_trend"] = {{"max_p_hat", pmax}, {"slope_per_unit_time", trend.slope}};
    }
  }
  art.open("summary.json") = s.dump(2) + "\n";
  return exit_code_of(est);
}

int run_invariant(const ExperimentConfig& cfg, ArtifactSet& art,
                  ArtifactFormat format) {
  TailConfig tc = tail_config_of(cfg);
  const InvariantReport rep = invariant_experiment(tc);
  Table decay;
  decay.columns = {"t", "w2_to_stationary"};
  for (std::size_t i = 0; i < rep.decay_times.size(); ++i) {
    auto& row = decay.add_row();
    row = {fmt(rep.decay_times[i]), fmt(rep.decay_w2[i])};
  }
  write_table(art, cfg, format, "decay", decay);

  TailEstimate est;
  est.rows = {rep.row_t1, rep.row_tstar};
  est.d_prime = tc.d_prime;
  est.condition_special =
      tc.mode == SampleMode::deterministic || tc.drift.b_at_zero_bounded;
  write_table(art, cfg, format, "tail", tail_table(est));

  json s = tail_summary(cfg, est);
  s["invariant"] = {{"fitted_rate", rep.fitted_rate},
                    {"fitted_r2", rep.fitted_r2},
                    {"C_tilde", rep.C_tilde},
                    {"T0_hat", rep.T0_hat},
                    {"eps0_hat", rep.eps0_hat},
                    {"t_star", rep.t_star},
                    {"kappa_over_2", 0.5 * kappa_of(cfg.drift)}};
  art.open("summary.json") = s.dump(2) + "\n";
  return exit_code_of(est);
}

int run_appendix_c(const ExperimentConfig& cfg, ArtifactSet& art,
                   ArtifactFormat format) {
  const TailEstimate est = indep_empirical_tail(
      cfg.initial, cfg.numerics.n_values, cfg.numerics.epsilons.front(),
      cfg.numerics.p_order, cfg.numerics.replications, cfg.seed,
      cfg.numerics.quad_points);
  write_table(art, cfg, format, "tail", tail_table(est));
  json s = tail_summary(cfg, est);
  if (cfg.numerics.p_order == 2)
    s["gamma_p_reference"] = 3.0 - 2.0 * std::sqrt(2.0);
  art.open("summary.json") = s.dump(2) + "\n";
  return exit_code_of(est);
}

int run_mgf_checks(const ExperimentConfig& cfg, ArtifactSet& art,
                   ArtifactFormat format) {
  const MgfCheckResult res = hoeffding_mgf_check(
      cfg.graphon, cfg.numerics.n_values.front(), cfg.numerics.mgf_row,
      cfg.numerics.theta_grid, cfg.numerics.replications, cfg.seed);
  Table mgf_table;
  mgf_table.columns = {"theta", "sign", "estimate", "stderr", "bound", "margin"};
  for (const MgfCheckRow& r : res.rows) {
    auto& row = mgf_table.add_row();
    row = {fmt(r.theta),     std::to_string(r.sign), fmt(r.mc_estimate),
           fmt(r.mc_stderr), fmt(r.bound),           fmt(r.margin)};
  }
  write_table(art, cfg, format, "mgf", mgf_table);

  // sub-Gaussian margins for the built-in centered laws
  Table sg;
  sg.columns = {"law", "a", "margin"};
  const double a = 1.0 / std::log(2.0);
  std::vector<double> grid;
  for (int k = 0; k < 201; ++k) grid.push_back(-10.0 + 0.1 * k);
  double worst_sg = -1e300;
  for (const auto& [name, law] :
       std::vector<std::pair<std::string, CenteredLaw1D>>{
           {"rademacher", RademacherLaw{}},
           {"uniform", UniformLaw{1.0}},
           {"truncated_gaussian", TruncatedGaussianLaw{1.0, 1.0}}}) {
    const double margin = subgaussian_bound_check(law, a, grid);
    worst_sg = std::max(worst_sg, margin);
    auto& row = sg.add_row();
    row = {name, fmt(a), fmt(margin)};
  }
  write_table(art, cfg, format, "subgaussian", sg);

  json s;
  s["hoeffding_worst_margin"] = res.worst_margin;
  s["subgaussian_worst_margin"] = worst_sg;
  s["provenance"] = {{"seed", cfg.seed}, {"config_hash", config_hash(cfg)}};
  art.open("summary.json") = s.dump(2) + "\n";
  return res.worst_margin <= 0.0 && worst_sg <= 0.0 ? kExitOk : kExitCheckFailed;
}

int run_validate(const ExperimentConfig& cfg, ArtifactSet& art) {
  std::string& out = art.open("validate.txt");
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    out += std::string(ok ? "pass" : "FAIL") + "  " + name + "\n";
    if (!ok) ++failures;
  };
  const rng::Key k = rng::master(cfg.seed).with(rng::stream_pairs);

  // graphon range and degree consistency
  bool range_ok = true, degree_ok = true;
  for (int s = 0; s < 10000; ++s) {
    const double u = rng::uniform01(k.with(1).with(s));
    const double v = rng::uniform01(k.with(2).with(s));
    const double g = eval(cfg.graphon, u, v);
    range_ok = range_ok && g >= 0.0 && g <= 1.0;
  }
  for (int s = 0; s < 16; ++s) {
    const double u = rng::uniform01(k.with(3).with(s));
    // composite trapezoid split at the block boundaries (the integrand can
    // jump there)
    const std::vector<double>& bd = cfg.graphon.boundaries();
    double trap = 0.0;
    for (std::size_t b = 0; b + 1 < bd.size(); ++b) {
      const double lo = bd[b], hi = bd[b + 1];
      const int cells = std::max(1, static_cast<int>(10000 * (hi - lo)));
      double part = 0.0;
      for (int q = 0; q <= cells; ++q) {
        const double w = (q == 0 || q == cells) ? 0.5 : 1.0;
        const double v = std::min(lo + (hi - lo) * q / cells, hi - 1e-13);
        part += w * eval(cfg.graphon, u, v);
      }
      trap += part * (hi - lo) / cells;
    }
    degree_ok = degree_ok && std::abs(trap - degree(cfg.graphon, u)) < 1e-6;
  }
  check("graphon range within [0,1] on 1e4 points", range_ok);
  check("degree matches trapezoidal quadrature within 1e-6", degree_ok);

  // interaction sampling reproducibility
  {
    const InteractionMatrix m1(cfg.graphon, 32, SampleMode::bernoulli, cfg.seed);
    const InteractionMatrix m2(cfg.graphon, 32, SampleMode::bernoulli, cfg.seed);
    bool same = true;
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) same = same && m1.entry(i, j) == m2.entry(i, j);
    check("bernoulli sampling reproducible", same);
    const InteractionMatrix md(cfg.graphon, 32, SampleMode::deterministic);
    bool det = true;
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j)
        det = det && md.entry(i, j) ==
                         eval(cfg.graphon, u_of_index(i, 32), u_of_index(j, 32));
    check("deterministic matrix equals pointwise eval", det);
  }

  // drift constants
  check("kappa_of arithmetic", kappa_of(cfg.drift) == cfg.drift.c0 - 2 * cfg.drift.K_b);
  if (cfg.drift.kind == DriftSpec::Kind::linear_mean_reverting) {
    const double est = estimate_c0(cfg.drift, 200, 5.0, cfg.seed);
    check("monotonicity ratio matches declared c0",
          std::abs(est - cfg.drift.c0) < 1e-9);
  }

  // OT metric sanity on random triples
  {
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      const rng::Key kt = k.with(4).with(trial);
      auto draw = [&](int salt) {
        EmpiricalMeasure m;
        m.dim = 1;
        for (int i = 0; i < 16; ++i)
          m.data.push_back(rng::normal(kt.with(salt).with(i)));
        return m;
      };
      const EmpiricalMeasure a = draw(1), b = draw(2), c = draw(3);
      const double ab = w1_sorted_1d(a, b), ba = w1_sorted_1d(b, a);
      const double ac = w1_sorted_1d(a, c), cb = w1_sorted_1d(c, b);
      ok = ok && std::abs(ab - ba) < 1e-12 && ab >= 0.0 && ab <= ac + cb + 1e-9;
      ok = ok && std::abs(w1_sorted_1d(a, a)) < 1e-12;
      ok = ok && std::abs(ab - wp_assignment(a, b, 1)) < 1e-9;
    }
    check("W1 metric properties and solver agreement", ok);
  }

  // coupled diagnostics identity on a short run
  if (cfg.drift.kind == DriftSpec::Kind::linear_mean_reverting &&
      cfg.initial.kind == InitialLawFamily::Kind::gaussian_per_block) {
    const GaussianFlow flow = solve_linear_gaussian(
        cfg.graphon, cfg.drift, cfg.initial, 32, cfg.numerics.dt, 0.2);
    SimOptions opt;
    opt.dt = cfg.numerics.dt;
    opt.T = 0.2;
    opt.save_times = {0.1, 0.2};
    opt.seed = cfg.seed;
    opt.mode = cfg.mode;
    const CoupledResult res =
        run_coupled(cfg.graphon, cfg.drift, cfg.initial, LimitLaw{flow}, 64, opt);
    double worst = 0.0;
    for (const auto& f : res.frames) worst = std::max(worst, f.max_identity_gap);
    check("diagnostics identity R = T~ + T within 1e-12", worst <= 1e-12);
    if (cfg.mode == SampleMode::deterministic) {
      double tmax = 0.0;
      for (const auto& f : res.frames)
        for (double v : f.T_tilde_norm) tmax = std::max(tmax, v);
      check("deterministic mode forces T~ = 0", tmax == 0.0);
    }
  }

  // determinism of a small run
  {
    SimOptions opt;
    opt.dt = 0.01;
    opt.T = 0.1;
    opt.save_times = {0.1};
    opt.seed = cfg.seed;
    opt.mode = cfg.mode;
    const auto s1 = run_finite(cfg.graphon, cfg.drift, cfg.initial, 128, opt);
    opt.parallel = false;
    const auto s2 = run_finite(cfg.graphon, cfg.drift, cfg.initial, 128, opt);
    check("bitwise determinism across thread modes",
          s1.back().nu.data == s2.back().nu.data);
  }
  out += failures == 0 ? "all checks passed\n" : "some checks FAILED\n";
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   ArtifactFormat format) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

  const fs::path dir(out_dir);
  // refuse to mix experiments: an existing manifest must carry the same hash
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    try {
      std::ifstream is(manifest_path);
      json m = json::parse(is);
      if (m.contains("config_hash") &&
          m["config_hash"].get<std::uint64_t>() != config_hash(cfg)) {
        std::cerr << "error: output directory holds a different experiment "
                     "(config hash mismatch)\n";
        return kExitConfig;
      }
    } catch (...) {
      std::cerr << "error: unreadable manifest in output directory\n";
      return kExitIo;
    }
  }

  ArtifactSet art;
  int code = kExitOk;
  try {
    switch (cfg.kind) {
      case ExperimentKind::simulate: code = run_simulate(cfg, art, format); break;
      case ExperimentKind::limit: code = run_limit(cfg, art, format); break;
      case ExperimentKind::tail_sup:
      case ExperimentKind::tail_marginal: code = run_tail(cfg, art, format); break;
      case ExperimentKind::invariant: code = run_invariant(cfg, art, format); break;
      case ExperimentKind::appendix_c: code = run_appendix_c(cfg, art, format); break;
      case ExperimentKind::mgf_checks: code = run_mgf_checks(cfg, art, format); break;
      case ExperimentKind::validate: code = run_validate(cfg, art); break;
    }
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["toolkit_version"] = kToolkitVersion;
  manifest["experiment"] = to_string(cfg.kind);
  manifest["seed"] = cfg.seed;
  manifest["config_hash"] = config_hash(cfg);
  manifest["wall_seconds"] = wall;
  manifest["config"] = json::parse(serialize_config(cfg));
  art.open("manifest.json") = manifest.dump(2) + "\n";
  art.open("config.json") = serialize_config(cfg) + "\n";

  try {
    flush_artifacts(art, dir);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return code;
}

}  // namespace gps
