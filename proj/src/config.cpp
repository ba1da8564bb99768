#include "gps/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace gps {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail(path + "." + item.key(), "unknown key");
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key,
         const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "wrong type");
  }
}

template <typename T>
T require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "wrong type");
  }
}

Graphon parse_graphon(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = require<std::string>(j, path, "kind");
  if (kind == "constant") {
    check_keys(j, path, {"kind", "value"});
    return Graphon::constant(require<double>(j, path, "value"));
  }
  if (kind == "product") {
    check_keys(j, path, {"kind"});
    return Graphon::product();
  }
  if (kind == "min") {
    check_keys(j, path, {"kind"});
    return Graphon::min();
  }
  if (kind == "block_constant") {
    check_keys(j, path, {"kind", "boundaries", "values"});
    return Graphon::block_constant(
        require<std::vector<double>>(j, path, "boundaries"),
        require<std::vector<std::vector<double>>>(j, path, "values"));
  }
  if (kind == "block_affine") {
    check_keys(j, path, {"kind", "boundaries", "coefficients"});
    const auto raw =
        require<std::vector<std::vector<std::vector<double>>>>(j, path, "coefficients");
    std::vector<std::vector<Graphon::Affine>> coeffs;
    for (const auto& row : raw) {
      std::vector<Graphon::Affine> out;
      for (const auto& c : row) {
        if (c.size() != 3) fail(path + ".coefficients", "each entry needs [a,b,c]");
        out.push_back({c[0], c[1], c[2]});
      }
      coeffs.push_back(std::move(out));
    }
    return Graphon::block_affine(require<std::vector<double>>(j, path, "boundaries"),
                                 std::move(coeffs));
  }
  fail(path + ".kind", "unknown graphon kind '" + kind + "'");
}

json graphon_json(const Graphon& g) {
  json j;
  switch (g.kind()) {
    case Graphon::Kind::constant:
      j["kind"] = "constant";
      j["value"] = eval(g, 0.0, 0.0);
      break;
    case Graphon::Kind::product:
      j["kind"] = "product";
      break;
    case Graphon::Kind::min:
      j["kind"] = "min";
      break;
    case Graphon::Kind::block_constant: {
      j["kind"] = "block_constant";
      j["boundaries"] = g.boundaries();
      std::vector<std::vector<double>> vals;
      for (int a = 0; a < g.block_count(); ++a) {
        std::vector<double> row;
        for (int b = 0; b < g.block_count(); ++b) row.push_back(g.block_value(a, b));
        vals.push_back(std::move(row));
      }
      j["values"] = vals;
      break;
    }
    case Graphon::Kind::block_affine: {
      j["kind"] = "block_affine";
      j["boundaries"] = g.boundaries();
      // reconstruct coefficients by sampling the affine form at block corners
      const auto& bd = g.boundaries();
      std::vector<std::vector<std::vector<double>>> coeffs;
      for (int a = 0; a < g.block_count(); ++a) {
        std::vector<std::vector<double>> row;
        for (int b = 0; b < g.block_count(); ++b) {
          const double u0 = bd[a], u1 = 0.5 * (bd[a] + bd[a + 1]);
          const double v0 = bd[b], v1 = 0.5 * (bd[b] + bd[b + 1]);
          const double g00 = eval(g, u0, v0);
          const double gu = (eval(g, u1, v0) - g00) / (u1 - u0);
          const double gv = (eval(g, u0, v1) - g00) / (v1 - v0);
          row.push_back({g00 - gu * u0 - gv * v0, gu, gv});
        }
        coeffs.push_back(std::move(row));
      }
      j["coefficients"] = coeffs;
      break;
    }
  }
  return j;
}

DriftSpec parse_drift(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = require<std::string>(j, path, "kind");
  if (kind == "linear_mean_reverting") {
    check_keys(j, path, {"kind", "c1", "c2", "dim"});
    return DriftSpec::linear_mean_reverting(require<double>(j, path, "c1"),
                                            require<double>(j, path, "c2"),
                                            get_or<int>(j, path, "dim", 1));
  }
  if (kind == "custom") {
    check_keys(j, path, {"kind", "alpha", "gamma", "beta_x", "beta_y", "beta_0",
                         "K_f", "K_b", "c0", "dim"});
    return DriftSpec::custom(
        get_or<double>(j, path, "alpha", 0.0), get_or<double>(j, path, "gamma", 0.0),
        get_or<double>(j, path, "beta_x", 0.0), get_or<double>(j, path, "beta_y", 0.0),
        get_or<double>(j, path, "beta_0", 0.0), require<double>(j, path, "K_f"),
        require<double>(j, path, "K_b"), require<double>(j, path, "c0"),
        get_or<int>(j, path, "dim", 1));
  }
  fail(path + ".kind", "unknown drift kind '" + kind + "'");
}

json drift_json(const DriftSpec& d) {
  json j;
  if (d.kind == DriftSpec::Kind::linear_mean_reverting) {
    j["kind"] = "linear_mean_reverting";
    j["c1"] = d.c1;
    j["c2"] = d.c2;
    j["dim"] = d.dim;
  } else {
    j["kind"] = "custom";
    j["alpha"] = d.alpha;
    j["gamma"] = d.gamma;
    j["beta_x"] = d.beta_x;
    j["beta_y"] = d.beta_y;
    j["beta_0"] = d.beta_0;
    j["K_f"] = d.K_f;
    j["K_b"] = d.K_b;
    j["c0"] = d.c0;
    j["dim"] = d.dim;
  }
  return j;
}

InitialLawFamily parse_initial(const json& j, const std::string& path, int dim) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = require<std::string>(j, path, "kind");
  const auto boundaries =
      get_or<std::vector<double>>(j, path, "boundaries", {0.0, 1.0});
  auto intercepts = require<std::vector<std::vector<double>>>(j, path, "mean_intercepts");
  auto slopes = get_or<std::vector<std::vector<double>>>(
      j, path, "mean_slopes",
      std::vector<std::vector<double>>(intercepts.size(),
                                       std::vector<double>(dim, 0.0)));
  try {
    if (kind == "gaussian_per_block") {
      check_keys(j, path, {"kind", "boundaries", "mean_intercepts", "mean_slopes",
                           "variance", "theta0"});
      return InitialLawFamily::gaussian(boundaries, std::move(intercepts),
                                        std::move(slopes),
                                        require<double>(j, path, "variance"),
                                        require<double>(j, path, "theta0"), dim);
    }
    if (kind == "point_mass") {
      check_keys(j, path, {"kind", "boundaries", "mean_intercepts", "mean_slopes"});
      return InitialLawFamily::point_mass(boundaries, std::move(intercepts),
                                          std::move(slopes), dim);
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown initial law kind '" + kind + "'");
}

json initial_json(const InitialLawFamily& f) {
  json j;
  j["kind"] = f.kind == InitialLawFamily::Kind::gaussian_per_block
                  ? "gaussian_per_block"
                  : "point_mass";
  j["boundaries"] = f.boundaries;
  j["mean_intercepts"] = f.intercepts;
  j["mean_slopes"] = f.slopes;
  if (f.kind == InitialLawFamily::Kind::gaussian_per_block) {
    j["variance"] = f.variance;
    j["theta0"] = f.theta0;
  }
  return j;
}

NumericsConfig parse_numerics(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path,
             {"n", "m", "M", "dt", "T", "save_times", "times", "epsilons",
              "replications", "quad_points", "picard_iterations", "picard_tol",
              "d_prime", "p_order", "theta_grid", "mgf_row"});
  NumericsConfig n;
  n.n_values = get_or<std::vector<int>>(j, path, "n", n.n_values);
  n.m = get_or<int>(j, path, "m", n.m);
  n.M = get_or<int>(j, path, "M", n.M);
  n.dt = get_or<double>(j, path, "dt", n.dt);
  n.T = get_or<double>(j, path, "T", n.T);
  n.save_times = get_or<std::vector<double>>(j, path, "save_times", n.save_times);
  n.times = get_or<std::vector<double>>(j, path, "times", n.times);
  n.epsilons = get_or<std::vector<double>>(j, path, "epsilons", n.epsilons);
  n.replications = get_or<int>(j, path, "replications", n.replications);
  n.quad_points = get_or<int>(j, path, "quad_points", n.quad_points);
  n.picard_iterations = get_or<int>(j, path, "picard_iterations", n.picard_iterations);
  n.picard_tol = get_or<double>(j, path, "picard_tol", n.picard_tol);
  n.d_prime = get_or<int>(j, path, "d_prime", n.d_prime);
  n.p_order = get_or<int>(j, path, "p_order", n.p_order);
  n.theta_grid = get_or<std::vector<double>>(j, path, "theta_grid", n.theta_grid);
  n.mgf_row = get_or<int>(j, path, "mgf_row", n.mgf_row);
  return n;
}

json numerics_json(const NumericsConfig& n) {
  json j;
  j["n"] = n.n_values;
  j["m"] = n.m;
  j["M"] = n.M;
  j["dt"] = n.dt;
  j["T"] = n.T;
  j["save_times"] = n.save_times;
  j["times"] = n.times;
  j["epsilons"] = n.epsilons;
  j["replications"] = n.replications;
  j["quad_points"] = n.quad_points;
  j["picard_iterations"] = n.picard_iterations;
  j["picard_tol"] = n.picard_tol;
  j["d_prime"] = n.d_prime;
  j["p_order"] = n.p_order;
  j["theta_grid"] = n.theta_grid;
  j["mgf_row"] = n.mgf_row;
  return j;
}

std::pair<int, int> line_col_of(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::limit: return "limit";
    case ExperimentKind::tail_sup: return "tail_sup";
    case ExperimentKind::tail_marginal: return "tail_marginal";
    case ExperimentKind::invariant: return "invariant";
    case ExperimentKind::appendix_c: return "appendix_c";
    case ExperimentKind::mgf_checks: return "mgf_checks";
    case ExperimentKind::validate: return "validate";
  }
  return "unknown";
}

ExperimentKind experiment_kind_of(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::simulate, ExperimentKind::limit, ExperimentKind::tail_sup,
        ExperimentKind::tail_marginal, ExperimentKind::invariant,
        ExperimentKind::appendix_c, ExperimentKind::mgf_checks,
        ExperimentKind::validate})
    if (to_string(k) == name) return k;
  throw ConfigError("experiment: unknown kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (drift.dim != initial.dim)
    throw ConfigError("initial: dimension does not match drift.dim");
  if (!(numerics.dt > 0.0)) throw ConfigError("numerics.dt: must be positive");
  if (numerics.T < 0.0) throw ConfigError("numerics.T: must be nonnegative");
  if (numerics.m < 2) throw ConfigError("numerics.m: must be at least 2");
  if (numerics.replications < 1)
    throw ConfigError("numerics.replications: must be at least 1");
  for (int n : numerics.n_values)
    if (n < 1) throw ConfigError("numerics.n: entries must be positive");
  for (double e : numerics.epsilons)
    if (!(e >= 0.0)) throw ConfigError("numerics.epsilons: entries must be >= 0");
  if (numerics.quad_points < 64)
    throw ConfigError("numerics.quad_points: must be at least 64");
  if (kind == ExperimentKind::tail_marginal || kind == ExperimentKind::invariant) {
    if (!is_dissipative(drift))
      throw ConfigError("drift: dissipativity required for this experiment (kappa <= 0)");
  }
  if (kind == ExperimentKind::tail_sup || kind == ExperimentKind::tail_marginal ||
      kind == ExperimentKind::invariant || kind == ExperimentKind::appendix_c) {
    if (drift.dim != 1)
      throw ConfigError("drift.dim: tail experiments require dimension 1");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col_of(text, e.byte);
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << col;
    throw ConfigError(os.str());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(j, "config",
             {"experiment", "graphon", "mode", "drift", "initial", "numerics",
              "seed", "threads", "output"});

  ExperimentConfig cfg;
  cfg.kind = experiment_kind_of(require<std::string>(j, "config", "experiment"));
  if (j.contains("graphon")) cfg.graphon = parse_graphon(j["graphon"], "graphon");
  const std::string mode = get_or<std::string>(j, "config", "mode", "deterministic");
  if (mode == "deterministic")
    cfg.mode = SampleMode::deterministic;
  else if (mode == "bernoulli")
    cfg.mode = SampleMode::bernoulli;
  else
    throw ConfigError("mode: must be 'deterministic' or 'bernoulli'");
  if (j.contains("drift")) cfg.drift = parse_drift(j["drift"], "drift");
  if (j.contains("initial"))
    cfg.initial = parse_initial(j["initial"], "initial", cfg.drift.dim);
  else
    cfg.initial = InitialLawFamily::gaussian({0.0, 1.0}, {{1.0}}, {{0.0}}, 1.0,
                                             0.2, cfg.drift.dim);
  if (j.contains("numerics")) cfg.numerics = parse_numerics(j["numerics"], "numerics");
  cfg.seed = get_or<std::uint64_t>(j, "config", "seed", 0);
  cfg.threads = get_or<int>(j, "config", "threads", 0);
  cfg.output_dir = get_or<std::string>(j, "config", "output", "out");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.kind);
  j["graphon"] = graphon_json(cfg.graphon);
  j["mode"] = cfg.mode == SampleMode::deterministic ? "deterministic" : "bernoulli";
  j["drift"] = drift_json(cfg.drift);
  j["initial"] = initial_json(cfg.initial);
  j["numerics"] = numerics_json(cfg.numerics);
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["output"] = cfg.output_dir;
  return j.dump(2);
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a(serialize_config(cfg));
}

std::uint64_t graphon_spec_hash(const Graphon& g) {
  return fnv1a(graphon_json(g).dump());
}

}  // namespace gps
