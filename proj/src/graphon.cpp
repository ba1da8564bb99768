#include "gps/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gps/util.hpp"

namespace gps {

namespace {

void check_boundaries(const std::vector<double>& b) {
  if (b.size() < 2 || b.front() != 0.0 || b.back() != 1.0)
    throw std::invalid_argument("block boundaries must run from 0 to 1");
  for (std::size_t i = 1; i < b.size(); ++i)
    if (!(b[i] > b[i - 1]))
      throw std::invalid_argument("block boundaries must be strictly increasing");
}

}  // namespace

Graphon Graphon::constant(double c) {
  if (c < 0.0 || c > 1.0) throw std::invalid_argument("constant graphon outside [0,1]");
  Graphon g;
  g.kind_ = Kind::constant;
  g.constant_ = c;
  g.lipschitz_ = 0.0;
  return g;
}

Graphon Graphon::product() {
  Graphon g;
  g.kind_ = Kind::product;
  g.lipschitz_ = 1.0;
  return g;
}

Graphon Graphon::min() {
  Graphon g;
  g.kind_ = Kind::min;
  g.lipschitz_ = 1.0;
  return g;
}

Graphon Graphon::block_constant(std::vector<double> boundaries,
                                std::vector<std::vector<double>> values) {
  check_boundaries(boundaries);
  const std::size_t nb = boundaries.size() - 1;
  if (values.size() != nb)
    throw std::invalid_argument("block value matrix does not match boundaries");
  for (const auto& row : values) {
    if (row.size() != nb)
      throw std::invalid_argument("block value matrix is not square");
    for (double v : row)
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("block value outside [0,1]");
  }
  Graphon g;
  g.kind_ = Kind::block_constant;
  g.boundaries_ = std::move(boundaries);
  g.values_ = std::move(values);
  g.lipschitz_ = 0.0;
  return g;
}

Graphon Graphon::block_affine(std::vector<double> boundaries,
                              std::vector<std::vector<Affine>> coeffs) {
  check_boundaries(boundaries);
  const std::size_t nb = boundaries.size() - 1;
  if (coeffs.size() != nb)
    throw std::invalid_argument("affine coefficient matrix does not match boundaries");
  double lip = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    if (coeffs[i].size() != nb)
      throw std::invalid_argument("affine coefficient matrix is not square");
    for (std::size_t j = 0; j < nb; ++j) {
      const Affine& a = coeffs[i][j];
      // affine on a rectangle attains its extremes at the corners
      for (double u : {boundaries[i], boundaries[i + 1]})
        for (double v : {boundaries[j], boundaries[j + 1]}) {
          const double val = a.a + a.b * u + a.c * v;
          if (val < -1e-12 || val > 1.0 + 1e-12)
            throw std::invalid_argument("block-affine graphon leaves [0,1]");
        }
      lip = std::max(lip, std::max(std::abs(a.b), std::abs(a.c)));
    }
  }
  Graphon g;
  g.kind_ = Kind::block_affine;
  g.boundaries_ = std::move(boundaries);
  g.affine_ = std::move(coeffs);
  g.lipschitz_ = lip;
  return g;
}

int Graphon::block_of(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("graphon argument outside [0,1]");
  // half-open blocks [a_i, a_{i+1}), last block closed
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), u);
  int idx = static_cast<int>(it - boundaries_.begin()) - 1;
  return std::min(idx, block_count() - 1);
}

std::string Graphon::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant: os << "constant(" << constant_ << ")"; break;
    case Kind::product: os << "product"; break;
    case Kind::min: os << "min"; break;
    case Kind::block_constant: os << "block_constant[" << block_count() << "]"; break;
    case Kind::block_affine: os << "block_affine[" << block_count() << "]"; break;
  }
  return os.str();
}

double eval(const Graphon& g, double u, double v) {
  if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0))
    throw std::domain_error("graphon argument outside [0,1]");
  switch (g.kind_) {
    case Graphon::Kind::constant: return g.constant_;
    case Graphon::Kind::product: return u * v;
    case Graphon::Kind::min: return std::min(u, v);
    case Graphon::Kind::block_constant:
      return g.values_[g.block_of(u)][g.block_of(v)];
    case Graphon::Kind::block_affine: {
      const Graphon::Affine& a = g.affine_[g.block_of(u)][g.block_of(v)];
      return std::clamp(a.a + a.b * u + a.c * v, 0.0, 1.0);
    }
  }
  throw std::logic_error("unreachable graphon kind");
}

double degree(const Graphon& g, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("graphon argument outside [0,1]");
  switch (g.kind_) {
    case Graphon::Kind::constant: return g.constant_;
    case Graphon::Kind::product: return u * 0.5;
    case Graphon::Kind::min: return u - 0.5 * u * u;
    case Graphon::Kind::block_constant: {
      const int bi = g.block_of(u);
      double s = 0.0;
      for (int bj = 0; bj < g.block_count(); ++bj)
        s += g.values_[bi][bj] * (g.boundaries_[bj + 1] - g.boundaries_[bj]);
      return s;
    }
    case Graphon::Kind::block_affine: {
      // composite quadrature per block, abs error well below 1e-10
      double s = 0.0;
      for (int bj = 0; bj < g.block_count(); ++bj) {
        const double lo = g.boundaries_[bj], hi = g.boundaries_[bj + 1];
        s += integrate([&](double v) { return eval(g, u, v); }, lo, hi, 1e-12);
      }
      return s;
    }
  }
  throw std::logic_error("unreachable graphon kind");
}

double check_block_lipschitz(const Graphon& g, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  double worst = 0.0;
  const int nb = g.block_count();
  const std::vector<double>& bd = g.boundaries();
  for (int bi = 0; bi < nb; ++bi) {
    for (int bj = 0; bj < nb; ++bj) {
      const double ulo = bd[bi], uhi = bd[bi + 1];
      const double vlo = bd[bj], vhi = bd[bj + 1];
      // blocks are half-open [a,b) except at u = 1
      std::vector<double> us, vs;
      for (double u = ulo; u < uhi; u += grid_step) us.push_back(u);
      if (bi == nb - 1) us.push_back(uhi);
      for (double v = vlo; v < vhi; v += grid_step) vs.push_back(v);
      if (bj == nb - 1) vs.push_back(vhi);
      std::vector<double> vals(us.size() * vs.size());
      for (std::size_t a = 0; a < us.size(); ++a)
        for (std::size_t b = 0; b < vs.size(); ++b)
          vals[a * vs.size() + b] = eval(g, us[a], vs[b]);
      for (std::size_t a1 = 0; a1 < us.size(); ++a1)
        for (std::size_t b1 = 0; b1 < vs.size(); ++b1)
          for (std::size_t a2 = a1; a2 < us.size(); ++a2)
            for (std::size_t b2 = 0; b2 < vs.size(); ++b2) {
              const double den =
                  std::abs(us[a1] - us[a2]) + std::abs(vs[b1] - vs[b2]);
              if (den < 1e-15) continue;
              const double num =
                  std::abs(vals[a1 * vs.size() + b1] - vals[a2 * vs.size() + b2]);
              worst = std::max(worst, num / den);
            }
    }
  }
  return worst;
}

InteractionMatrix::InteractionMatrix(Graphon g, int n, SampleMode mode,
                                     std::uint64_t seed, bool undirected)
    : g_(std::move(g)), n_(n), mode_(mode), seed_(seed), undirected_(undirected),
      xi_key_(rng::master(seed).with(rng::stream_xi)) {
  if (n < 1) throw std::invalid_argument("interaction matrix needs n >= 1");
}

double InteractionMatrix::entry(int i, int j) const {
  const double gij = eval(g_, u_of_index(i, n_), u_of_index(j, n_));
  if (mode_ == SampleMode::deterministic) return gij;
  int a = i, b = j;
  if (undirected_ && a > b) std::swap(a, b);
  const double u = rng::uniform01(xi_key_.with(static_cast<std::uint64_t>(a))
                                      .with(static_cast<std::uint64_t>(b)));
  return u < gij ? 1.0 : 0.0;
}

std::vector<double> InteractionMatrix::dense() const {
  std::vector<double> out(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      out[static_cast<std::size_t>(i) * n_ + j] = entry(i, j);
  return out;
}

double InteractionMatrix::row_mean(int i) const {
  std::vector<double> row(n_);
  for (int j = 0; j < n_; ++j) row[j] = entry(i, j);
  return pairwise_sum(row) / n_;
}

InteractionMatrix sample_interaction(const Graphon& g, int n, SampleMode mode,
                                     std::uint64_t seed) {
  return InteractionMatrix(g, n, mode, seed);
}

}  // namespace gps
