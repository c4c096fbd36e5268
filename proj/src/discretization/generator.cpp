#include <algorithm>
#include <cmath>
#include <map>

#include "sslab/discretization.hpp"

namespace sslab {

namespace {

// Sparse accumulator in block-ordered indices.
class Triplets {
 public:
  void add(std::size_t r, std::size_t c, double v) {
    if (v != 0.0) entries_[{r, c}] += v;
  }
  const std::map<std::pair<std::size_t, std::size_t>, double>& entries() const { return entries_; }

 private:
  std::map<std::pair<std::size_t, std::size_t>, double> entries_;
};

linalg::BandedMatrix<double> to_banded(const Triplets& t, const std::vector<std::size_t>& perm, std::size_t n) {
  std::size_t kl = 0, ku = 0;
  for (const auto& [rc, v] : t.entries()) {
    const std::size_t i = perm[rc.first], j = perm[rc.second];
    if (i > j) kl = std::max(kl, i - j);
    else ku = std::max(ku, j - i);
  }
  linalg::BandedMatrix<double> m(n, kl, ku);
  for (const auto& [rc, v] : t.entries()) m.add(perm[rc.first], perm[rc.second], v);
  return m;
}

struct Pattern {
  // Displacement DOF k lives in the u1/v1 block for k < n1, else u2/v2.
  std::size_t n1, n2;
  const StateLayout* layout;

  std::size_t u(std::size_t k) const {
    return k < n1 ? layout->offset(Block::U1) + k : layout->offset(Block::U2) + (k - n1);
  }
  std::size_t v(std::size_t k) const {
    return k < n1 ? layout->offset(Block::V1) + k : layout->offset(Block::V2) + (k - n1);
  }
  std::size_t beam_dof(std::size_t j) const { return j == 0 ? 0 : n1 - 1 + j; }
  std::size_t station(std::size_t k) const { return k < n1 ? n1 - 1 - k : k; }
};

}  // namespace

std::vector<double> Grid1D::primal_nodes() const {
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = node(i);
  x[n] = ell;
  return x;
}

std::vector<double> Grid1D::dual_nodes() const {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = dual(i);
  return x;
}

Grids build_grids(const ValidatedParams& p, std::size_t n1, std::size_t n2) {
  if (n1 < 4 || n2 < 4) {
    throw GridTooCoarse("need at least 4 cells per component, got n1=" + std::to_string(n1) +
                        ", n2=" + std::to_string(n2));
  }
  Grids g;
  g.string = Grid1D{n1, p->ell1, p->ell1 / static_cast<double>(n1)};
  g.beam = Grid1D{n2, p->ell2, p->ell2 / static_cast<double>(n2)};
  return g;
}

StateLayout::StateLayout(SystemKind kind, std::size_t n1, std::size_t n2, bool with_heat)
    : kind_(kind), heat_(with_heat), n1_(n1), n2_(n2) {
  const std::size_t nh = kind == SystemKind::ThermoStringElasticBeam ? n1 : n2;
  auto set = [&](Block b, std::size_t c) { count_[static_cast<int>(b)] = c; };
  set(Block::U1, n1);
  set(Block::V1, n1);
  set(Block::U2, n2 - 1);
  set(Block::V2, n2 - 1);
  set(Block::Theta, with_heat ? nh - 1 : 0);
  set(Block::Q, with_heat ? nh : 0);
  const Block s1[] = {Block::U1, Block::V1, Block::Theta, Block::Q, Block::U2, Block::V2};
  const Block s2[] = {Block::U1, Block::V1, Block::U2, Block::V2, Block::Theta, Block::Q};
  const Block* order = kind == SystemKind::ThermoStringElasticBeam ? s1 : s2;
  std::size_t off = 0;
  for (int i = 0; i < 6; ++i) {
    offset_[static_cast<int>(order[i])] = off;
    off += count_[static_cast<int>(order[i])];
  }
  size_ = off;
}

BlockGenerator assemble(const ValidatedParams& p, SystemKind kind, const Grids& grids, bool with_heat) {
  const std::size_t n1 = grids.string.n, n2 = grids.beam.n;
  if (n1 < 4 || n2 < 4) throw AssemblyError("grids are not built for this system");
  if (std::abs(grids.string.h * static_cast<double>(n1) - p->ell1) > 1e-12 * p->ell1 ||
      std::abs(grids.beam.h * static_cast<double>(n2) - p->ell2) > 1e-12 * p->ell2) {
    throw AssemblyError("grid lengths do not match the material lengths");
  }
  const double h1 = grids.string.h, h2 = grids.beam.h;
  const WeightSet ws = energy_weights(p, kind);
  const bool heat_on_string = kind == SystemKind::ThermoStringElasticBeam;
  const auto hc = p.heat(kind);

  BlockGenerator g(p);
  g.layout_ = StateLayout(kind, n1, n2, with_heat);
  g.grids_ = grids;
  const StateLayout& L = g.layout_;
  const Pattern P{n1, n2, &L};
  const std::size_t nu = L.displacement_dofs();
  const double hh = heat_on_string ? h1 : h2;
  const std::size_t nt = L.count(Block::Theta), nq = L.count(Block::Q);
  const std::size_t ot = L.offset(Block::Theta), oq = L.offset(Block::Q);

  // Heated node (primal index on the heated component) -> displacement DOF.
  auto heated_dof = [&](std::size_t i) { return heat_on_string ? i : P.beam_dof(i); };

  // Interleaved ordering: walk stations, emitting u, v, theta, q at each.
  {
    std::vector<std::vector<std::size_t>> at_station(nu);
    for (std::size_t k = 0; k < nu; ++k) {
      at_station[P.station(k)].push_back(P.u(k));
      at_station[P.station(k)].push_back(P.v(k));
    }
    for (std::size_t m = 0; m < nt; ++m) at_station[P.station(heated_dof(m + 1))].push_back(ot + m);
    for (std::size_t i = 0; i < nq; ++i) at_station[P.station(heated_dof(i))].push_back(oq + i);
    g.perm_.assign(L.size(), 0);
    std::size_t next = 0;
    for (const auto& st : at_station)
      for (std::size_t b : st) g.perm_[b] = next++;
    if (next != L.size()) throw AssemblyError("station map does not cover the state");
  }

  // ---- elastic stiffness S (on displacement DOFs) ----
  std::map<std::pair<std::size_t, std::size_t>, double> stiff;
  for (std::size_t i = 0; i < n1; ++i) {
    // string strain on dual node i+1/2; u1(l1) = 0
    std::vector<std::pair<std::size_t, double>> row = {{i, -1.0 / h1}};
    if (i + 1 < n1) row.push_back({i + 1, 1.0 / h1});
    for (auto [a, ca] : row)
      for (auto [b, cb] : row) stiff[{a, b}] += ws.string_strain * h1 * ca * cb;
  }
  auto curvature_row = [&](std::size_t j) {
    // (u_{j-1} - 2u_j + u_{j+1}) / h^2 with ghost u_{-1} = u_1 and u_{n2} = 0
    std::map<std::size_t, double> row;
    const double c = 1.0 / (h2 * h2);
    row[P.beam_dof(j)] += -2.0 * c;
    row[P.beam_dof(j == 0 ? 1 : j - 1)] += c;
    if (j + 1 < n2) row[P.beam_dof(j + 1)] += c;
    return row;
  };
  for (std::size_t j = 0; j < n2; ++j) {
    const double wj = j == 0 ? h2 / 2 : h2;
    const auto row = curvature_row(j);
    for (auto [a, ca] : row)
      for (auto [b, cb] : row) stiff[{a, b}] += ws.beam_curvature * wj * ca * cb;
  }

  // lumped velocity mass
  std::vector<double> mv(nu, 0.0);
  for (std::size_t i = 0; i < n1; ++i) mv[i] += ws.string_velocity * (i == 0 ? h1 / 2 : h1);
  for (std::size_t j = 0; j < n2; ++j) mv[P.beam_dof(j)] += ws.beam_velocity * (j == 0 ? h2 / 2 : h2);

  Triplets a, gram;
  for (std::size_t k = 0; k < nu; ++k) {
    a.add(P.u(k), P.v(k), 1.0);
    gram.add(P.v(k), P.v(k), mv[k]);
  }
  for (const auto& [kl, s] : stiff) {
    a.add(P.v(kl.first), P.u(kl.second), -s / mv[kl.first]);
    gram.add(P.u(kl.first), P.u(kl.second), s);
  }

  if (with_heat) {
    const double delta = hc.delta, gamma = hc.gamma, kappa = hc.kappa, tau = hc.tau;
    const double wt = hh;  // theta quadrature weight (interior nodes)
    // coupling X: theta rows -> velocity DOFs; C = (W_theta X)^T
    for (std::size_t m = 0; m < nt; ++m) {
      const std::size_t i = m + 1;
      std::map<std::size_t, double> x;
      if (heat_on_string) {
        if (i + 1 < n1) x[i + 1] += 1.0 / (2 * hh);
        x[i - 1] -= 1.0 / (2 * hh);
      } else {
        x = curvature_row(i);
      }
      for (auto [k, c] : x) {
        a.add(P.v(k), ot + m, delta * wt * c / mv[k]);
        a.add(ot + m, P.v(k), -delta * c);
      }
    }
    // heat gradient dual <- primal with theta = 0 at both ends
    for (std::size_t i = 0; i < nq; ++i) {
      std::vector<std::pair<std::size_t, double>> grad;
      if (i >= 1) grad.push_back({i - 1, -1.0 / hh});
      if (i < nt) grad.push_back({i, 1.0 / hh});
      for (auto [m, c] : grad) {
        a.add(oq + i, ot + m, -(kappa / tau) * c);
        a.add(ot + m, oq + i, gamma * c * hh / wt);
      }
      a.add(oq + i, oq + i, -1.0 / tau);
      gram.add(oq + i, oq + i, ws.flux * hh);
    }
    for (std::size_t m = 0; m < nt; ++m) gram.add(ot + m, ot + m, ws.theta * wt);
    g.gamma_over_kappa_ = gamma / kappa;
    g.q_weights_.assign(nq, hh);
  }

  g.a_ = to_banded(a, g.perm_, L.size());
  try {
    g.gram_ = linalg::WeightMatrix(to_banded(gram, g.perm_, L.size()));
  } catch (const SingularMatrix& e) {
    throw AssemblyError(std::string("energy Gram matrix is singular: ") + e.what());
  }
  return g;
}

BlockGenerator assemble_generator(const ValidatedParams& p, SystemKind kind, const Grids& grids) {
  return assemble(p, kind, grids, true);
}

BlockGenerator assemble_conservative_core(const ValidatedParams& p, SystemKind kind, const Grids& grids) {
  return assemble(p, kind, grids, false);
}

double energy(const BlockGenerator& g, const StateVector<double>& y) {
  const auto x = g.to_internal(y);
  return 0.5 * g.gram().inner(std::span<const double>(x), std::span<const double>(x));
}

double energy(const BlockGenerator& g, const StateVector<cplx>& y) {
  const auto x = g.to_internal(y);
  return 0.5 * g.gram().inner(std::span<const cplx>(x), std::span<const cplx>(x)).real();
}

namespace {
template <class T>
double dissipation_impl(const BlockGenerator& g, const StateVector<T>& y) {
  g.check(y.layout());
  const auto q = y.block(Block::Q);
  const auto w = g.q_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += w[i] * std::norm(q[i]);
  return g.gamma_over_kappa() * s;
}
}  // namespace

double dissipation(const BlockGenerator& g, const StateVector<double>& y) { return dissipation_impl(g, y); }
double dissipation(const BlockGenerator& g, const StateVector<cplx>& y) { return dissipation_impl(g, y); }

double energy_inner(const BlockGenerator& g, const StateVector<double>& x, const StateVector<double>& y) {
  const auto xi = g.to_internal(x), yi = g.to_internal(y);
  return g.gram().inner(std::span<const double>(xi), std::span<const double>(yi));
}

cplx energy_inner(const BlockGenerator& g, const StateVector<cplx>& x, const StateVector<cplx>& y) {
  const auto xi = g.to_internal(x), yi = g.to_internal(y);
  return g.gram().inner(std::span<const cplx>(xi), std::span<const cplx>(yi));
}

StateVector<double> solve_generator(const BlockGenerator& g, const StateVector<double>& f) {
  std::vector<double> x = g.to_internal(f);
  const auto lu = linalg::lu_factor(g.op());
  lu.solve_in_place<double>(x);
  return g.from_internal<double>(x);
}

DofLocation displacement_location(const BlockGenerator& g, std::size_t k) {
  const std::size_t n1 = g.layout().n1();
  if (k >= g.layout().displacement_dofs()) throw DimensionMismatch("displacement DOF out of range");
  if (k < n1) return {true, g.grids().string.node(k)};
  return {false, g.grids().beam.node(k - n1 + 1)};
}

StateVector<double> sample_state(const BlockGenerator& g, const FieldFunctions& f) {
  const StateLayout& L = g.layout();
  StateVector<double> y(L);
  const Grid1D& s = g.grids().string;
  const Grid1D& b = g.grids().beam;
  auto fill = [](std::span<double> out, const std::function<double(double)>& fn, auto xs) {
    if (!fn) return;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(xs(i));
  };
  fill(y.block(Block::U1), f.u1, [&](std::size_t i) { return s.node(i); });
  fill(y.block(Block::V1), f.v1, [&](std::size_t i) { return s.node(i); });
  fill(y.block(Block::U2), f.u2, [&](std::size_t j) { return b.node(j + 1); });
  fill(y.block(Block::V2), f.v2, [&](std::size_t j) { return b.node(j + 1); });
  const Grid1D& hg = L.kind() == SystemKind::ThermoStringElasticBeam ? s : b;
  fill(y.block(Block::Theta), f.theta, [&](std::size_t m) { return hg.node(m + 1); });
  fill(y.block(Block::Q), f.q, [&](std::size_t i) { return hg.dual(i); });
  return y;
}

void set_force_block(const BlockGenerator& g, StateVector<double>& f, const std::function<double(double)>& g1,
                     const std::function<double(double)>& g2) {
  g.check(f.layout());
  const Grid1D& s = g.grids().string;
  const Grid1D& b = g.grids().beam;
  const WeightSet ws = energy_weights(g.params(), g.kind());
  auto v1 = f.block(Block::V1);
  auto v2 = f.block(Block::V2);
  for (std::size_t i = 1; i < v1.size(); ++i) v1[i] = g1 ? g1(s.node(i)) : 0.0;
  for (std::size_t j = 0; j < v2.size(); ++j) v2[j] = g2 ? g2(b.node(j + 1)) : 0.0;
  const double m1 = ws.string_velocity * s.h / 2, m2 = ws.beam_velocity * b.h / 2;
  v1[0] = (m1 * (g1 ? g1(0.0) : 0.0) + m2 * (g2 ? g2(0.0) : 0.0)) / (m1 + m2);
}

}  // namespace sslab
