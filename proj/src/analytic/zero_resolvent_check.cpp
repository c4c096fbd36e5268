#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "sslab/analytic.hpp"
#include "sslab/csv.hpp"
#include "sslab/discretization.hpp"
#include "sslab/errors.hpp"
#include "sslab/linalg/fit.hpp"

namespace sslab {

namespace {

double block_error(std::span<const double> discrete, const std::function<double(std::size_t)>& exact) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < discrete.size(); ++i) {
    const double e = exact(i);
    diff = std::max(diff, std::abs(discrete[i] - e));
    scale = std::max(scale, std::abs(e));
  }
  return scale > 0.0 ? diff / scale : diff;
}

std::function<double(double)> cosine_sum(std::mt19937_64& rng, double ell) {
  std::normal_distribution<double> nd;
  std::array<double, 4> a;
  for (double& v : a) v = nd(rng);
  return [a, ell](double x) {
    double s = a[0];
    for (int k = 1; k < 4; ++k) s += a[k] * std::cos(k * std::numbers::pi * x / ell);
    return s;
  };
}

}  // namespace

ZeroResolventData random_smooth_forcing(const ValidatedParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const double l1 = p->ell1, l2 = p->ell2;
  ZeroResolventData f;
  f.g1 = cosine_sum(rng, l1);
  f.g2 = cosine_sum(rng, l2);
  f.h1 = cosine_sum(rng, l1);
  f.d1 = cosine_sum(rng, l1);
  const double c = nd(rng), e1 = nd(rng), e2 = nd(rng);
  const double pi = std::numbers::pi;
  f.f1 = [=](double x) { return c * std::cos(0.5 * pi * x / l1) + e1 * std::sin(pi * x / l1); };
  f.f2 = [=](double x) {
    const double s = std::sin(pi * x / l2);
    return c * std::cos(0.5 * pi * x / l2) + e2 * s * s;
  };
  return f;
}

ZeroResolventConvergence zero_resolvent_convergence(const ValidatedParams& p, const ZeroResolventData& f,
                                                    const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) throw PreconditionViolation("zero_resolvent_convergence needs at least one grid");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (!(n_list[i] > n_list[i - 1])) throw PreconditionViolation("grid sizes must increase");
  }
  const ZeroResolventSolution sol = zero_resolvent_s1(p, f);
  constexpr SystemKind kind = SystemKind::ThermoStringElasticBeam;

  ZeroResolventConvergence out;
  std::vector<double> lh, le;
  for (std::size_t n : n_list) {
    const Grids grids = build_grids(p, n, n);
    const BlockGenerator g = assemble_generator(p, kind, grids);
    FieldFunctions ff;
    ff.u1 = f.f1;
    ff.u2 = f.f2;
    ff.theta = f.h1;
    ff.q = f.d1;
    StateVector<double> rhs = sample_state(g, ff);
    set_force_block(g, rhs, f.g1, f.g2);
    const StateVector<double> y = solve_generator(g, rhs);

    const Grid1D& s = grids.string;
    const Grid1D& b = grids.beam;
    double err = 0.0;
    err = std::max(err, block_error(y.block(Block::U1), [&](std::size_t i) { return sol.u1(s.node(i)); }));
    err = std::max(err, block_error(y.block(Block::U2), [&](std::size_t j) { return sol.u2(b.node(j + 1)); }));
    err = std::max(err, block_error(y.block(Block::Theta), [&](std::size_t m) { return sol.theta1(s.node(m + 1)); }));
    err = std::max(err, block_error(y.block(Block::Q), [&](std::size_t i) { return sol.q1(s.dual(i)); }));
    out.rows.push_back(ZeroResolventRow{n, std::max(s.h, b.h), err});
    if (err > 0.0) {
      lh.push_back(std::log(out.rows.back().h));
      le.push_back(std::log(err));
    }
  }
  if (lh.size() >= 2) out.order = linalg::fit_line(lh, le).slope;
  return out;
}

void write_convergence_csv(const ZeroResolventConvergence& c, std::ostream& out) {
  out << "n,h,error\n";
  for (const auto& r : c.rows) out << r.n << ',' << format_double(r.h) << ',' << format_double(r.error) << '\n';
}

}  // namespace sslab
