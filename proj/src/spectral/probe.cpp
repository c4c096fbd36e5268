#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "sslab/csv.hpp"
#include "sslab/linalg/fit.hpp"
#include "sslab/spectral.hpp"

namespace sslab {

std::size_t probe_resolution(const ValidatedParams& p, double w_max) {
  if (!(w_max > 0.0)) throw PreconditionViolation("probe_resolution needs w_max > 0");
  const double ell = std::max(p->ell1, p->ell2);
  return static_cast<std::size_t>(std::ceil(20.0 * w_max * ell / std::numbers::pi));
}

GainRow probe_gain(const BlockGenerator& g, double w) {
  if (g.kind() != SystemKind::ElasticStringThermoBeam) {
    throw PreconditionViolation("the lack-of-exponential-stability probe applies to the thermo-beam system");
  }
  const std::size_t need = probe_resolution(g.params(), w);
  const std::size_t have = std::min(g.grids().string.n, g.grids().beam.n);
  if (have < need) {
    throw UnderResolved("w = " + format_double(w) + " needs " + std::to_string(need) + " cells per component, grid has " +
                        std::to_string(have));
  }
  const double alpha1 = g.params()->alpha1;
  const double k = w / std::sqrt(alpha1);
  StateVector<double> f(g.layout());
  set_force_block(g, f, [&](double x) { return -alpha1 * std::sin(k * x); }, nullptr);

  const std::vector<double> fi = g.to_internal(f);
  std::vector<cplx> y(fi.begin(), fi.end());
  const double nf = g.gram().norm(std::span<const cplx>(y));

  // The beam rows carry h^-4 entries; row and column equilibration keeps the
  // forward error of the banded solve usable up to several thousand cells.
  linalg::BandedMatrix<cplx> t = g.op().cast<cplx>();
  const std::size_t n = t.size();
  auto row_range = [&](std::size_t i) {
    return std::pair{i > t.kl() ? i - t.kl() : 0, std::min(n - 1, i + t.ku())};
  };
  std::vector<double> rs(n), cs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [j0, j1] = row_range(i);
    double m = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) {
      t.at(i, j) = -t(i, j);
      if (i == j) t.at(i, i) += cplx(0.0, w);
      m = std::max(m, std::abs(t(i, j)));
    }
    rs[i] = m > 0.0 ? 1.0 / m : 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [j0, j1] = row_range(i);
    for (std::size_t j = j0; j <= j1; ++j) cs[j] = std::max(cs[j], rs[i] * std::abs(t(i, j)));
  }
  for (double& c : cs) c = c > 0.0 ? 1.0 / c : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [j0, j1] = row_range(i);
    for (std::size_t j = j0; j <= j1; ++j) t.at(i, j) *= rs[i] * cs[j];
    y[i] *= rs[i];
  }
  linalg::LUFactors<cplx> lu;
  try {
    lu = linalg::lu_factor(t);
  } catch (const SingularMatrix&) {
    throw NearSingularShift("i w is an eigenvalue to working precision at w = " + format_double(w));
  }
  lu.solve_in_place<cplx>(y);
  for (std::size_t i = 0; i < n; ++i) y[i] *= cs[i];
  return GainRow{w, g.gram().norm(std::span<const cplx>(y)) / nf};
}

ResolvedGain resolved_probe_gain(const ValidatedParams& p, double w, double rel_tol, std::size_t max_cells) {
  std::size_t n = std::max<std::size_t>(probe_resolution(p, w), 64);
  double previous = -1.0;
  for (; n <= max_cells; n *= 2) {
    const BlockGenerator g = assemble_generator(p, SystemKind::ElasticStringThermoBeam, build_grids(p, n, n));
    const double gain = probe_gain(g, w).gain;
    if (previous > 0.0 && std::abs(gain - previous) <= rel_tol * gain) return ResolvedGain{w, gain, n};
    previous = gain;
  }
  throw UnderResolved("probe gain at w = " + format_double(w) + " not converged within " + std::to_string(max_cells) +
                      " cells");
}

LackExpResult lack_exp_probe_at(const ValidatedParams& p, const std::vector<double>& frequencies,
                                double alpha_exponent, std::size_t n) {
  if (frequencies.empty()) throw PreconditionViolation("lack_exp_probe needs at least one frequency");
  const double w_max = *std::max_element(frequencies.begin(), frequencies.end());
  const std::size_t need = probe_resolution(p, w_max);
  if (n == 0) n = std::max<std::size_t>(need, 64);
  if (n < need) {
    throw UnderResolved("w_max = " + format_double(w_max) + " needs n >= " + std::to_string(need) + ", got " +
                        std::to_string(n));
  }
  const BlockGenerator g = assemble_generator(p, SystemKind::ElasticStringThermoBeam, build_grids(p, n, n));
  LackExpResult out;
  out.n = n;
  std::vector<double> lx, ly;
  for (double w : frequencies) {
    GainRow row = probe_gain(g, w);
    row.gain /= std::pow(w, alpha_exponent);
    out.rows.push_back(row);
    lx.push_back(std::log(w));
    ly.push_back(std::log(row.gain));
  }
  if (out.rows.size() >= 2) {
    const auto lf = linalg::fit_line(lx, ly);
    out.exponent = lf.slope;
    out.r_squared = lf.r_squared;
  }
  return out;
}

LackExpResult lack_exp_probe(const ValidatedParams& p, std::size_t count, double alpha_exponent, std::size_t n,
                             ShiftRule rule) {
  const FrequencySequence seq = resonant_frequencies(p, count, rule);
  LackExpResult out = lack_exp_probe_at(p, seq.w, alpha_exponent, n);
  out.rational_target = seq.rational_target;
  return out;
}

LackExpResult lack_exp_probe_converged(const ValidatedParams& p, std::size_t count, double alpha_exponent,
                                       ShiftRule rule, double rel_tol, std::size_t max_cells) {
  const FrequencySequence seq = resonant_frequencies(p, count, rule);
  LackExpResult out;
  out.rational_target = seq.rational_target;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < seq.w.size(); ++i) {
    ResolvedGain rg;
    try {
      rg = resolved_probe_gain(p, seq.w[i], rel_tol, max_cells);
    } catch (const UnderResolved&) {
      out.unresolved = seq.w.size() - i;
      break;
    }
    const double gain = rg.gain / std::pow(rg.w, alpha_exponent);
    out.rows.push_back(GainRow{rg.w, gain});
    out.cells.push_back(rg.n);
    out.n = std::max(out.n, rg.n);
    lx.push_back(std::log(rg.w));
    ly.push_back(std::log(gain));
  }
  if (out.rows.size() < 2) {
    throw UnderResolved("fewer than two sequence frequencies have a converged probe gain within " +
                        std::to_string(max_cells) + " cells");
  }
  const auto lf = linalg::fit_line(lx, ly);
  out.exponent = lf.slope;
  out.r_squared = lf.r_squared;
  return out;
}

void write_gains_csv(const LackExpResult& result, std::ostream& out) {
  out << "w,gain\n";
  for (const auto& r : result.rows) out << format_double(r.w) << ',' << format_double(r.gain) << '\n';
}

}  // namespace sslab
