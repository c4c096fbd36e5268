#include <algorithm>
#include <utility>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "sslab/csv.hpp"
#include "sslab/linalg/fit.hpp"
#include "sslab/parallel.hpp"
#include "sslab/spectral.hpp"

namespace sslab {

std::size_t resolved_string_cells(const ValidatedParams& p, std::size_t n, double beta_max,
                                  double points_per_wavelength) {
  if (!(beta_max > 0.0) || !(points_per_wavelength > 0.0)) {
    throw PreconditionViolation("resolved_string_cells needs beta_max > 0 and a positive density");
  }
  const double wavenumber = beta_max / std::sqrt(p->alpha1);
  const double cells = std::ceil(points_per_wavelength * wavenumber * p->ell1 / (2.0 * std::numbers::pi));
  return std::max(n, static_cast<std::size_t>(cells));
}

EigenBranch eigen_branch(const BlockGenerator& g, const std::vector<cplx>& shifts, std::size_t k_per_shift,
                         const BranchOptions& opt) {
  linalg::EigsOptions eo = opt.eigs;
  if (eo.operator_norm <= 0.0) eo.operator_norm = linalg::operator_norm_estimate(g.op(), g.gram());

  std::vector<std::vector<linalg::EigenPair>> found(shifts.size());
  parallel_for(shifts.size(), opt.threads, [&](std::size_t s) {
    try {
      found[s] = linalg::shift_invert_eigs(g.op(), g.gram(), shifts[s], k_per_shift, opt.tol, eo);
    } catch (const NoConvergence& e) {
      throw NoConvergence("shift " + format_double(shifts[s].real()) + "+" + format_double(shifts[s].imag()) +
                          "i: " + e.what());
    }
  });

  EigenBranch branch;
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    for (const auto& pair : found[s]) {
      const bool seen = std::any_of(branch.eigenvalues.begin(), branch.eigenvalues.end(), [&](const auto& e) {
        return std::abs(e.value - pair.value) < 1e-8 * std::abs(pair.value);
      });
      if (!seen) branch.eigenvalues.push_back({pair.value, pair.residual, shifts[s]});
    }
  }
  return branch;
}

BranchFit fit_branch_decay(const EigenBranch& branch) {
  // least damped eigenvalue per shift, in shift order
  std::vector<cplx> picked;
  for (std::size_t i = 0; i < branch.eigenvalues.size();) {
    std::size_t j = i;
    const BranchEigenvalue* best = nullptr;
    while (j < branch.eigenvalues.size() && branch.eigenvalues[j].shift == branch.eigenvalues[i].shift) {
      const auto& e = branch.eigenvalues[j];
      if (e.value.real() < 0.0 && std::abs(e.value.imag()) > 0.0 && (best == nullptr || e.value.real() > best->value.real())) {
        best = &e;
      }
      ++j;
    }
    if (best != nullptr) picked.push_back(best->value);
    i = j;
  }
  // The branch approaching the axis is the lower convex hull of
  // (log|Im|, log(-Re)); trailing edges that rise again are not part of it.
  std::vector<std::pair<double, double>> pts;
  for (const cplx& l : picked) pts.push_back({std::log(std::abs(l.imag())), std::log(-l.real())});
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    while (hull.size() >= 2) {
      const auto& o = pts[hull[hull.size() - 2]];
      const auto& a = pts[hull.back()];
      const auto& b = pts[idx];
      const double cross = (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
      if (cross < 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(idx);
  }
  while (hull.size() >= 2 && pts[hull.back()].second >= pts[hull[hull.size() - 2]].second) hull.pop_back();
  if (hull.size() < 3) {
    throw WindowTooSmall("branch fit needs at least 3 eigenvalues on the lower envelope, got " +
                         std::to_string(hull.size()));
  }
  std::vector<double> xs, ys;
  BranchFit fit;
  for (std::size_t idx : hull) {
    xs.push_back(pts[idx].first);
    ys.push_back(pts[idx].second);
    fit.used.push_back(picked[idx]);
  }
  const auto lf = linalg::fit_line(xs, ys);
  fit.exponent = -lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

std::vector<AbscissaRow> spectral_abscissa_study(const ValidatedParams& p, SystemKind kind,
                                                 const std::vector<std::size_t>& n_list, double sigma_max,
                                                 const AbscissaOptions& opt) {
  if (n_list.empty()) throw PreconditionViolation("abscissa study needs at least one grid");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw PreconditionViolation("abscissa study needs increasing n");
  }
  if (!(sigma_max > 0.0)) throw PreconditionViolation("abscissa study needs sigma_max > 0");
  const double spacing =
      opt.shift_spacing > 0.0 ? opt.shift_spacing : 0.5 * std::numbers::pi * std::sqrt(p->alpha1) / p->ell1;

  std::vector<AbscissaRow> rows;
  for (std::size_t n : n_list) {
    const Grids grids = build_grids(p, n, n);
    const BlockGenerator g =
        opt.conservative_core ? assemble_conservative_core(p, kind, grids) : assemble_generator(p, kind, grids);
    const double nyquist = 2.0 * std::sqrt(p->alpha1) * static_cast<double>(n) / p->ell1;
    AbscissaRow row;
    row.n = n;
    row.sigma_cut = std::min(sigma_max, opt.resolved_fraction * nyquist);
    std::vector<cplx> shifts;
    const std::size_t count = static_cast<std::size_t>(std::floor(row.sigma_cut / spacing)) + 1;
    // a small offset keeps the first shift off the real axis, where the
    // conservative core has its zero-frequency modes
    for (std::size_t i = 0; i < count; ++i) shifts.push_back(cplx(0.0, (static_cast<double>(i) + 0.5) * spacing));
    const EigenBranch b = eigen_branch(g, shifts, opt.k_per_shift, opt.branch);
    row.abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& e : b.eigenvalues) {
      if (std::abs(e.value.imag()) > row.sigma_cut) continue;
      ++row.eigenvalues;
      if (e.value.real() > row.abscissa) {
        row.abscissa = e.value.real();
        row.argmax = e.value;
      }
    }
    if (row.eigenvalues == 0) throw NoConvergence("no eigenvalue found below the resolved cutoff");
    rows.push_back(row);
  }
  return rows;
}

void write_eigs_csv(const EigenBranch& branch, std::ostream& out) {
  out << "re_lambda,im_lambda,residual\n";
  for (const auto& e : branch.eigenvalues) {
    out << format_double(e.value.real()) << ',' << format_double(e.value.imag()) << ',' << format_double(e.residual)
        << '\n';
  }
}

}  // namespace sslab
