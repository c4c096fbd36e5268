#include <algorithm>
#include <cmath>
#include <ostream>

#include "sslab/csv.hpp"
#include "sslab/linalg/fit.hpp"
#include "sslab/parallel.hpp"
#include "sslab/spectral.hpp"

namespace sslab {

namespace {

linalg::BandedMatrix<cplx> shifted_operator(const linalg::BandedMatrix<double>& a, double beta) {
  // i beta - A
  linalg::BandedMatrix<cplx> t(a.size(), a.kl(), a.ku());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::size_t i0 = j > a.ku() ? j - a.ku() : 0;
    const std::size_t i1 = std::min(a.size() - 1, j + a.kl());
    for (std::size_t i = i0; i <= i1; ++i) t.at(i, j) = -a(i, j);
  }
  for (std::size_t i = 0; i < a.size(); ++i) t.at(i, i) += cplx(0.0, beta);
  return t;
}

}  // namespace

ResolventValue resolvent_norm(const linalg::BandedMatrix<double>& a, const linalg::WeightMatrix& g, double beta,
                              const ResolventOptions& opt) {
  if (g.size() != a.size()) throw DimensionMismatch("resolvent_norm: weight and operator sizes differ");
  linalg::LUFactors<cplx> lu;
  try {
    lu = linalg::lu_factor(shifted_operator(a, beta));
  } catch (const SingularMatrix&) {
    throw NearSingularShift("i*" + format_double(beta) + " is an eigenvalue to working precision");
  }
  const auto est = linalg::smallest_singular_value(lu, g, opt.tol, opt.max_iter, linalg::seed_from(beta));
  const double scale = std::max(1.0, std::abs(beta));
  if (est.sigma_min < 1e-13 * scale) {
    throw NearSingularShift("sigma_min(i*" + format_double(beta) + " - A) = " + format_double(est.sigma_min) +
                            " signals an eigenvalue on the imaginary axis");
  }
  return {1.0 / est.sigma_min, est.iterations};
}

ResolventValue resolvent_norm(const BlockGenerator& g, double beta, const ResolventOptions& opt) {
  return resolvent_norm(g.op(), g.gram(), beta, opt);
}

ResolventScan resolvent_scan(const BlockGenerator& g, double beta_min, double beta_max, std::size_t count,
                             const ScanOptions& opt) {
  if (!(beta_min > 0.0) || !(beta_max > beta_min)) {
    throw PreconditionViolation("resolvent_scan needs 0 < beta_min < beta_max");
  }
  if (count == 0) throw PreconditionViolation("resolvent_scan needs at least one point");
  ResolventScan scan;
  scan.betas.resize(count);
  const double l0 = std::log(beta_min), l1 = std::log(beta_max);
  for (std::size_t i = 0; i < count; ++i) {
    scan.betas[i] = count == 1 ? beta_min : std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (count - 1));
  }
  if (count > 1) scan.betas.back() = beta_max;
  scan.norms.resize(count);
  scan.iterations.resize(count);
  parallel_for(count, opt.threads, [&](std::size_t i) {
    const auto r = resolvent_norm(g, scan.betas[i], opt.resolvent);
    scan.norms[i] = r.norm;
    scan.iterations[i] = r.iterations;
  });

  if (opt.refine_peaks && count >= 3) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < count; ++i) {
      if (scan.norms[i] >= scan.norms[i - 1] && scan.norms[i] >= scan.norms[i + 1]) peaks.push_back(i);
    }
    scan.peaks.resize(peaks.size());
    linalg::EigsOptions eo;
    if (opt.refine_eigs > 0) eo.operator_norm = linalg::operator_norm_estimate(g.op(), g.gram());
    parallel_for(peaks.size(), opt.threads, [&](std::size_t k) {
      const std::size_t i = peaks[k];
      double lo = scan.betas[i - 1], hi = scan.betas[i + 1];
      ScanPoint best{scan.betas[i], scan.norms[i], scan.iterations[i]};
      auto eval = [&](double b) {
        const auto r = resolvent_norm(g, b, opt.resolvent);
        if (r.norm > best.r) best = ScanPoint{b, r.norm, r.iterations};
        return r.norm;
      };
      // A coarse bracket can hold many resonances far narrower than the
      // sampling step. Locate the least damped eigenvalue in the bracket and
      // search only around its imaginary part.
      if (opt.refine_eigs > 0) {
        try {
          // only a location is needed here, so the backward-error target is loose
          const auto pairs =
              linalg::shift_invert_eigs(g.op(), g.gram(), cplx(0.0, scan.betas[i]), opt.refine_eigs, 1e-7, eo);
          const linalg::EigenPair* pick = nullptr;
          for (const auto& e : pairs) {
            if (e.value.imag() < lo || e.value.imag() > hi) continue;
            if (pick == nullptr || e.value.real() > pick->value.real()) pick = &e;
          }
          if (pick != nullptr) {
            const double c = pick->value.imag(), d = 4.0 * std::abs(pick->value.real());
            eval(c);
            lo = std::max(lo, c - d);
            hi = std::min(hi, c + d);
          }
        } catch (const NoConvergence&) {
          // fall back to searching the whole bracket
        } catch (const NearSingularShift&) {
        }
      }
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      double f1 = eval(x1), f2 = eval(x2);
      for (int e = 2; e < opt.refine_evaluations; ++e) {
        if (f1 > f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - phi * (hi - lo);
          f1 = eval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + phi * (hi - lo);
          f2 = eval(x2);
        }
      }
      scan.peaks[k] = best;
    });
  }
  return scan;
}

GrowthFit fit_resolvent_growth(const ResolventScan& scan) {
  std::vector<std::pair<double, double>> pts;  // (log beta, log r)
  if (!scan.peaks.empty()) {
    for (const auto& p : scan.peaks) pts.push_back({std::log(p.beta), std::log(p.r)});
  } else {
    if (scan.betas.size() < 10) {
      throw WindowTooSmall("growth fit needs at least 10 scan points, got " + std::to_string(scan.betas.size()));
    }
    for (std::size_t i = 0; i < scan.betas.size(); ++i) pts.push_back({std::log(scan.betas[i]), std::log(scan.norms[i])});
  }
  std::sort(pts.begin(), pts.end());
  // upper hull (monotone chain), keeping collinear points
  std::vector<std::pair<double, double>> hull;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const double c = cross(hull[hull.size() - 2], hull.back(), p);
      const double tol = 1e-12 * (1.0 + std::abs(p.second) + std::abs(hull.back().second));
      if (c > tol) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  if (hull.size() < 2) throw WindowTooSmall("upper envelope has fewer than two points");
  std::vector<double> xs, ys;
  GrowthFit fit;
  for (const auto& [x, y] : hull) {
    xs.push_back(x);
    ys.push_back(y);
    fit.envelope_betas.push_back(std::exp(x));
    fit.envelope_norms.push_back(std::exp(y));
  }
  const auto lf = linalg::fit_line(xs, ys);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

void write_scan_csv(const ResolventScan& scan, std::ostream& out) {
  out << "beta,r\n";
  for (std::size_t i = 0; i < scan.betas.size(); ++i) {
    out << format_double(scan.betas[i]) << ',' << format_double(scan.norms[i]) << '\n';
  }
}

}  // namespace sslab
