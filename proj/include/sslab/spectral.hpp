#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sslab/analytic.hpp"
#include "sslab/discretization.hpp"
#include "sslab/linalg/eigs.hpp"

namespace sslab {

struct ResolventOptions {
  double tol = 1e-8;    // relative Ritz residual of the Lanczos estimate
  int max_iter = 500;
};

// r(beta) = ||(i beta - A)^{-1}||_G for an operator A and energy weight G.
struct ResolventValue {
  double norm = 0.0;
  int iterations = 0;
};
ResolventValue resolvent_norm(const linalg::BandedMatrix<double>& a, const linalg::WeightMatrix& g, double beta,
                              const ResolventOptions& opt = {});
ResolventValue resolvent_norm(const BlockGenerator& g, double beta, const ResolventOptions& opt = {});

struct ScanOptions {
  ResolventOptions resolvent;
  // Golden-section refinement of every interior local maximum of the scan.
  // With refine_eigs > 0 the search is narrowed to the least damped of that
  // many eigenvalues nearest the peak, when one lies inside its bracket.
  bool refine_peaks = false;
  int refine_evaluations = 24;
  std::size_t refine_eigs = 6;
  // 0 -> hardware concurrency. Results do not depend on this value.
  unsigned threads = 0;
};

struct ScanPoint {
  double beta = 0.0;
  double r = 0.0;
  int iterations = 0;
};

struct ResolventScan {
  std::vector<double> betas;
  std::vector<double> norms;
  std::vector<int> iterations;
  // Refined local maxima (only with ScanOptions::refine_peaks).
  std::vector<ScanPoint> peaks;
};

// Log-spaced scan of r over [beta_min, beta_max] with `count` points.
ResolventScan resolvent_scan(const BlockGenerator& g, double beta_min, double beta_max, std::size_t count,
                             const ScanOptions& opt = {});

// String cells needed for the scan to resolve string waves up to beta_max:
// max(n, ceil(ppw * beta_max * l1 / (2 pi sqrt(alpha1)))), i.e. `ppw` points per
// string wavelength at the top frequency. Without it the beam carries modes
// the string cannot damp.
std::size_t resolved_string_cells(const ValidatedParams& p, std::size_t n, double beta_max,
                                  double points_per_wavelength = 10.0);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> envelope_betas;
  std::vector<double> envelope_norms;
};

// Least-squares slope of log r against log beta over the upper envelope:
// the vertices of the upper concave hull of the points in log-log
// coordinates (refined peaks when present, raw points otherwise).
GrowthFit fit_resolvent_growth(const ResolventScan& scan);

struct BranchEigenvalue {
  cplx value;
  double residual = 0.0;
  cplx shift;
};

struct EigenBranch {
  std::vector<BranchEigenvalue> eigenvalues;
};

struct BranchOptions {
  // backward-error target, ||A x - lambda x||_G <= tol max(1, ||A||_G) ||x||_G
  double tol = 1e-8;
  unsigned threads = 0;
  linalg::EigsOptions eigs;
};

// Up to k eigenvalues nearest each shift; duplicates across shifts removed
// (|lambda - mu| < 1e-8 |lambda|). Ordered by shift, then by distance.
EigenBranch eigen_branch(const BlockGenerator& g, const std::vector<cplx>& shifts, std::size_t k_per_shift,
                         const BranchOptions& opt = {});

// Power-law fit log(-Re lambda) = -exponent * log|Im lambda| + c along the
// branch nearest the axis: the least damped eigenvalue of each shift, reduced
// to the lower convex hull of those points in log-log coordinates (`used`).
struct BranchFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<cplx> used;
};
BranchFit fit_branch_decay(const EigenBranch& branch);

struct AbscissaRow {
  std::size_t n = 0;
  double sigma_cut = 0.0;  // largest |Im lambda| searched at this n
  double abscissa = 0.0;   // max Re lambda found
  cplx argmax;
  std::size_t eigenvalues = 0;
};

struct AbscissaOptions {
  // Frequencies above f * (string Nyquist frequency 2 sqrt(alpha1) n / l1)
  // are excluded: there the string cannot carry the modes the continuous
  // system damps through it.
  double resolved_fraction = 0.25;
  double shift_spacing = 0.0;  // 0 -> automatic
  std::size_t k_per_shift = 6;
  bool conservative_core = false;
  BranchOptions branch;
};

std::vector<AbscissaRow> spectral_abscissa_study(const ValidatedParams& p, SystemKind kind,
                                                 const std::vector<std::size_t>& n_list, double sigma_max,
                                                 const AbscissaOptions& opt = {});

struct GainRow {
  double w = 0.0;
  double gain = 0.0;  // ||y||_G / ||f||_G
};

struct LackExpResult {
  std::vector<GainRow> rows;
  double exponent = 0.0;  // fitted slope of log(gain) vs log(w)
  double r_squared = 0.0;
  bool rational_target = false;
  std::size_t n = 0;
  // Set by lack_exp_probe_converged only: grid used per row, and how many
  // trailing sequence frequencies never converged within the cell cap.
  std::vector<std::size_t> cells;
  std::size_t unresolved = 0;
};

// Minimum cells per component so the forcing at w is resolved: 20 w l / pi.
std::size_t probe_resolution(const ValidatedParams& p, double w_max);

// Solves (i w - A_h) y = f_w for f_w with string force -alpha1 sin(w x / sqrt(alpha1)) and reports the gain
// in the energy norm. Throws UnderResolved when n < probe_resolution.
GainRow probe_gain(const BlockGenerator& g, double w);

// probe_gain on grids refined by doubling from probe_resolution(w) until two
// successive gains agree to rel_tol. Near a sharp resonance the discrete
// eigenvalue drifts with h^2 across the forcing frequency, so the single-grid
// gain can be off by orders of magnitude; UnderResolved if max_cells is hit.
// Beyond about 8k beam cells the solve itself loses accuracy in double
// precision, hence the default cap.
struct ResolvedGain {
  double w = 0.0;
  double gain = 0.0;
  std::size_t n = 0;
};
ResolvedGain resolved_probe_gain(const ValidatedParams& p, double w, double rel_tol = 0.1,
                                 std::size_t max_cells = 1 << 13);

// Gains along the frequencies returned by resonant_frequencies, divided by
// w^alpha_exponent. n = 0 picks probe_resolution(w_max) cells for both
// components.
LackExpResult lack_exp_probe(const ValidatedParams& p, std::size_t count, double alpha_exponent, std::size_t n = 0,
                             ShiftRule rule = ShiftRule::Uncorrected);
LackExpResult lack_exp_probe_at(const ValidatedParams& p, const std::vector<double>& frequencies,
                                double alpha_exponent, std::size_t n = 0);

// Like lack_exp_probe, but each gain comes from resolved_probe_gain. Stops at
// the first frequency that does not converge; the fit uses the rows before it
// and needs at least two of them (UnderResolved otherwise).
LackExpResult lack_exp_probe_converged(const ValidatedParams& p, std::size_t count, double alpha_exponent,
                                       ShiftRule rule = ShiftRule::Uncorrected, double rel_tol = 0.1,
                                       std::size_t max_cells = 1 << 13);

void write_scan_csv(const ResolventScan& scan, std::ostream& out);
void write_eigs_csv(const EigenBranch& branch, std::ostream& out);
void write_gains_csv(const LackExpResult& result, std::ostream& out);

}  // namespace sslab
