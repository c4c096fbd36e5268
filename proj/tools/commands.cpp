#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "experiment.hpp"
#include "sslab/csv.hpp"
#include "sslab/linalg/fit.hpp"

namespace sslab::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) { return format_double(v); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

template <class Fn>
void write_csv(const fs::path& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(path, os.str());
}

Grids grids_for(const ValidatedParams& v, const ExperimentConfig& c, std::size_t n1) {
  return build_grids(v, n1, c.n2);
}

InitialRecipe recipe_for(const ExperimentConfig& c) {
  if (c.initial.recipe == "random") return RandomSeeded{c.seed};
  if (c.initial.recipe == "bump") return InterfaceBump{c.initial.width};
  return Modal{c.initial.k, c.initial.field == "velocity" ? Modal::Field::Velocity : Modal::Field::Displacement};
}

// ---------------------------------------------------------------------------

void cmd_simulate(const ExperimentConfig& c, const fs::path& out, std::ostream& report) {
  const auto v = validate_params(c.params);
  const BlockGenerator g = assemble_generator(v, c.system, grids_for(v, c, c.n1));
  const auto y0 = make_initial_data(g, recipe_for(c));
  const EnergyTrace trace = simulate(g, y0, c.integrator.dt, c.integrator.t_end, c.integrator.stride);
  const DecayFit fit = fit_decay(trace, FitWindow{c.fit.t_begin, c.fit.t_end});

  write_csv(out / "trace.csv", [&](std::ostream& os) { write_trace_csv(trace, os); });
  std::ostringstream d;
  d << "model = " << to_string(fit.model) << '\n'
    << "rate = " << fmt(fit.rate) << '\n'
    << "r_squared = " << fmt(fit.r_squared) << '\n'
    << "window = " << fmt(fit.window.t_begin) << ' ' << fmt(fit.window.t_end) << '\n'
    << "samples = " << fit.samples << '\n'
    << "exponential_rate = " << fmt(fit.exponential.rate) << '\n'
    << "exponential_r_squared = " << fmt(fit.exponential.r_squared) << '\n'
    << "polynomial_exponent = " << fmt(fit.polynomial.rate) << '\n'
    << "polynomial_r_squared = " << fmt(fit.polynomial.r_squared) << '\n';
  write_file(out / "decay_fit.txt", d.str());

  report << "initial data: " << c.initial.recipe;
  if (c.initial.recipe == "modal") report << " k=" << c.initial.k << " (" << c.initial.field << ")";
  report << "\nsteps: " << std::llround(c.integrator.t_end / c.integrator.dt) << ", samples: " << trace.times.size()
         << "\nE(0) = " << fmt(trace.energies.front()) << ", E(end) = " << fmt(trace.energies.back())
         << "\nfit window [" << fmt(fit.window.t_begin) << ", " << fmt(fit.window.t_end) << "]\n"
         << "model chosen: " << to_string(fit.model) << '\n';
  if (fit.model == DecayModel::Exponential) {
    report << "rate: " << fmt(fit.rate) << " (E ~ exp(-rate t))\n";
  } else {
    report << "exponent: " << fmt(fit.rate) << " (E ~ t^-p)\n";
  }
  report << "R^2: " << fmt(fit.r_squared) << '\n';
  if (c.system == SystemKind::ElasticStringThermoBeam) {
    report << "note: the discrete S2 system is eventually exponential (spectral gap of A_h); the power-law fit "
              "is only meaningful on a window ending before that regime.\n";
  }
}

// ---------------------------------------------------------------------------

void cmd_resolvent_scan(const ExperimentConfig& c, const fs::path& out, std::ostream& report) {
  const auto v = validate_params(c.params);
  const std::size_t n1 = resolved_string_cells(v, c.n1, c.scan.beta_max, c.scan.points_per_wavelength);
  const BlockGenerator g = assemble_generator(v, c.system, grids_for(v, c, n1));
  ScanOptions opt;
  opt.refine_peaks = c.scan.refine_peaks;
  opt.threads = c.threads;
  const ResolventScan scan = resolvent_scan(g, c.scan.beta_min, c.scan.beta_max, c.scan.count, opt);
  write_csv(out / "scan.csv", [&](std::ostream& os) { write_scan_csv(scan, os); });

  report << "grid: n1 = " << n1 << " (string, resolved to beta_max), n2 = " << c.n2 << '\n'
         << "points: " << scan.betas.size() << ", refined peaks: " << scan.peaks.size() << '\n';

  std::ostringstream t;
  GrowthFit fit;
  bool fitted = true;
  try {
    fit = fit_resolvent_growth(scan);
  } catch (const WindowTooSmall& e) {
    fitted = false;
    t << "slope = nan\n";
    report << "no growth fit: " << e.what() << '\n';
  }
  if (fitted) {
    const double ratio = top_decade_ratio(fit, c.scan.beta_max);
    t << "slope = " << fmt(fit.slope) << '\n'
      << "intercept = " << fmt(fit.intercept) << '\n'
      << "r_squared = " << fmt(fit.r_squared) << '\n'
      << "top_decade_ratio = " << fmt(ratio) << '\n';
    t << "envelope_points = " << fit.envelope_betas.size() << '\n';
    for (std::size_t i = 0; i < fit.envelope_betas.size(); ++i) {
      t << "envelope " << fmt(fit.envelope_betas[i]) << ' ' << fmt(fit.envelope_norms[i]) << '\n';
    }
    report << "envelope slope: " << fmt(fit.slope) << " (R^2 " << fmt(fit.r_squared) << ")\n"
           << "max/min of the envelope over the top decade: " << fmt(ratio) << '\n';
    if (c.system == SystemKind::ThermoStringElasticBeam) {
      report << "verdict: " << (ratio < 3.0 ? "bounded envelope" : "envelope not bounded over the top decade") << '\n';
    } else {
      const bool in = fit.slope >= 0.8 && fit.slope <= 2.2;
      report << "verdict: slope " << (in ? "inside" : "outside") << " the polynomial bracket [1, 2] +- 0.2\n";
    }
  }
  write_file(out / "growth_fit.txt", t.str());
}

// ---------------------------------------------------------------------------

void cmd_eigen_branch(const ExperimentConfig& c, const fs::path& out, std::ostream& report) {
  const auto v = validate_params(c.params);
  const std::size_t n1 = resolved_string_cells(v, c.n1, std::max(c.eigen.shift_max, 1.0));
  const Grids grids = grids_for(v, c, n1);
  const BlockGenerator g = c.eigen.conservative_core ? assemble_conservative_core(v, c.system, grids)
                                                     : assemble_generator(v, c.system, grids);
  std::vector<cplx> shifts;
  const auto steps = static_cast<std::size_t>(std::floor((c.eigen.shift_max - c.eigen.shift_min) / c.eigen.shift_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) shifts.emplace_back(0.0, c.eigen.shift_min + i * c.eigen.shift_step);
  BranchOptions bo;
  bo.threads = c.threads;
  const EigenBranch branch = eigen_branch(g, shifts, c.eigen.k_per_shift, bo);
  write_csv(out / "eigs.csv", [&](std::ostream& os) { write_eigs_csv(branch, os); });

  AbscissaOptions ao;
  ao.k_per_shift = c.eigen.k_per_shift;
  ao.conservative_core = c.eigen.conservative_core;
  ao.branch = bo;
  const auto rows = spectral_abscissa_study(v, c.system, c.eigen.abscissa_n, c.eigen.sigma_max, ao);
  write_csv(out / "abscissa.csv", [&](std::ostream& os) {
    os << "n,sigma_cut,abscissa,re_argmax,im_argmax,eigenvalues\n";
    for (const auto& r : rows) {
      os << r.n << ',' << fmt(r.sigma_cut) << ',' << fmt(r.abscissa) << ',' << fmt(r.argmax.real()) << ','
         << fmt(r.argmax.imag()) << ',' << r.eigenvalues << '\n';
    }
  });

  report << "grid: n1 = " << n1 << ", n2 = " << c.n2 << (c.eigen.conservative_core ? " (conservative core)" : "")
         << "\nshifts: " << shifts.size() << ", eigenvalues: " << branch.eigenvalues.size() << '\n';
  double worst = 0.0;
  for (const auto& e : branch.eigenvalues) worst = std::max(worst, e.residual);
  report << "largest backward residual: " << fmt(worst) << '\n';
  if (!c.eigen.conservative_core) {
    try {
      const BranchFit bf = fit_branch_decay(branch);
      report << "branch fit: -Re lambda ~ |Im lambda|^-" << fmt(bf.exponent) << " (R^2 " << fmt(bf.r_squared)
             << ", " << bf.used.size() << " points)\n";
    } catch (const WindowTooSmall& e) {
      report << "branch fit: " << e.what() << '\n';
    }
  }
  for (const auto& r : rows) {
    report << "abscissa n=" << r.n << ": " << fmt(r.abscissa) << " (|Im| <= " << fmt(r.sigma_cut) << ")\n";
  }
  if (rows.size() >= 2) {
    const double a = rows[rows.size() - 2].abscissa, b = rows.back().abscissa;
    report << "relative change between the two finest grids: " << fmt(std::abs(a - b) / std::abs(b)) << '\n';
  }
}

// ---------------------------------------------------------------------------

void cmd_char_roots(const ExperimentConfig& c, const fs::path& out, std::ostream& report) {
  const auto v = validate_params(c.params);
  const CharacteristicCoefficients cc = characteristic_coefficients(v);
  std::vector<CharacteristicRoots> roots;
  double worst = 0.0;
  for (double w : c.roots.w) {
    roots.push_back(characteristic_roots(cc, w));
    for (const cplx& z : roots.back().z) worst = std::max(worst, sextic_residual(cc, w, z));
  }
  write_csv(out / "roots.csv", [&](std::ostream& os) { write_roots_csv(roots, os); });

  report << "a = " << fmt(cc.a) << ", b = " << fmt(cc.b) << ", c = " << fmt(cc.c) << '\n'
         << "largest relative sextic residual: " << fmt(worst) << '\n';

  std::ostringstream a;
  a << "w,dev_z1,dev_z2,dev_z3\n";
  std::vector<double> ws = c.roots.w;
  const bool sorted = std::is_sorted(ws.begin(), ws.end()) && std::adjacent_find(ws.begin(), ws.end()) == ws.end();
  if (sorted && ws.size() >= 3 && ws.back() >= 100.0 * ws.front()) {
    const RootAsymptotics ra = verify_root_asymptotics(cc, ws);
    for (const auto& r : ra.rows) {
      a << fmt(r.w) << ',' << fmt(r.deviation[0]) << ',' << fmt(r.deviation[1]) << ',' << fmt(r.deviation[2]) << '\n';
    }
    report << "deviation columns monotone: " << (ra.monotone ? "yes" : "no") << ", final max deviation "
           << fmt(ra.final_max) << '\n';
  } else {
    report << "asymptotics skipped: roots.w must increase, hold 3 values and span two decades\n";
  }
  write_file(out / "asymptotics.csv", a.str());

  const FrequencySequence seq = resonant_frequencies(v, 8);
  report << "Dirichlet target (alpha1/b)^(1/4) = " << fmt(seq.target)
         << (seq.rational_target ? " (rational: sequence continues with multiples)" : "") << "\nq:";
  for (long long q : seq.q) report << ' ' << q;
  report << '\n';
}

// ---------------------------------------------------------------------------

void cmd_lack_exp(const ExperimentConfig& c, const fs::path& out, std::ostream& report) {
  const auto v = validate_params(c.params);
  if (c.system != SystemKind::ElasticStringThermoBeam) {
    throw ConfigError("lack-exp applies to the S2 system (heat on the beam)");
  }
  const auto& pr = c.probe;
  const LackExpResult conv = lack_exp_probe_converged(v, pr.count, pr.alpha_exponent, pr.rule, pr.rel_tol, pr.max_cells);
  write_csv(out / "gains.csv", [&](std::ostream& os) { write_gains_csv(conv, os); });

  std::ostringstream e;
  e << "exponent = " << fmt(conv.exponent) << '\n'
    << "r_squared = " << fmt(conv.r_squared) << '\n'
    << "converged = " << conv.rows.size() << '\n'
    << "unresolved = " << conv.unresolved << '\n'
    << "rational_target = " << (conv.rational_target ? "true" : "false") << '\n';
  report << "discrete probe (" << (pr.rule == ShiftRule::Uncorrected ? "uncorrected" : "tangent-corrected") << " shift, grids "
         << "doubled until gains agree to " << fmt(pr.rel_tol) << "):\n";
  for (std::size_t i = 0; i < conv.rows.size(); ++i) {
    report << "  w = " << fmt(conv.rows[i].w) << "  gain = " << fmt(conv.rows[i].gain) << "  n = " << conv.cells[i]
           << '\n';
  }
  if (conv.unresolved > 0) {
    report << "  " << conv.unresolved << " further frequencies not converged within " << pr.max_cells << " cells\n";
  }
  report << "fitted exponent: " << fmt(conv.exponent) << (conv.exponent >= 0.5 ? " (>= 0.5)" : " (< 0.5)") << '\n';

  std::vector<double> ws;
  for (const auto& r : conv.rows) ws.push_back(r.w);
  const LackExpResult fixed = lack_exp_probe_at(v, ws, pr.alpha_exponent, pr.n);
  e << "fixed_grid_n = " << fixed.n << '\n' << "fixed_grid_exponent = " << fmt(fixed.exponent) << '\n';
  report << "single grid n = " << fixed.n << ":";
  for (const auto& r : fixed.rows) report << ' ' << fmt(r.gain);
  report << " (exponent " << fmt(fixed.exponent) << ")\n";

  const double pi = std::numbers::pi;
  if (std::abs(c.params.ell1 - pi) > 1e-12 || std::abs(c.params.ell2 - pi) > 1e-12) {
    report << "mode system skipped: it needs l1 = l2 = pi\n";
    write_file(out / "exponent.txt", e.str());
    return;
  }

  std::vector<ModeGainRow> agree;
  double worst = 0.0;
  for (const auto& r : conv.rows) {
    const ModeSolution m = mode_coefficients(v, r.w, pr.alpha_exponent);
    const double g = mode_energy_gain(v, m);
    agree.push_back({r.w, g, m.condition});
    worst = std::max(worst, std::abs(r.gain - g) / g);
  }
  write_csv(out / "mode_gains.csv", [&](std::ostream& os) { write_mode_gains_csv(agree, os); });
  e << "mode_gain_max_rel_diff = " << fmt(worst) << '\n';
  report << "analytic mode gains at the same w:";
  for (const auto& r : agree) report << ' ' << fmt(r.gain);
  report << " (largest relative difference " << fmt(worst) << ")\n";

  const FrequencySequence seq = resonant_frequencies(v, pr.count, pr.analytic_rule);
  std::vector<double> lx, ly;
  report << "|gamma_n c1| (" << (pr.analytic_rule == ShiftRule::Uncorrected ? "uncorrected" : "tangent-corrected") << " shift):";
  for (double w : seq.w) {
    const ModeSolution m = mode_coefficients(v, w, 0.0);
    lx.push_back(std::log(m.gamma));
    ly.push_back(std::log(m.gamma_c1()));
    report << ' ' << fmt(m.gamma_c1());
  }
  const auto lf = linalg::fit_line(lx, ly);
  e << "gamma_c1_exponent = " << fmt(lf.slope) << '\n' << "gamma_c1_r_squared = " << fmt(lf.r_squared) << '\n';
  report << "\n|gamma_n c1| grows like gamma_n^" << fmt(lf.slope) << " (R^2 " << fmt(lf.r_squared) << ")\n";
  write_file(out / "exponent.txt", e.str());
}

// ---------------------------------------------------------------------------

void cmd_zero_resolvent_check(const ExperimentConfig& c, const fs::path& out, std::ostream& report) {
  const auto v = validate_params(c.params);
  if (c.system != SystemKind::ThermoStringElasticBeam) {
    throw ConfigError("zero-resolvent-check applies to the S1 system (heat on the string)");
  }
  if (c.n1 != c.n2) {
    throw DimensionMismatch("zero-resolvent-check uses matched grids, got n1 = " + std::to_string(c.n1) +
                            " and n2 = " + std::to_string(c.n2));
  }
  const ZeroResolventData f = c.zero_resolvent.forcing == "zero" ? ZeroResolventData{} : random_smooth_forcing(v, c.seed);
  const ZeroResolventConvergence conv = zero_resolvent_convergence(v, f, c.zero_resolvent.n_list);
  write_csv(out / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(conv, os); });
  report << "forcing: " << c.zero_resolvent.forcing << " (seed " << c.seed << ")\n";
  for (const auto& r : conv.rows) report << "  n = " << r.n << "  error = " << fmt(r.error) << '\n';
  report << "observed order: " << fmt(conv.order) << '\n';
}

}  // namespace

double top_decade_ratio(const GrowthFit& fit, double beta_max) {
  const auto& b = fit.envelope_betas;
  const auto& r = fit.envelope_norms;
  if (b.empty()) return 1.0;
  auto at = [&](double x) {
    if (x <= b.front()) return r.front();
    if (x >= b.back()) return r.back();
    const std::size_t j = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
    const double t = std::log(x / b[j - 1]) / std::log(b[j] / b[j - 1]);
    return std::exp((1.0 - t) * std::log(r[j - 1]) + t * std::log(r[j]));
  };
  const double lo = beta_max / 10.0;
  double mx = std::max(at(lo), at(beta_max)), mn = std::min(at(lo), at(beta_max));
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] > lo && b[i] < beta_max) {
      mx = std::max(mx, r[i]);
      mn = std::min(mn, r[i]);
    }
  }
  return mx / mn;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate",  "resolvent-scan", "eigen-branch",
                                                 "char-roots", "lack-exp",       "zero-resolvent-check"};
  return names;
}

std::string run_command(const std::string& command, const ExperimentConfig& c, const fs::path& out) {
  fs::create_directories(out);
  write_file(out / "run.json", json{{"command", command}, {"config", to_json(c)}}.dump(2) + "\n");

  std::ostringstream report;
  report << "command: " << command << "\nsystem: " << to_string(c.system) << "\nseed: " << c.seed << '\n';
  if (command == "simulate") {
    cmd_simulate(c, out, report);
  } else if (command == "resolvent-scan") {
    cmd_resolvent_scan(c, out, report);
  } else if (command == "eigen-branch") {
    cmd_eigen_branch(c, out, report);
  } else if (command == "char-roots") {
    cmd_char_roots(c, out, report);
  } else if (command == "lack-exp") {
    cmd_lack_exp(c, out, report);
  } else if (command == "zero-resolvent-check") {
    cmd_zero_resolvent_check(c, out, report);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  write_file(out / "report.txt", report.str());
  return report.str();
}

}  // namespace sslab::cli
