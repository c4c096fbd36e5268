#include "sslab/evolution.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "sslab/csv.hpp"
#include "sslab/linalg/fit.hpp"

namespace sslab {

namespace {

linalg::BandedMatrix<double> shifted_identity(const linalg::BandedMatrix<double>& a, double c) {
  // I + c A
  linalg::BandedMatrix<double> m(a.size(), a.kl(), a.ku());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::size_t i0 = j > a.ku() ? j - a.ku() : 0;
    const std::size_t i1 = std::min(a.size() - 1, j + a.kl());
    for (std::size_t i = i0; i <= i1; ++i) m.at(i, j) = c * a(i, j);
  }
  for (std::size_t i = 0; i < a.size(); ++i) m.at(i, i) += 1.0;
  return m;
}

}  // namespace

MidpointStepper::MidpointStepper(const BlockGenerator& g, double dt) : g_(&g), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionViolation("time step must be positive");
  plus_ = shifted_identity(g.op(), 0.5 * dt);
  try {
    minus_lu_ = linalg::lu_factor(shifted_identity(g.op(), -0.5 * dt));
  } catch (const SingularMatrix& e) {
    throw SingularStep(std::string("I - dt/2 A is singular: ") + e.what());
  }
}

void MidpointStepper::step_internal(std::vector<double>& x, std::vector<double>& work) const {
  work.resize(x.size());
  plus_.multiply<double>(x, work);
  minus_lu_.solve_in_place<double>(work);
  x.swap(work);
}

StateVector<double> MidpointStepper::step(const StateVector<double>& y) const {
  std::vector<double> x = g_->to_internal(y), work;
  step_internal(x, work);
  return g_->from_internal<double>(x);
}

StateVector<double> step_implicit_midpoint(const BlockGenerator& g, const StateVector<double>& y, double dt) {
  return MidpointStepper(g, dt).step(y);
}

EnergyTrace simulate(const BlockGenerator& g, const StateVector<double>& y0, double dt, double t_end,
                     std::size_t stride) {
  return simulate(g, y0, dt, t_end, stride, nullptr);
}

EnergyTrace simulate(const BlockGenerator& g, const StateVector<double>& y0, double dt, double t_end,
                     std::size_t stride, StateVector<double>* final_state) {
  if (!(t_end > 0.0)) throw PreconditionViolation("t_end must be positive");
  if (stride == 0) throw PreconditionViolation("stride must be at least 1");
  const MidpointStepper stepper(g, dt);
  const auto& L = g.layout();
  std::vector<std::size_t> qidx(L.count(Block::Q));
  for (std::size_t i = 0; i < qidx.size(); ++i) qidx[i] = g.internal_index(L.offset(Block::Q) + i);
  const auto qw = g.q_weights();
  auto q_dissipation = [&](const std::vector<double>& a, const std::vector<double>* b) {
    double s = 0.0;
    for (std::size_t i = 0; i < qidx.size(); ++i) {
      const double q = b ? 0.5 * (a[qidx[i]] + (*b)[qidx[i]]) : a[qidx[i]];
      s += qw[i] * q * q;
    }
    return g.gamma_over_kappa() * s;
  };

  EnergyTrace tr;
  tr.kind = g.kind();
  tr.params = g.params().raw();
  tr.dt = dt;
  std::vector<double> x = g.to_internal(y0), prev, work;
  auto record = [&](double t, double acc) {
    tr.times.push_back(t);
    tr.energies.push_back(0.5 * g.gram().inner(std::span<const double>(x), std::span<const double>(x)));
    tr.dissipations.push_back(q_dissipation(x, nullptr));
    tr.dissipated.push_back(acc);
  };
  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
  double acc = 0.0;
  record(0.0, 0.0);
  for (std::size_t s = 1; s <= steps; ++s) {
    prev = x;
    stepper.step_internal(x, work);
    acc += dt * q_dissipation(x, &prev);
    if (s % stride == 0 || s == steps) record(static_cast<double>(s) * dt, acc);
  }
  if (final_state) *final_state = g.from_internal<double>(x);
  return tr;
}

std::string_view to_string(DecayModel m) { return m == DecayModel::Exponential ? "Exponential" : "Polynomial"; }

DecayFit fit_decay(const EnergyTrace& trace, std::optional<FitWindow> window) {
  if (trace.times.empty()) throw WindowTooSmall("empty trace");
  FitWindow w = window.value_or(FitWindow{trace.times.back() / 10.0, trace.times.back()});
  std::vector<double> t, logt, loge;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double ti = trace.times[i];
    if (ti < w.t_begin || ti > w.t_end) continue;
    const double e = trace.energies[i];
    if (e < 1e-300) {
      throw EnergyUnderflow("energy " + format_double(e) + " at t = " + format_double(ti) + " inside the fit window");
    }
    if (!(ti > 0.0)) continue;  // log t undefined at the origin
    t.push_back(ti);
    logt.push_back(std::log(ti));
    loge.push_back(std::log(e));
  }
  if (t.size() < 10) {
    throw WindowTooSmall("fit window [" + format_double(w.t_begin) + ", " + format_double(w.t_end) + "] holds " +
                         std::to_string(t.size()) + " samples, need 10");
  }
  const auto fe = linalg::fit_line(t, loge);
  const auto fp = linalg::fit_line(logt, loge);
  DecayFit out;
  out.window = w;
  out.samples = t.size();
  out.exponential = {DecayModel::Exponential, -fe.slope, fe.intercept, fe.r_squared};
  out.polynomial = {DecayModel::Polynomial, -fp.slope, fp.intercept, fp.r_squared};
  const CandidateFit& best = fp.r_squared > fe.r_squared ? out.polynomial : out.exponential;
  out.model = best.model;
  out.rate = best.rate;
  out.r_squared = best.r_squared;
  return out;
}

StateVector<double> make_initial_data(const BlockGenerator& g, const InitialRecipe& recipe) {
  const auto& p = g.params().raw();
  StateVector<double> y(g.layout());
  if (const auto* m = std::get_if<Modal>(&recipe)) {
    if (m->k < 1) throw BadRecipe("mode number must be at least 1");
    if (static_cast<std::size_t>(m->k) > g.layout().n1() / 2) {
      throw BadRecipe("mode " + std::to_string(m->k) + " is not resolved by " + std::to_string(g.layout().n1()) +
                      " string cells");
    }
    FieldFunctions f;
    const double k = m->k * std::numbers::pi / p.ell1;
    auto profile = [k](double x) { return std::sin(k * x); };
    if (m->field == Modal::Field::Velocity) {
      f.v1 = profile;
    } else {
      f.u1 = profile;
    }
    y = sample_state(g, f);
  } else if (const auto* r = std::get_if<RandomSeeded>(&recipe)) {
    std::mt19937_64 rng(r->seed);
    std::normal_distribution<double> nd;
    for (double& v : y.values()) v = nd(rng);
  } else {
    const auto& b = std::get<InterfaceBump>(recipe);
    const double w = b.width == 0.0 ? std::min(p.ell1, p.ell2) / 8.0 : b.width;
    if (!(w > 0.0)) throw BadRecipe("bump width must be positive");
    const double hmax = std::max(g.grids().string.h, g.grids().beam.h);
    if (w < 2.0 * hmax) throw BadRecipe("bump width " + format_double(w) + " is below two grid cells");
    auto bump = [w](double ell) {
      return [w, ell](double x) { return std::exp(-(x / w) * (x / w)) * (1.0 - (x / ell) * (x / ell)); };
    };
    FieldFunctions f;
    f.u1 = bump(p.ell1);
    f.u2 = bump(p.ell2);
    y = sample_state(g, f);
  }
  const double e = energy(g, y);
  if (!(e > 0.0)) throw BadRecipe("recipe produced a zero-energy state");
  const double s = 1.0 / std::sqrt(e);
  for (double& v : y.values()) v *= s;
  return y;
}

void write_trace_csv(const EnergyTrace& trace, std::ostream& out) {
  out << "t,E,D\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << format_double(trace.times[i]) << ',' << format_double(trace.energies[i]) << ','
        << format_double(trace.dissipations[i]) << '\n';
  }
}

}  // namespace sslab
