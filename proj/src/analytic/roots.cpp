#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "sslab/analytic.hpp"
#include "sslab/csv.hpp"
#include "sslab/errors.hpp"

namespace sslab {

namespace {

struct Cardano {
  std::array<cplx, 3> s;
  cplx delta, u0, v0;
};

// Shared by the public solver and characteristic_roots, which also records
// the intermediates.
Cardano cardano(cplx p, cplx q) {
  Cardano out;
  const cplx disc = q * q + 4.0 * p * p * p / 27.0;
  cplx delta = std::sqrt(disc);
  // Either square root is admissible; the one adding to -q avoids cancellation.
  if (std::abs(-q + delta) < std::abs(-q - delta)) delta = -delta;
  out.delta = delta;
  const cplx u3 = (-q + delta) / 2.0;
  if (std::abs(u3) == 0.0) {
    // then q = 0 and p = 0: triple root at the origin
    out.s = {cplx(0.0), cplx(0.0), cplx(0.0)};
    out.u0 = out.v0 = 0.0;
    return out;
  }
  const cplx u0 = std::pow(u3, 1.0 / 3.0);
  const cplx v0 = -p / (3.0 * u0);
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  const cplx omega2 = std::conj(omega);
  out.u0 = u0;
  out.v0 = v0;
  out.s = {u0 + v0, omega * u0 + omega2 * v0, omega2 * u0 + omega * v0};
  return out;
}

}  // namespace

CharacteristicCoefficients characteristic_coefficients(const ValidatedParams& p) {
  CharacteristicCoefficients cc;
  cc.a = p->alpha2 * p->kappa2 * p->gamma2;
  cc.b = p->alpha2 + p->delta2 * p->beta2;
  cc.c = p->gamma2 * p->kappa2;
  cc.m = 2.0 * cc.b * cc.b * cc.b / (27.0 * cc.a * cc.a * cc.a);
  cc.M = std::sqrt(4.0 * cc.b * cc.b * cc.b / (27.0 * std::pow(cc.a, 4)));
  cc.tau2 = p->tau2;
  return cc;
}

std::array<cplx, 3> cubic_roots_cardano(cplx p, cplx q) { return cardano(p, q).s; }

double sextic_residual(const CharacteristicCoefficients& cc, double w, cplx z) {
  const cplx L = cc.L(w);
  const cplx i(0.0, 1.0);
  const cplx z2 = z * z;
  const cplx t6 = cc.a * z2 * z2 * z2;
  const cplx t4 = -i * w * L * cc.b * z2 * z2;
  const cplx t2 = -cc.c * w * w * z2;
  const cplx t0 = i * w * w * w * L;
  const double scale = std::abs(t6) + std::abs(t4) + std::abs(t2) + std::abs(t0);
  return std::abs(t6 + t4 + t2 + t0) / scale;
}

CharacteristicRoots characteristic_roots(const CharacteristicCoefficients& cc, double w) {
  if (!(w > 0.0)) throw PreconditionViolation("characteristic_roots needs w > 0");
  const cplx i(0.0, 1.0);
  const cplx L = cc.L(w);
  // X^3 + B X^2 + C X + D = 0 with X = z^2
  const cplx B = -i * w * L * cc.b / cc.a;
  const cplx C = -cc.c * w * w / cc.a;
  const cplx D = i * w * w * w * L / cc.a;

  CharacteristicRoots r;
  r.w = w;
  r.p = C - B * B / 3.0;
  r.q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
  r.discriminant = r.q * r.q + 4.0 * r.p * r.p * r.p / 27.0;
  const double disc_scale = std::norm(r.q) + 4.0 * std::pow(std::abs(r.p), 3) / 27.0;
  if (!(std::abs(r.discriminant) > 1e-14 * disc_scale)) {
    throw DegenerateDiscriminant("cubic discriminant vanishes at w = " + format_double(w));
  }
  const Cardano cd = cardano(r.p, r.q);
  r.delta = cd.delta;
  r.u0 = cd.u0;
  r.v0 = cd.v0;

  // Undo the shift s = X + B/3, then match roots to the asymptotes.
  // Undoing the shift loses digits in the two small roots when |B| is large
  // (|B| ~ w^2 against |X| ~ w); two Newton steps on the cubic in X restore them.
  std::array<cplx, 3> xs;
  for (int k = 0; k < 3; ++k) {
    cplx x = cd.s[k] - B / 3.0;
    for (int it = 0; it < 2; ++it) {
      const cplx f = ((x + B) * x + C) * x + D;
      const cplx df = (3.0 * x + 2.0 * B) * x + C;
      if (std::abs(df) == 0.0) break;
      const cplx step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      x -= step;
    }
    xs[k] = x;
  }
  const double sb = std::sqrt(cc.b);
  const std::array<cplx, 3> asym = {cplx(w / sb), cplx(-w / sb), cplx(-cc.b * cc.tau2 / cc.a * w * w)};
  std::array<int, 3> perm = {0, 1, 2}, best = perm;
  double best_cost = INFINITY, best_tie = INFINITY;
  do {
    double cost = 0.0, tie = 0.0;
    for (int k = 0; k < 3; ++k) {
      cost += std::abs(xs[perm[k]] - asym[k]) / std::abs(asym[k]);
      tie += static_cast<double>(k) * std::abs(xs[perm[k]]);
    }
    // ties: smaller |z| on the earlier label
    if (cost < best_cost || (cost == best_cost && tie < best_tie)) {
      best_cost = cost;
      best_tie = tie;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (int k = 0; k < 3; ++k) {
    r.s[k] = cd.s[best[k]];
    r.x[k] = xs[best[k]];
    cplx z = std::sqrt(r.x[k]);  // Re z >= 0
    if (k > 0 && z.imag() < 0.0) z = -z;
    r.z[k] = z;
  }
  return r;
}

cplx cyclic_root_factor(const CharacteristicRoots& r) {
  cplx sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const cplx a = r.x[(k + 1) % 3];
    const cplx b = r.x[(k + 2) % 3];
    sum += (a - b) / r.x[k];
  }
  return sum;
}

RootAsymptotics verify_root_asymptotics(const CharacteristicCoefficients& cc, const std::vector<double>& w_list) {
  if (w_list.size() < 3) throw PreconditionViolation("root asymptotics need at least 3 frequencies");
  for (std::size_t i = 1; i < w_list.size(); ++i) {
    if (!(w_list[i] > w_list[i - 1])) throw PreconditionViolation("frequencies must increase");
  }
  if (!(w_list.front() > 0.0) || !(w_list.back() >= 100.0 * w_list.front())) {
    throw PreconditionViolation("frequencies must span at least two decades");
  }
  const cplx i(0.0, 1.0);
  const double b4 = std::pow(cc.b, -0.25);
  const double k3 = std::sqrt(cc.b * cc.tau2 / cc.a);
  RootAsymptotics out;
  for (double w : w_list) {
    const CharacteristicRoots r = characteristic_roots(cc, w);
    RootDeviationRow row;
    row.w = w;
    row.deviation[0] = std::abs(r.z[0] / (b4 * std::sqrt(w)) - 1.0);
    row.deviation[1] = std::abs(r.z[1] / (i * b4 * std::sqrt(w)) - 1.0);
    row.deviation[2] = std::abs(r.z[2] / (i * k3 * w) - 1.0);
    out.rows.push_back(row);
  }
  out.monotone = true;
  for (std::size_t j = 1; j < out.rows.size(); ++j) {
    for (int k = 0; k < 3; ++k) {
      if (!(out.rows[j].deviation[k] < out.rows[j - 1].deviation[k])) out.monotone = false;
    }
  }
  const auto& last = out.rows.back().deviation;
  out.final_max = *std::max_element(last.begin(), last.end());
  return out;
}

void write_roots_csv(const std::vector<CharacteristicRoots>& roots, std::ostream& out) {
  out << "w,re_z1,im_z1,re_z2,im_z2,re_z3,im_z3\n";
  for (const auto& r : roots) {
    out << format_double(r.w);
    for (const cplx& z : r.z) out << ',' << format_double(z.real()) << ',' << format_double(z.imag());
    out << '\n';
  }
}

}  // namespace sslab
