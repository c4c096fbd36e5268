#include <cmath>
#include <limits>
#include <numbers>

#include "sslab/analytic.hpp"
#include "sslab/errors.hpp"

namespace sslab {

DirichletSequence dirichlet_sequence(double x, std::size_t count) {
  if (!(x > 0.0) || !std::isfinite(x)) throw PreconditionViolation("dirichlet_sequence needs a finite x > 0");
  if (count == 0) throw PreconditionViolation("dirichlet_sequence needs count >= 1");

  // Convergents h_k / k_k from the recurrences h_k = a_k h_{k-1} + h_{k-2}.
  std::vector<std::pair<long long, long long>> conv;
  long long h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  long double y = x;
  bool terminated = false;
  constexpr long long kLimit = 1LL << 40;
  // Slack for the dropped leading (0, 1) and a duplicate denominator.
  while (conv.size() < count + 3) {
    const long double a = std::floor(y);
    if (a > static_cast<long double>(kLimit)) {
      terminated = true;
      break;
    }
    const auto ai = static_cast<long long>(a);
    const long long h = ai * h_prev + h_prev2;
    const long long k = ai * k_prev + k_prev2;
    if (h > kLimit || k > kLimit) break;
    conv.push_back({h, k});
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const long double frac = y - a;
    // The convergent reproduces x to rounding: treat x as this rational.
    const long double err = std::fabs(static_cast<long double>(x) - static_cast<long double>(h) / k);
    if (frac == 0.0L || err <= 4.0L * std::numeric_limits<double>::epsilon() * x) {
      terminated = true;
      break;
    }
    y = 1.0L / frac;
  }

  DirichletSequence out;
  for (std::size_t i = 0; i < conv.size() && out.pairs.size() < count; ++i) {
    if (conv[i].first < 1) continue;
    if (i + 1 < conv.size() && conv[i + 1].second == conv[i].second) continue;
    out.pairs.push_back(conv[i]);
  }
  out.rational = terminated;
  return out;
}

FrequencySequence resonant_frequencies(const ValidatedParams& p, std::size_t count, ShiftRule rule) {
  if (count == 0) throw PreconditionViolation("resonant_frequencies needs count >= 1");
  const double b = p->alpha2 + p->delta2 * p->beta2;
  FrequencySequence seq;
  seq.target = std::pow(p->alpha1 / b, 0.25);
  seq.shift = std::pow(p->alpha1, 0.25) / (4.0 * std::pow(b, 0.25));
  if (rule == ShiftRule::TangentCorrected) seq.shift /= std::numbers::pi;

  const DirichletSequence ds = dirichlet_sequence(seq.target, count);
  std::vector<long long> qs;
  for (const auto& pq : ds.pairs) qs.push_back(pq.second);
  seq.rational_target = ds.rational;
  if (qs.size() < count) {
    if (!ds.rational) throw NoConvergence("continued fraction exceeded the integer range");
    const long long q_last = ds.pairs.back().second;
    for (long long k = 2; qs.size() < count; ++k) qs.push_back(k * q_last);
  }
  for (long long q : qs) {
    const double qd = static_cast<double>(q);
    const double root = qd + seq.shift / (qd * qd);
    const double gamma = root * root;
    seq.q.push_back(q);
    seq.gamma.push_back(gamma);
    seq.w.push_back(std::sqrt(p->alpha1) * gamma);
  }
  return seq;
}

}  // namespace sslab
