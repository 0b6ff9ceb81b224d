// Dimension thresholds for stable solutions of the biharmonic problem:
// the root s0 of L, the root x0 of H and the threshold 2 + 2x0, the
// comparison bound 2 + 4(p+1)t0/(p-1), the JL4 threshold 2 + 2x1, the
// singular-solution stability classification and its inversion in p, and
// the extremal-solution regularity report.
#pragma once

#include <cmath>
#include <optional>

#include "liouville/errors.hpp"
#include "liouville/exponents.hpp"
#include "liouville/polynomial.hpp"

namespace liouville {

// Verdicts at integer N carry a guard band: a threshold within kVerdictGuard
// of N is reported as borderline instead of being silently classified.
inline constexpr double kVerdictGuard = 1e-6;

enum class Verdict { yes, no, borderline };

template <typename Scalar>
Verdict guarded_less(Scalar lhs, Scalar rhs, Scalar guard = Scalar(kVerdictGuard)) {
  if (std::abs(lhs - rhs) <= guard) return Verdict::borderline;
  return lhs < rhs ? Verdict::yes : Verdict::no;
}

// Unique root of L in (2 t0, infinity). The bracket [2 t0, B] is certified:
// L(2 t0) < 0 always, and B is doubled until L(B) > 0; uniqueness follows
// from convexity of L on the bracket.
template <typename Scalar>
Scalar s0(Scalar p, Scalar tol = Scalar(1e-12)) {
  detail::require(p > Scalar(1), "s0: p must be > 1");
  detail::require(tol > Scalar(0), "s0: tol must be positive");
  const Poly<Scalar> L = poly_L(p);
  Scalar lo = Scalar(2) * t0(p);
  Scalar flo = L(lo);
  if (!(flo < Scalar(0)))
    throw std::logic_error("s0: invariant L(2 t0) < 0 violated");
  Scalar hi = lo + Scalar(8) * (Scalar(1) + std::sqrt(Scalar(32) * p / (p + Scalar(1))));
  int guard = 0;
  while (!(L(hi) > Scalar(0))) {
    hi *= Scalar(2);
    if (++guard > 200) throw std::logic_error("s0: upper bracket construction failed");
  }
  while (hi - lo > Scalar(2) * tol) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid == lo || mid == hi) break;
    if (L(mid) < Scalar(0))
      lo = mid;
    else
      hi = mid;
  }
  Scalar x = lo + (hi - lo) / Scalar(2);
  const Poly<Scalar> dL = derivative(L);
  for (int it = 0; it < 3; ++it) {
    const Scalar d = dL(x);
    if (d == Scalar(0)) break;
    const Scalar nx = x - L(x) / d;
    if (!(nx > lo && nx < hi)) break;
    x = nx;
  }
  return x;
}

// x0 = (p+1)/(p-1) s0, the largest root of H. Computed in the
// well-conditioned L/s coordinate; for p >= 1 + 1e-3 the result is
// cross-checked against direct root isolation of H.
template <typename Scalar>
Scalar x0(Scalar p) {
  const Scalar s = s0(p);
  const Scalar x = (p + Scalar(1)) / (p - Scalar(1)) * s;
  if (p >= Scalar(1) + Scalar(1e-3)) {
    const Poly<Scalar> H = poly_H(p);
    const auto hx = eval_with_scale(H, x);
    const auto direct = largest_real_root(H, Scalar(1e-10));
    if (!direct || std::abs(*direct - x) > Scalar(1e-6) * std::max(Scalar(1), std::abs(x)) ||
        std::abs(hx.value) > Scalar(1e-7) * hx.scale)
      throw std::logic_error("x0: cross-check against H root isolation failed");
  }
  return x;
}

template <typename Scalar>
Scalar dimension_threshold(Scalar p) {
  return dim_from_x(x0(p));
}

// 2 + 4(p+1) t0 / (p-1), the earlier comparison bound.
template <typename Scalar>
Scalar cowan_threshold(Scalar p) {
  detail::require(p > Scalar(1), "cowan_threshold: p must be > 1");
  return Scalar(2) + Scalar(4) * (p + Scalar(1)) * t0(p) / (p - Scalar(1));
}

// 2 + 2 x1 with x1 the largest root of H_JL4.
template <typename Scalar>
Scalar jl4_threshold(Scalar p) {
  const auto x1 = largest_real_root(poly_HJL4(p), Scalar(1e-10));
  if (!x1) throw std::logic_error("jl4_threshold: H_JL4 lost its largest root");
  return dim_from_x(*x1);
}

enum class SingularClass { stable, unstable, not_in_h2loc };

// Stability of the singular solution w = |x|^{-4/(p-1)}: not in H^2_loc for
// p <= (N+4)/(N-4); otherwise unstable exactly when the Hardy-Rellich
// constant is below p Q4(-4/(p-1)).
template <typename Scalar>
SingularClass classify_singular_solution(Scalar p, int N) {
  detail::require(p > Scalar(1), "classify_singular_solution: p must be > 1");
  detail::require_domain(N >= 5, "classify_singular_solution: N >= 5 required");
  if (p <= sobolev_critical<Scalar>(N)) return SingularClass::not_in_h2loc;
  const Scalar m = -Scalar(4) / (p - Scalar(1));
  return hardy_rellich_constant<Scalar>(N) < p * Q4(m, N) ? SingularClass::unstable
                                                          : SingularClass::stable;
}

// Smallest supercritical p at which the singular solution flips from
// unstable to stable, found by root-finding the equality in the Q4
// criterion. Returns nothing when no flip exists up to p = 1e6, which is
// decided against the p -> infinity limit 8(N-2)(N-4) of p Q4(-4/(p-1)).
template <typename Scalar>
std::optional<Scalar> p_jl4(int N, Scalar tol = Scalar(1e-10)) {
  detail::require_domain(N >= 5, "p_jl4: N >= 5 required");
  detail::require(tol > Scalar(0), "p_jl4: tol must be positive");
  const Scalar hr = hardy_rellich_constant<Scalar>(N);
  const auto f = [&](Scalar p) {
    return hr - p * Q4(-Scalar(4) / (p - Scalar(1)), N);
  };  // f < 0: unstable
  const Scalar pc = sobolev_critical<Scalar>(N);
  const Scalar cap = Scalar(1e6);

  Scalar prev = pc * (Scalar(1) + Scalar(1e-9));
  Scalar fprev = f(prev);
  Scalar cur = pc + std::max(Scalar(1e-6) * pc, Scalar(1e-9));
  bool bracketed = false;
  while (cur <= cap) {
    const Scalar fcur = f(cur);
    if (fprev < Scalar(0) && fcur >= Scalar(0)) {
      bracketed = true;
      break;
    }
    prev = cur;
    fprev = fcur;
    cur = pc + (cur - pc) * Scalar(1.25);
  }
  if (!bracketed) {
    const Scalar limit = Scalar(8) * Scalar(N - 2) * Scalar(N - 4);
    // The limit is confirmed numerically at the cap before trusting it.
    const Scalar at_cap = cap * Q4(-Scalar(4) / (cap - Scalar(1)), N);
    if (std::abs(at_cap - limit) > Scalar(1e-3) * limit)
      throw ConvergenceError("p_jl4: scan exhausted and the asymptote did not verify");
    if (hr <= limit) return std::nullopt;
    throw ConvergenceError("p_jl4: flip expected beyond the search cap");
  }
  Scalar lo = prev, hi = cur;
  for (int it = 0; it < 400; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid == lo || mid == hi) break;
    const Scalar fm = f(mid);
    if (std::abs(fm) <= tol * hr) return mid;
    if (fm < Scalar(0))
      lo = mid;
    else
      hi = mid;
  }
  const Scalar mid = lo + (hi - lo) / Scalar(2);
  if (std::abs(f(mid)) <= tol * hr) return mid;
  throw ConvergenceError("p_jl4: bisection failed to meet the residual tolerance");
}

// True exactly when some beta in [2, N s0/(N-2)) satisfies
// N < 2(p+1) beta/(p-1). Decided by interval arithmetic on the beta range,
// independently of the x0 route.
template <typename Scalar>
bool nonexistence_via_beta(Scalar p, int N) {
  detail::require(p > Scalar(1), "nonexistence_via_beta: p must be > 1");
  detail::require_domain(N >= 5, "nonexistence_via_beta: N >= 5 required");
  const Scalar upper = Scalar(N) * s0(p) / Scalar(N - 2);
  const Scalar needed = Scalar(N) * (p - Scalar(1)) / (Scalar(2) * (p + Scalar(1)));
  return upper > Scalar(2) && needed < upper;
}

enum class RegularityVerdict { smooth, unknown, borderline };

template <typename Scalar>
struct RegularityReport {
  RegularityVerdict verdict;
  Scalar integrability_sup;  // supremum of the Lebesgue exponent (p-1)/2 + q + 1
  Scalar smoothness_lhs;     // N/4
  Scalar smoothness_rhs;     // (1 + x0)/2, the s -> s0 limit of the elliptic test
  bool consistent;           // the two formulations agree
};

// Extremal-solution regularity for the bounded-domain problem; any N >= 1.
template <typename Scalar>
RegularityReport<Scalar> extremal_regularity_report(Scalar p, int N) {
  detail::require(p > Scalar(1), "extremal_regularity_report: p must be > 1");
  detail::require_domain(N >= 1, "extremal_regularity_report: N >= 1 required");
  const Scalar s = s0(p);
  const Scalar x = (p + Scalar(1)) / (p - Scalar(1)) * s;
  const Scalar threshold = dim_from_x(x);
  RegularityReport<Scalar> rep;
  rep.integrability_sup = (p - Scalar(1)) / Scalar(2) + (p + Scalar(1)) * s / Scalar(2);
  rep.smoothness_lhs = Scalar(N) / Scalar(4);
  rep.smoothness_rhs = (Scalar(1) + x) / Scalar(2);
  rep.consistent = (rep.smoothness_lhs < rep.smoothness_rhs) == (Scalar(N) < threshold);
  switch (guarded_less(Scalar(N), threshold)) {
    case Verdict::yes: rep.verdict = RegularityVerdict::smooth; break;
    case Verdict::no: rep.verdict = RegularityVerdict::unknown; break;
    case Verdict::borderline: rep.verdict = RegularityVerdict::borderline; break;
  }
  return rep;
}

template <typename Scalar>
struct ThresholdReport {
  Scalar p;
  Scalar s0;
  Scalar x0;
  Scalar dim_threshold;    // 2 + 2 x0
  Scalar cowan_threshold;  // 2 + 4(p+1) t0 / (p-1)
  Scalar x1;
  Scalar jl4_threshold;    // 2 + 2 x1
  std::optional<int> N;
  std::optional<Verdict> thm11_nonexistence;
  std::optional<Verdict> thm13_halfspace_nonexistence;  // equals thm11 by construction
  std::optional<Verdict> thm14_extremal_smooth;
  std::optional<SingularClass> singular_solution;
};

// Full report for one (p, N). Whole/half-space verdicts and the singular
// classification need N >= 5; the extremal-smoothness verdict fills for any
// N >= 1.
template <typename Scalar>
ThresholdReport<Scalar> theorem_report(Scalar p, std::optional<int> N = std::nullopt) {
  detail::require(p > Scalar(1), "theorem_report: p must be > 1");
  ThresholdReport<Scalar> rep;
  rep.p = p;
  rep.s0 = s0(p);
  rep.x0 = (p + Scalar(1)) / (p - Scalar(1)) * rep.s0;
  rep.dim_threshold = dim_from_x(rep.x0);
  rep.cowan_threshold = cowan_threshold(p);
  rep.jl4_threshold = jl4_threshold(p);
  rep.x1 = x_from_dim(rep.jl4_threshold);
  rep.N = N;
  if (!(rep.s0 > Scalar(2) * t0(p)) || !(rep.x0 > Scalar(5)) ||
      !(rep.dim_threshold > rep.cowan_threshold) || !(rep.x0 < rep.x1))
    throw std::logic_error("theorem_report: threshold invariants violated");
  if (N) {
    detail::require_domain(*N >= 1, "theorem_report: N >= 1 required");
    rep.thm14_extremal_smooth = guarded_less(Scalar(*N), rep.dim_threshold);
    if (*N >= 5) {
      rep.thm11_nonexistence = guarded_less(Scalar(*N), rep.dim_threshold);
      rep.thm13_halfspace_nonexistence = rep.thm11_nonexistence;
      rep.singular_solution = classify_singular_solution(p, *N);
    }
  }
  return rep;
}

}  // namespace liouville
