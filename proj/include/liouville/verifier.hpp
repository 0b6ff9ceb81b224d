// Batch verification of the algebraic identities, inequalities and
// equivalences behind the threshold computations, over configurable p-grids.
// Failures are report entries, never exceptions.
//
// Relative residuals are normalized by max(1, |lhs|, |rhs|, eval_scale) where
// eval_scale bounds the roundoff of the polynomial evaluations involved;
// near p = 1 the (p-1)^{-4} coefficient growth makes the plain
// max(1, |lhs|, |rhs|) denominator unusable at tight tolerances.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/exponents.hpp"
#include "liouville/thresholds.hpp"

namespace liouville {

// Identity checks for p below this cutoff run in extended precision.
inline constexpr double kExtendedBelow = 1.01;

struct CheckResult {
  std::string name;
  bool pass = true;
  double worst_abs = 0;  // identities: worst |lhs-rhs|; inequalities: worst margin
  double worst_rel = 0;  // identities: worst normalized residual
  std::optional<double> failing_p;
  long samples = 0;
};

struct GridDescription {
  double p_min = 0;
  double p_max = 0;
  int count = 0;
};

struct VerificationReport {
  GridDescription grid;
  std::uint64_t seed = 0;
  int samples_per_point = 0;
  double tol = 0;
  std::string mode;  // precision note
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Log-spaced grid on [lo, hi], endpoints included.
template <typename Scalar>
std::vector<Scalar> log_grid(Scalar lo, Scalar hi, int count) {
  detail::require(lo > Scalar(0) && hi > lo && count >= 2, "log_grid: bad bounds");
  std::vector<Scalar> g(static_cast<std::size_t>(count));
  const Scalar llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * Scalar(i) / Scalar(count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace detail {

struct ResidualAccum {
  double worst_abs = 0;
  double worst_rel = 0;
  std::optional<double> failing_p;
  long samples = 0;

  template <typename S>
  void add(S lhs, S rhs, S scale, S p, double tol) {
    const S denom = std::max(std::max(S(1), scale), std::max(std::abs(lhs), std::abs(rhs)));
    const S abs_res = std::abs(lhs - rhs);
    const double rel = static_cast<double>(abs_res / denom);
    worst_abs = std::max(worst_abs, static_cast<double>(abs_res));
    if (rel > worst_rel) worst_rel = rel;
    if (rel > tol && !failing_p) failing_p = static_cast<double>(p);
    ++samples;
  }
};

struct MarginAccum {
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<double> failing_p;
  long samples = 0;

  template <typename S>
  void add(S margin, S p) {
    if (static_cast<double>(margin) < worst_margin)
      worst_margin = static_cast<double>(margin);
    if (!(margin > S(0)) && !failing_p) failing_p = static_cast<double>(p);
    ++samples;
  }
};

// The six identity checks at one grid point, computed at precision S.
template <typename S>
void identity_point(S p, int samples, std::uint64_t point_seed, double tol,
                    std::array<ResidualAccum, 6>& acc) {
  std::mt19937_64 rng(point_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const S tt = t0(p);
  const Poly<S> L = poly_L(p);
  const Poly<S> H = poly_H(p);
  const Poly<S> HJ = poly_HJL4(p);
  const Poly<S> J = poly_J<S>();
  const Poly<S> Lpp = derivative(derivative(L));
  const S ratio = (p + S(1)) / (p - S(1));

  // (i) t0^4 = 2p/(p+1) (2 t0 - 1)^2
  {
    const S lhs = tt * tt * tt * tt;
    const S rhs = S(2) * p / (p + S(1)) * (S(2) * tt - S(1)) * (S(2) * tt - S(1));
    acc[0].add(lhs, rhs, lhs, p, tol);
  }
  // (ii) (p+1)^2 L(2 t0) / (32 p) = (p-1)(1 - 2 t0)
  {
    const auto ev = eval_with_scale(L, S(2) * tt);
    const S factor = (p + S(1)) * (p + S(1)) / (S(32) * p);
    acc[1].add(ev.value * factor, (p - S(1)) * (S(1) - S(2) * tt), ev.scale * factor, p,
               tol);
  }
  // (iii) (p+1) L''(s) = 12 (p+1) s^2 - 64 p at sampled s
  // (iv) ((p+1)/(p-1))^4 L(s) = H((p+1) s / (p-1)) at sampled s
  // (v) H(x) - H_JL4(x) = 2 x^2 - 1 at sampled x
  const S r4 = ratio * ratio * ratio * ratio;
  for (int k = 0; k < samples; ++k) {
    const S s = S(8) * S(unit(rng));
    const S x = S(-20) + S(40) * S(unit(rng));
    {
      const auto ev = eval_with_scale(Lpp, s);
      const S lhs = (p + S(1)) * ev.value;
      const S rhs = S(12) * (p + S(1)) * s * s - S(64) * p;
      acc[2].add(lhs, rhs, (p + S(1)) * ev.scale, p, tol);
    }
    {
      const auto evl = eval_with_scale(L, s);
      const auto evh = eval_with_scale(H, ratio * s);
      acc[3].add(r4 * evl.value, evh.value, std::max(r4 * evl.scale, evh.scale), p, tol);
    }
    {
      const auto evh = eval_with_scale(H, x);
      const auto evj = eval_with_scale(HJ, x);
      acc[4].add(evh.value - evj.value, S(2) * x * x - S(1),
                 std::max(evh.scale, evj.scale), p, tol);
    }
  }
  // (vi) (p-1)^4 H(5) = J(p)
  {
    const S d4 = (p - S(1)) * (p - S(1)) * (p - S(1)) * (p - S(1));
    const auto evh = eval_with_scale(H, S(5));
    const auto evj = eval_with_scale(J, p);
    acc[5].add(d4 * evh.value, evj.value, std::max(d4 * evh.scale, evj.scale), p, tol);
  }
}

inline GridDescription describe(const std::vector<double>& grid) {
  return {grid.empty() ? 0 : grid.front(), grid.empty() ? 0 : grid.back(),
          static_cast<int>(grid.size())};
}

template <typename S>
GridDescription describe(const std::vector<S>& grid) {
  return {grid.empty() ? 0.0 : static_cast<double>(grid.front()),
          grid.empty() ? 0.0 : static_cast<double>(grid.back()),
          static_cast<int>(grid.size())};
}

}  // namespace detail

// Identity suite: (i) the t0 quartic identity, (ii) the closed form of
// L(2 t0), (iii) the L'' closed form, (iv) the H <-> L scaling, (v)
// H - H_JL4 = 2x^2 - 1, (vi) (p-1)^4 H(5) = J(p). Points with p < 1.01 are
// evaluated in extended precision when Scalar is double.
template <typename Scalar>
VerificationReport verify_identities(const std::vector<Scalar>& p_grid, Scalar tol,
                                     int samples = 50,
                                     std::uint64_t seed = 0x5eed0001ULL) {
  detail::require(tol > Scalar(0), "verify_identities: tol must be positive");
  for (Scalar p : p_grid)
    detail::require(p > Scalar(1), "verify_identities: all p must be > 1");
  std::array<detail::ResidualAccum, 6> acc;
  const double dtol = static_cast<double>(tol);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const std::uint64_t point_seed = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    if constexpr (std::is_same_v<Scalar, double>) {
      if (p_grid[i] < kExtendedBelow) {
        detail::identity_point<long double>(static_cast<long double>(p_grid[i]), samples,
                                            point_seed, dtol, acc);
        continue;
      }
    }
    detail::identity_point<Scalar>(p_grid[i], samples, point_seed, dtol, acc);
  }
  static const char* names[6] = {"t0_quartic_identity",   "L_at_2t0_closed_form",
                                 "L_second_derivative",   "H_from_L_scaling",
                                 "H_minus_HJL4_is_2x2m1", "J_equals_scaled_H5"};
  VerificationReport rep;
  rep.grid = detail::describe(p_grid);
  rep.seed = seed;
  rep.samples_per_point = samples;
  rep.tol = dtol;
  rep.mode = std::is_same_v<Scalar, double>
                 ? "double (extended below p=1.01)"
                 : "extended";
  for (int c = 0; c < 6; ++c) {
    CheckResult r;
    r.name = names[c];
    r.worst_abs = acc[static_cast<std::size_t>(c)].worst_abs;
    r.worst_rel = acc[static_cast<std::size_t>(c)].worst_rel;
    r.failing_p = acc[static_cast<std::size_t>(c)].failing_p;
    r.samples = acc[static_cast<std::size_t>(c)].samples;
    r.pass = r.worst_rel <= dtol;
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

// Inequality suite: L(2 t0) < 0, convexity of L on [2 t0, s0 + 10], a unique
// root of L beyond 2 t0, x0 > 5, x0 above the comparison exponent, and for
// p >= 2 also J < 0, J' < 0, J'' < 0.
template <typename Scalar>
VerificationReport verify_inequalities(const std::vector<Scalar>& p_grid,
                                       int samples = 25,
                                       std::uint64_t seed = 0x5eed0002ULL) {
  for (Scalar p : p_grid)
    detail::require(p > Scalar(1), "verify_inequalities: all p must be > 1");
  enum { L2T0, CONVEX, UNIQUE, X0GT5, X0CMP, JNEG, JPNEG, JPPNEG, kCount };
  std::array<detail::MarginAccum, kCount> acc;
  const Poly<Scalar> J = poly_J<Scalar>();
  const Poly<Scalar> Jp = derivative(J);
  const Poly<Scalar> Jpp = derivative(Jp);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const Scalar p = p_grid[i];
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (i + 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Scalar tt = t0(p);
    const Poly<Scalar> L = poly_L(p);
    const Poly<Scalar> Lpp = derivative(derivative(L));
    const Scalar root = s0(p);
    acc[L2T0].add(-L(Scalar(2) * tt), p);
    for (int k = 0; k < samples; ++k) {
      const Scalar s =
          Scalar(2) * tt + (root + Scalar(10) - Scalar(2) * tt) * Scalar(unit(rng));
      acc[CONVEX].add(Lpp(s), p);
    }
    // Certified count of roots of L beyond 2 t0.
    const RootSet<Scalar> roots = real_roots(L, Scalar(1e-10));
    int beyond = 0;
    for (const auto& r : roots.roots)
      if (r.location > Scalar(2) * tt) beyond += r.multiplicity;
    acc[UNIQUE].add(Scalar(beyond == 1 ? 1 : -1), p);
    const Scalar x = (p + Scalar(1)) / (p - Scalar(1)) * root;
    acc[X0GT5].add(x - Scalar(5), p);
    acc[X0CMP].add(x - Scalar(2) * (p + Scalar(1)) * tt / (p - Scalar(1)), p);
    if (p >= Scalar(2)) {
      acc[JNEG].add(-J(p), p);
      acc[JPNEG].add(-Jp(p), p);
      acc[JPPNEG].add(-Jpp(p), p);
    }
  }
  static const char* names[kCount] = {
      "L_negative_at_2t0", "L_convex_on_bracket", "unique_root_beyond_2t0",
      "x0_above_5",        "x0_above_comparison", "J_negative_for_p_ge_2",
      "J_prime_negative",  "J_second_negative"};
  VerificationReport rep;
  rep.grid = detail::describe(p_grid);
  rep.seed = seed;
  rep.samples_per_point = samples;
  rep.tol = 0;
  rep.mode = "margins (positive = satisfied)";
  for (int c = 0; c < kCount; ++c) {
    CheckResult r;
    r.name = names[c];
    r.worst_abs = acc[static_cast<std::size_t>(c)].worst_margin;
    r.worst_rel = r.worst_abs;
    r.failing_p = acc[static_cast<std::size_t>(c)].failing_p;
    r.samples = acc[static_cast<std::size_t>(c)].samples;
    r.pass = !r.failing_p.has_value() && r.samples > 0;
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

// Equivalence suite: the product condition a1 a2 > 1 against the sign of
// L(s) on random (p, s), and the beta-interval route against
// N < dim_threshold on the (p, N) product grid. Boolean equality, no
// tolerance.
template <typename Scalar>
VerificationReport verify_equivalences(const std::vector<Scalar>& p_grid, int n_min,
                                       int n_max, int samples = 50,
                                       std::uint64_t seed = 0x5eed0003ULL) {
  detail::require(n_min >= 5 && n_max >= n_min, "verify_equivalences: bad N range");
  for (Scalar p : p_grid)
    detail::require(p > Scalar(1), "verify_equivalences: all p must be > 1");
  detail::MarginAccum prod, beta;
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const Scalar p = p_grid[i];
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (i + 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Poly<Scalar> L = poly_L(p);
    const Scalar tt = t0(p);
    for (int k = 0; k < samples; ++k) {
      const Scalar s = Scalar(2) + (Scalar(2) * tt + Scalar(6)) * Scalar(unit(rng));
      const bool lhs = stability_product_condition(s, p);
      const bool rhs = L(s) < Scalar(0);
      prod.add(Scalar(lhs == rhs ? 1 : -1), p);
    }
    const Scalar threshold = dimension_threshold(p);
    for (int N = n_min; N <= n_max; ++N) {
      const bool lhs = nonexistence_via_beta(p, N);
      const bool rhs = Scalar(N) < threshold;
      beta.add(Scalar(lhs == rhs ? 1 : -1), p);
    }
  }
  VerificationReport rep;
  rep.grid = detail::describe(p_grid);
  rep.seed = seed;
  rep.samples_per_point = samples;
  rep.tol = 0;
  rep.mode = "boolean equivalences";
  for (auto* a : {&prod, &beta}) {
    CheckResult r;
    r.name = (a == &prod) ? "product_condition_matches_L_sign"
                          : "beta_route_matches_threshold";
    r.worst_abs = a->worst_margin;
    r.worst_rel = a->worst_margin;
    r.failing_p = a->failing_p;
    r.samples = a->samples;
    r.pass = !a->failing_p.has_value() && a->samples > 0;
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace liouville
