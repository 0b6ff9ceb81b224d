// Closed-form exponents, constants and polynomial families for the
// biharmonic stability problem, parametrized by (p, N).
#pragma once

#include <cmath>
#include <optional>

#include "liouville/errors.hpp"
#include "liouville/polynomial.hpp"

namespace liouville {

// Parameter pair shared by every formula. N is absent for p-only quantities.
template <typename Scalar>
struct ProblemParams {
  Scalar p;
  std::optional<int> N;

  // Whole-space statements need N >= 5; the bounded-domain regularity report
  // accepts any N >= 1.
  void validate(bool whole_space = true) const {
    detail::require(p > Scalar(1), "ProblemParams: p must be > 1");
    if (N) {
      if (whole_space)
        detail::require_domain(*N >= 5, "ProblemParams: N >= 5 required");
      else
        detail::require_domain(*N >= 1, "ProblemParams: N >= 1 required");
    }
  }
};

// (N+4)/(N-4), the critical exponent separating existence regimes.
template <typename Scalar>
Scalar sobolev_critical(int N) {
  detail::require_domain(N >= 5, "sobolev_critical: N >= 5 required");
  return Scalar(N + 4) / Scalar(N - 4);
}

// t0 = sqrt(2p/(p+1)) + sqrt(2p/(p+1) - sqrt(2p/(p+1))); > 1 for p > 1.
template <typename Scalar>
Scalar t0(Scalar p) {
  detail::require(p > Scalar(1), "t0: p must be > 1");
  const Scalar w = Scalar(2) * p / (p + Scalar(1));
  const Scalar sw = std::sqrt(w);
  return sw + std::sqrt(w - sw);
}

// L(s) = s^4 - 32p/(p+1) s^2 + 32p(p+3)/(p+1)^2 s - 64p/(p+1)^2.
template <typename Scalar>
Poly<Scalar> poly_L(Scalar p) {
  detail::require(p > Scalar(1), "poly_L: p must be > 1");
  const Scalar q1 = p + Scalar(1);
  return Poly<Scalar>{-Scalar(64) * p / (q1 * q1),
                      Scalar(32) * p * (p + Scalar(3)) / (q1 * q1),
                      -Scalar(32) * p / q1, Scalar(0), Scalar(1)};
}

// H(x) = x^4 - 32p(p+1)/(p-1)^2 x^2 + 32p(p+1)(p+3)/(p-1)^3 x
//        - 64p(p+1)^2/(p-1)^4.
// The coefficients blow up like (p-1)^{-4} near p = 1; threshold computations
// prefer the L/s coordinate and only materialize H for p >= 1 + 1e-3.
template <typename Scalar>
Poly<Scalar> poly_H(Scalar p) {
  detail::require(p > Scalar(1), "poly_H: p must be > 1");
  const Scalar d = p - Scalar(1), q1 = p + Scalar(1);
  return Poly<Scalar>{-Scalar(64) * p * q1 * q1 / (d * d * d * d),
                      Scalar(32) * p * q1 * (p + Scalar(3)) / (d * d * d),
                      -Scalar(32) * p * q1 / (d * d), Scalar(0), Scalar(1)};
}

// H_JL4(x) = (x^2-1)^2 + (H(x) - x^4), expanded; H - H_JL4 = 2x^2 - 1.
template <typename Scalar>
Poly<Scalar> poly_HJL4(Scalar p) {
  const Poly<Scalar> h = poly_H(p);
  return Poly<Scalar>{h[0] + Scalar(1), h[1], h[2] - Scalar(2), Scalar(0), Scalar(1)};
}

// J(p) = -15 p^4 - 1284 p^3 + 4262 p^2 - 3844 p + 625, i.e. (p-1)^4 H(5)
// viewed as a polynomial in p.
template <typename Scalar>
Poly<Scalar> poly_J() {
  return Poly<Scalar>{Scalar(625), Scalar(-3844), Scalar(4262), Scalar(-1284),
                      Scalar(-15)};
}

// Q4(m) = m(m-2)(m+N-2)(m+N-4).
template <typename Scalar>
Scalar Q4(Scalar m, int N) {
  return m * (m - Scalar(2)) * (m + Scalar(N - 2)) * (m + Scalar(N - 4));
}

// Best constant of the Hardy-Rellich inequality, N^2(N-4)^2/16.
template <typename Scalar>
Scalar hardy_rellich_constant(int N) {
  detail::require_domain(N >= 5, "hardy_rellich_constant: N >= 5 required");
  const Scalar n = Scalar(N), m = Scalar(N - 4);
  return n * n * m * m / Scalar(16);
}

// The affine dimension map N = 2 + 2x and its inverse.
template <typename Scalar>
Scalar x_from_dim(Scalar N) {
  return (N - Scalar(2)) / Scalar(2);
}

template <typename Scalar>
Scalar dim_from_x(Scalar x) {
  return Scalar(2) + Scalar(2) * x;
}

// The exponent coupling 2q = (p+1)r + p - 1, equivalently
// q + 1 = (p+1)(r+1)/2.
template <typename Scalar>
struct Coupling {
  Scalar q;
  Scalar q_plus_1;
};

template <typename Scalar>
Coupling<Scalar> coupling_q_from_r(Scalar r, Scalar p) {
  detail::require(r >= Scalar(1), "coupling_q_from_r: r >= 1 required");
  detail::require(p > Scalar(1), "coupling_q_from_r: p must be > 1");
  return {((p + Scalar(1)) * r + p - Scalar(1)) / Scalar(2),
          (p + Scalar(1)) * (r + Scalar(1)) / Scalar(2)};
}

template <typename Scalar>
Scalar a1(Scalar q, Scalar p) {
  detail::require(q >= Scalar(1), "a1: q >= 1 required");
  detail::require(p > Scalar(1), "a1: p must be > 1");
  return Scalar(4) * q * std::sqrt(p) / ((q + Scalar(1)) * (q + Scalar(1)));
}

template <typename Scalar>
Scalar a2(Scalar r, Scalar p) {
  detail::require(r >= Scalar(1), "a2: r >= 1 required");
  detail::require(p > Scalar(1), "a2: p must be > 1");
  return Scalar(4) * r * std::sqrt(p) / ((r + Scalar(1)) * (r + Scalar(1)));
}

// a1*a2 > 1 with r = s-1 and q from the coupling. Agrees with L(s) < 0;
// both sides are computed through independent routes.
template <typename Scalar>
bool stability_product_condition(Scalar s, Scalar p) {
  detail::require(s >= Scalar(2), "stability_product_condition: s >= 2 required");
  const Scalar r = s - Scalar(1);
  const Coupling<Scalar> c = coupling_q_from_r(r, p);
  return a1(c.q, p) * a2(r, p) > Scalar(1);
}

}  // namespace liouville
