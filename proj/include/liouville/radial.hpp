// Radial shooting for the system -Delta u = v, -Delta v = u^p on (0, r_max]:
// series-initialized adaptive Runge-Kutta integration with event detection,
// bisection shooting in a = v(0), far-field tail fits and the pointwise
// Souplet inequality check.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/exponents.hpp"

namespace liouville {

enum class RadialEvent { reached_rmax, u_crossed_zero, v_crossed_zero, blowup };

inline const char* to_string(RadialEvent e) {
  switch (e) {
    case RadialEvent::reached_rmax: return "reached_rmax";
    case RadialEvent::u_crossed_zero: return "u_crossed_zero";
    case RadialEvent::v_crossed_zero: return "v_crossed_zero";
    case RadialEvent::blowup: return "blowup";
  }
  return "?";
}

template <typename Scalar>
struct IntegrationControls {
  Scalar r_start = Scalar(1e-4);  // series handoff radius, rescaled by 1/sqrt(1+|a|)
  Scalar rel_tol = Scalar(1e-10);
  Scalar abs_tol = Scalar(1e-13);
  Scalar blowup_threshold = Scalar(1e10);
  long max_steps = 2000000;
};

// Discretized radial profile with radial derivatives and the terminating
// event. The grid starts at the (singular-origin) series handoff radius.
template <typename Scalar>
struct RadialSolution {
  Scalar p{};
  int N{};
  Scalar a{};
  std::vector<Scalar> r, u, du, v, dv;
  RadialEvent event = RadialEvent::reached_rmax;
  Scalar event_radius{};

  std::size_t size() const { return r.size(); }
};

namespace detail {

// Signed power keeps the nonlinearity odd (u > 0 is the regime of interest;
// intermediate stages may dip below zero near the crossing event).
template <typename Scalar>
Scalar signed_pow(Scalar u, Scalar p) {
  return u == Scalar(0) ? Scalar(0) : std::copysign(std::pow(std::abs(u), p), u);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> radial_rhs(Scalar r, const Eigen::Matrix<Scalar, 4, 1>& y,
                                       Scalar p, int N) {
  Eigen::Matrix<Scalar, 4, 1> f;
  const Scalar k = Scalar(N - 1) / r;
  f[0] = y[1];
  f[1] = -y[2] - k * y[1];
  f[2] = y[3];
  f[3] = -signed_pow(y[0], p) - k * y[3];
  return f;
}

// Cubic Hermite value on [0, 1] from endpoint values and scaled slopes.
template <typename Scalar>
Scalar hermite(Scalar f0, Scalar m0, Scalar f1, Scalar m1, Scalar t) {
  const Scalar t2 = t * t, t3 = t2 * t;
  return (Scalar(2) * t3 - Scalar(3) * t2 + Scalar(1)) * f0 + (t3 - Scalar(2) * t2 + t) * m0 +
         (-Scalar(2) * t3 + Scalar(3) * t2) * f1 + (t3 - t2) * m1;
}

}  // namespace detail

// Series initial data at the handoff radius: matched from Delta(r^2) = 2N and
// Delta(r^4) = (4N+8) r^2, truncation error O(r^6).
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> series_state(Scalar p, int N, Scalar a, Scalar r) {
  const Scalar n = Scalar(N);
  const Scalar c4 = Scalar(1) / (Scalar(8) * n * (n + Scalar(2)));
  Eigen::Matrix<Scalar, 4, 1> y;
  y[0] = Scalar(1) - a * r * r / (Scalar(2) * n) + r * r * r * r * c4;
  y[1] = -a * r / n + Scalar(4) * r * r * r * c4;
  y[2] = a - r * r / (Scalar(2) * n) + p * a * r * r * r * r * c4;
  y[3] = -r / n + Scalar(4) * p * a * r * r * r * c4;
  return y;
}

// Integrates from the series start until the first event or r_max, with an
// embedded 5(4) Runge-Kutta pair and a deterministic step policy. Profiles
// are stored at every accepted step.
template <typename Scalar>
RadialSolution<Scalar> integrate(Scalar p, int N, Scalar a, Scalar r_max,
                                 const IntegrationControls<Scalar>& ctl = {}) {
  detail::require(p > Scalar(1), "integrate: p must be > 1");
  detail::require_domain(N >= 5, "integrate: N >= 5 required");
  detail::require(r_max > Scalar(0), "integrate: r_max must be positive");

  using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
  RadialSolution<Scalar> sol;
  sol.p = p;
  sol.N = N;
  sol.a = a;

  Scalar r = ctl.r_start / std::sqrt(Scalar(1) + std::abs(a));
  r = std::min(r, r_max / Scalar(2));
  Vec4 y = series_state(p, N, a, r);

  auto push = [&](Scalar rr, const Vec4& yy) {
    sol.r.push_back(rr);
    sol.u.push_back(yy[0]);
    sol.du.push_back(yy[1]);
    sol.v.push_back(yy[2]);
    sol.dv.push_back(yy[3]);
  };
  push(r, y);

  if (y[0] <= Scalar(0) || y[2] <= Scalar(0)) {
    sol.event = y[0] <= Scalar(0) ? RadialEvent::u_crossed_zero : RadialEvent::v_crossed_zero;
    sol.event_radius = r;
    return sol;
  }

  // Dormand-Prince 5(4) tableau.
  static const Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                      c5 = Scalar(8) / 9;
  static const Scalar a21 = Scalar(1) / 5;
  static const Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  static const Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  static const Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                      a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  static const Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                      a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                      a65 = Scalar(-5103) / 18656;
  static const Scalar b1 = Scalar(35) / 384, b3 = Scalar(500) / 1113,
                      b4 = Scalar(125) / 192, b5 = Scalar(-2187) / 6784,
                      b6 = Scalar(11) / 84;
  static const Scalar e1 = b1 - Scalar(5179) / 57600, e3 = b3 - Scalar(7571) / 16695,
                      e4 = b4 - Scalar(393) / 640, e5 = b5 + Scalar(92097) / 339200,
                      e6 = b6 - Scalar(187) / 2100, e7 = Scalar(-1) / 40;

  Scalar h = r * Scalar(0.01);
  Vec4 k1 = detail::radial_rhs(r, y, p, N);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  for (long step = 0; step < ctl.max_steps; ++step) {
    if (h < Scalar(32) * eps * r) {
      std::ostringstream os;
      os << "integrate: step underflow at radius r=" << static_cast<double>(r);
      throw ConvergenceError(os.str());
    }
    h = std::min(h, r_max - r);
    const Vec4 k2 = detail::radial_rhs(r + c2 * h, Vec4(y + h * a21 * k1), p, N);
    const Vec4 k3 =
        detail::radial_rhs(r + c3 * h, Vec4(y + h * (a31 * k1 + a32 * k2)), p, N);
    const Vec4 k4 = detail::radial_rhs(
        r + c4 * h, Vec4(y + h * (a41 * k1 + a42 * k2 + a43 * k3)), p, N);
    const Vec4 k5 = detail::radial_rhs(
        r + c5 * h, Vec4(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), p, N);
    const Vec4 k6 = detail::radial_rhs(
        r + h, Vec4(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), p,
        N);
    const Vec4 ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec4 k7 = detail::radial_rhs(r + h, ynew, p, N);
    const Vec4 errv =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    Scalar errnorm = 0;
    for (int i = 0; i < 4; ++i) {
      const Scalar sc =
          ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const Scalar q = errv[i] / sc;
      errnorm += q * q;
    }
    errnorm = std::sqrt(errnorm / Scalar(4));

    if (errnorm <= Scalar(1)) {
      const Scalar rnew = r + h;
      // State events, checked on the accepted step; the crossing is located
      // on the cubic Hermite interpolant of the step. When both components
      // cross inside one step, the earlier crossing wins.
      if (ynew[0] <= Scalar(0) || ynew[2] <= Scalar(0)) {
        auto cross_theta = [&](int c) {
          Scalar tlo = 0, thi = 1;
          for (int it = 0; it < 60; ++it) {
            const Scalar tm = (tlo + thi) / Scalar(2);
            const Scalar vm =
                detail::hermite(y[c], h * y[c + 1], ynew[c], h * ynew[c + 1], tm);
            if (vm > Scalar(0))
              tlo = tm;
            else
              thi = tm;
          }
          return thi;
        };
        const Scalar tu = ynew[0] <= Scalar(0) ? cross_theta(0) : Scalar(2);
        const Scalar tv = ynew[2] <= Scalar(0) ? cross_theta(2) : Scalar(2);
        const int comp = tu <= tv ? 0 : 2;
        const Scalar te = std::min(tu, tv);
        Vec4 ye;
        for (int i = 0; i < 4; i += 2)
          ye[i] = detail::hermite(y[i], h * y[i + 1], ynew[i], h * ynew[i + 1], te);
        for (int i = 1; i < 4; i += 2) ye[i] = y[i] + te * (ynew[i] - y[i]);
        const Scalar re = r + te * h;
        push(re, ye);
        sol.event =
            comp == 0 ? RadialEvent::u_crossed_zero : RadialEvent::v_crossed_zero;
        sol.event_radius = re;
        return sol;
      }
      push(rnew, ynew);
      if (ynew.template lpNorm<Eigen::Infinity>() >= ctl.blowup_threshold) {
        sol.event = RadialEvent::blowup;
        sol.event_radius = rnew;
        return sol;
      }
      if (rnew >= r_max) {
        sol.event = RadialEvent::reached_rmax;
        sol.event_radius = rnew;
        return sol;
      }
      r = rnew;
      y = ynew;
      k1 = k7;  // FSAL
      const Scalar grow =
          errnorm == Scalar(0)
              ? Scalar(5)
              : std::min(Scalar(5), std::max(Scalar(0.2),
                                             Scalar(0.9) * std::pow(errnorm, Scalar(-0.2))));
      h *= grow;
    } else {
      h *= std::max(Scalar(0.2), Scalar(0.9) * std::pow(errnorm, Scalar(-0.2)));
    }
  }
  throw ConvergenceError("integrate: step budget exhausted");
}

template <typename Scalar>
struct ShootResult {
  Scalar a_star{};
  Scalar bracket_lo{}, bracket_hi{};
  RadialEvent class_low{}, class_high{};  // empirical event orientation
  RadialSolution<Scalar> deepest;
  int integrations = 0;
};

// Bisection in the shooting parameter a between the two event classes.
// The orientation (which event occurs for small / large a) is observed at
// runtime, not assumed. A midpoint that reaches r_max terminates the search.
template <typename Scalar>
ShootResult<Scalar> shoot(Scalar p, int N, Scalar tol, Scalar r_max = Scalar(1e3),
                          const IntegrationControls<Scalar>& ctl = {}) {
  detail::require(tol > Scalar(0), "shoot: tol must be positive");
  detail::require(p > sobolev_critical<Scalar>(N),
                  "shoot: supercritical p > (N+4)/(N-4) required");

  ShootResult<Scalar> res;
  auto run = [&](Scalar a) {
    ++res.integrations;
    RadialSolution<Scalar> s = integrate(p, N, a, r_max, ctl);
    if (res.deepest.size() == 0 || s.event_radius > res.deepest.event_radius)
      res.deepest = s;
    return s;
  };

  Scalar lo = Scalar(0);
  const RadialSolution<Scalar> first = run(lo);
  res.class_low = first.event;
  if (first.event == RadialEvent::reached_rmax) {
    res.a_star = lo;
    res.bracket_lo = res.bracket_hi = lo;
    res.class_high = first.event;
    return res;
  }

  Scalar hi = Scalar(1);
  RadialEvent cls_hi = res.class_low;
  for (int k = 0; k < 48; ++k) {
    const RadialSolution<Scalar> probe = run(hi);
    cls_hi = probe.event;
    if (probe.event == RadialEvent::reached_rmax) {
      res.a_star = hi;
      res.bracket_lo = lo;
      res.bracket_hi = hi;
      res.class_high = probe.event;
      return res;
    }
    if (probe.event != res.class_low) break;
    lo = hi;
    hi *= Scalar(2);
    if (k == 47) {
      std::ostringstream os;
      os << "shoot: both endpoints terminate with event '" << to_string(res.class_low)
         << "' up to a=" << static_cast<double>(hi);
      throw BracketingError(os.str());
    }
  }
  res.class_high = cls_hi;

  while (hi - lo > tol * std::max(Scalar(1), std::abs(hi))) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid == lo || mid == hi) break;
    const RadialSolution<Scalar> s = run(mid);
    if (s.event == RadialEvent::reached_rmax) {
      res.a_star = mid;
      res.bracket_lo = lo;
      res.bracket_hi = hi;
      return res;
    }
    if (s.event == res.class_low)
      lo = mid;
    else
      hi = mid;
  }
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.a_star = lo + (hi - lo) / Scalar(2);
  return res;
}

namespace detail {

template <typename Scalar>
std::size_t last_decade_begin(const std::vector<Scalar>& r) {
  const Scalar cut = r.back() / Scalar(10);
  std::size_t i = 0;
  while (i < r.size() && r[i] < cut) ++i;
  return i;
}

}  // namespace detail

// Least-squares slope of log u against log r over the last decade of radii.
// Requires a full (reached_rmax) positive profile and at least 10 points.
template <typename Scalar>
Scalar tail_exponent(const RadialSolution<Scalar>& sol) {
  detail::require(sol.event == RadialEvent::reached_rmax,
                  "tail_exponent: profile must reach r_max");
  for (Scalar ui : sol.u)
    detail::require(ui > Scalar(0), "tail_exponent: u must stay positive");
  const std::size_t begin = detail::last_decade_begin(sol.r);
  const std::size_t n = sol.r.size() - begin;
  detail::require(n >= 10, "tail_exponent: fewer than 10 points in the last decade");
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < sol.r.size(); ++i) {
    const Scalar x = std::log(sol.r[i]), y = std::log(sol.u[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Scalar m = Scalar(n);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Amplitude K of the power-law model u = K r^exponent, fitted over the last
// decade with the exponent pinned.
template <typename Scalar>
Scalar tail_amplitude(const RadialSolution<Scalar>& sol, Scalar exponent) {
  detail::require(sol.event == RadialEvent::reached_rmax,
                  "tail_amplitude: profile must reach r_max");
  for (Scalar ui : sol.u)
    detail::require(ui > Scalar(0), "tail_amplitude: u must stay positive");
  const std::size_t begin = detail::last_decade_begin(sol.r);
  const std::size_t n = sol.r.size() - begin;
  detail::require(n >= 10, "tail_amplitude: fewer than 10 points in the last decade");
  Scalar acc = 0;
  for (std::size_t i = begin; i < sol.r.size(); ++i)
    acc += std::log(sol.u[i]) - exponent * std::log(sol.r[i]);
  return std::exp(acc / Scalar(n));
}

template <typename Scalar>
struct SoupletReport {
  Scalar max_violation;  // max over the grid of sqrt(2/(p+1)) u^{(p+1)/2} - v
  Scalar min_v;
};

// Pointwise check of the Souplet estimate v >= sqrt(2/(p+1)) u^{(p+1)/2}
// on the stored grid; also reports min v.
template <typename Scalar>
SoupletReport<Scalar> souplet_check(const RadialSolution<Scalar>& sol) {
  detail::require(sol.size() > 0, "souplet_check: empty profile");
  const Scalar beta = std::sqrt(Scalar(2) / (sol.p + Scalar(1)));
  const Scalar half_exp = (sol.p + Scalar(1)) / Scalar(2);
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  Scalar minv = std::numeric_limits<Scalar>::infinity();
  for (std::size_t i = 0; i < sol.size(); ++i) {
    detail::require(sol.u[i] >= Scalar(0), "souplet_check: u must be nonnegative");
    worst = std::max(worst, beta * std::pow(sol.u[i], half_exp) - sol.v[i]);
    minv = std::min(minv, sol.v[i]);
  }
  return {worst, minv};
}

// Log-log slope, over the last decade, of the cumulative integral
// int_{r<=R} (v^2 + u^{p+1}) r^{N-1} dr (trapezoid rule).
template <typename Scalar>
Scalar mass_growth_exponent(const RadialSolution<Scalar>& sol) {
  detail::require(sol.size() >= 16, "mass_growth_exponent: profile too short");
  std::vector<Scalar> cum(sol.size(), Scalar(0));
  auto density = [&](std::size_t i) {
    return (sol.v[i] * sol.v[i] + std::pow(std::abs(sol.u[i]), sol.p + Scalar(1))) *
           std::pow(sol.r[i], Scalar(sol.N - 1));
  };
  for (std::size_t i = 1; i < sol.size(); ++i)
    cum[i] = cum[i - 1] +
             (density(i) + density(i - 1)) / Scalar(2) * (sol.r[i] - sol.r[i - 1]);
  const std::size_t begin = detail::last_decade_begin(sol.r);
  detail::require(sol.size() - begin >= 10,
                  "mass_growth_exponent: fewer than 10 points in the last decade");
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (std::size_t i = begin; i < sol.size(); ++i) {
    if (cum[i] <= Scalar(0)) continue;
    const Scalar x = std::log(sol.r[i]), y = std::log(cum[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  detail::require(n >= 10, "mass_growth_exponent: insufficient positive mass data");
  const Scalar m = Scalar(n);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace liouville
