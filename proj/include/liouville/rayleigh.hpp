// Discretized second-variation Rayleigh quotient in radial coordinates:
//
//   Q[phi] = int |Delta phi|^2 r^{N-1} dr / ( p int w phi^2 r^{N-1} dr )
//
// minimized over C^1 piecewise-cubic (Hermite) trial functions of t = ln r
// that vanish with their derivative at both ends. In log radius the
// quadratic forms carry an e^{(N-4)t} weight whose dynamic range is removed
// by a diagonal DOF rescaling (a similarity transform, so the generalized
// eigenvalues are untouched). A minimal quotient below 1 certifies
// instability of the weight's solution; above 1 it is asymptotic evidence of
// stability on that domain only.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/exponents.hpp"
#include "liouville/radial.hpp"
#include "liouville/thresholds.hpp"

namespace liouville {

template <typename Scalar>
struct RayleighResult {
  Scalar min_quotient{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;  // minimizer DOFs
  Scalar r_lo{}, r_hi{};
  int basis_size = 0;  // retained trial functions (clamped DOFs)
  int elements = 0;
  Scalar eig_residual{};  // ||A x - lambda B x||_inf / ||A x||_inf
};

namespace detail {

// 10-point Gauss-Legendre rule on [0, 1].
template <typename Scalar>
void gauss10(std::array<Scalar, 10>& x, std::array<Scalar, 10>& w) {
  static const double xs[5] = {0.14887433898163122, 0.43339539412924721,
                               0.67940956829902441, 0.86506336668898451,
                               0.97390652851717172};
  static const double ws[5] = {0.29552422471475287, 0.26926671930999635,
                               0.21908636251598204, 0.14945134915058059,
                               0.066671344308688138};
  for (int i = 0; i < 5; ++i) {
    x[static_cast<std::size_t>(2 * i)] = Scalar(0.5) * (Scalar(1) - Scalar(xs[i]));
    x[static_cast<std::size_t>(2 * i + 1)] = Scalar(0.5) * (Scalar(1) + Scalar(xs[i]));
    w[static_cast<std::size_t>(2 * i)] = Scalar(0.5) * Scalar(ws[i]);
    w[static_cast<std::size_t>(2 * i + 1)] = Scalar(0.5) * Scalar(ws[i]);
  }
}

template <typename Scalar>
void hermite_shapes(Scalar s, std::array<Scalar, 4>& H, std::array<Scalar, 4>& dH,
                    std::array<Scalar, 4>& ddH) {
  const Scalar s2 = s * s, s3 = s2 * s;
  H = {Scalar(2) * s3 - Scalar(3) * s2 + Scalar(1), s3 - Scalar(2) * s2 + s,
       -Scalar(2) * s3 + Scalar(3) * s2, s3 - s2};
  dH = {Scalar(6) * s2 - Scalar(6) * s, Scalar(3) * s2 - Scalar(4) * s + Scalar(1),
        -Scalar(6) * s2 + Scalar(6) * s, Scalar(3) * s2 - Scalar(2) * s};
  ddH = {Scalar(12) * s - Scalar(6), Scalar(6) * s - Scalar(4),
         -Scalar(12) * s + Scalar(6), Scalar(6) * s - Scalar(2)};
}

}  // namespace detail

// Minimal generalized Rayleigh quotient for a radial weight w = u^{p-1}
// (given as a callable of r) on [r_lo, r_hi] with at least basis_size trial
// functions.
template <typename Scalar>
RayleighResult<Scalar> rayleigh_stability(const std::function<Scalar(Scalar)>& weight,
                                          Scalar p, int N, Scalar r_lo, Scalar r_hi,
                                          int basis_size) {
  detail::require(static_cast<bool>(weight), "rayleigh_stability: weight required");
  detail::require(p > Scalar(0), "rayleigh_stability: p must be positive");
  detail::require_domain(N >= 5, "rayleigh_stability: N >= 5 required");
  detail::require(r_lo > Scalar(0) && r_hi > r_lo, "rayleigh_stability: bad domain");
  detail::require(basis_size >= 8, "rayleigh_stability: basis_size >= 8 required");

  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const int M = std::max(5, (basis_size + 2 + 1) / 2);  // elements, 2M-2 >= basis_size
  const Scalar t_lo = std::log(r_lo), t_hi = std::log(r_hi);
  const Scalar h = (t_hi - t_lo) / Scalar(M);
  const Scalar alpha = Scalar(N - 4);
  const int ndof = 2 * (M + 1) - 4;  // clamped at both ends

  std::array<Scalar, 10> gx, gw;
  detail::gauss10(gx, gw);

  Matrix A = Matrix::Zero(ndof, ndof);
  Matrix B = Matrix::Zero(ndof, ndof);
  std::array<Scalar, 4> H, dH, ddH;
  for (int e = 0; e < M; ++e) {
    const Scalar ta = t_lo + Scalar(e) * h;
    // Global DOF ids of this element, -1 for clamped ones.
    const int gid[4] = {2 * e - 2, 2 * e - 1, 2 * e, 2 * e + 1};
    const Scalar tnode[4] = {ta, ta, ta + h, ta + h};
    Scalar Ae[4][4] = {}, Be[4][4] = {};
    for (int q = 0; q < 10; ++q) {
      const Scalar t = ta + gx[static_cast<std::size_t>(q)] * h;
      detail::hermite_shapes(gx[static_cast<std::size_t>(q)], H, dH, ddH);
      Scalar psi[4], lop[4];
      for (int i = 0; i < 4; ++i) {
        const Scalar slope_scale = (i % 2 == 1) ? h : Scalar(1);
        psi[i] = H[static_cast<std::size_t>(i)] * slope_scale;
        const Scalar d1 = dH[static_cast<std::size_t>(i)] * slope_scale / h;
        const Scalar d2 = ddH[static_cast<std::size_t>(i)] * slope_scale / (h * h);
        lop[i] = d2 + Scalar(N - 2) * d1;
      }
      const Scalar r = std::exp(t);
      const Scalar wt = weight(r);
      if (!(wt >= Scalar(0)) || !std::isfinite(static_cast<double>(wt)))
        throw std::invalid_argument("rayleigh_stability: weight must be finite and >= 0");
      const Scalar wtilde = wt * std::exp(Scalar(4) * t);  // w(e^t) e^{4t}
      const Scalar wq = gw[static_cast<std::size_t>(q)] * h;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          // Diagonal rescaling exp(-alpha t_node/2) folded into the element
          // integral; the exponent stays O(alpha h).
          const Scalar es =
              std::exp(alpha * (t - (tnode[i] + tnode[j]) / Scalar(2)));
          Ae[i][j] += wq * lop[i] * lop[j] * es;
          Be[i][j] += wq * wtilde * psi[i] * psi[j] * es;
        }
    }
    for (int i = 0; i < 4; ++i) {
      if (gid[i] < 0 || gid[i] >= ndof) continue;
      for (int j = 0; j < 4; ++j) {
        if (gid[j] < 0 || gid[j] >= ndof) continue;
        A(gid[i], gid[j]) += Ae[i][j];
        B(gid[i], gid[j]) += p * Be[i][j];
      }
    }
  }

  {
    Eigen::LLT<Matrix> llt(B);
    if (llt.info() != Eigen::Success)
      throw SolverError(
          "rayleigh_stability: weighted mass form is singular or indefinite "
          "(degenerate weight?)");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A, B,
                                                      Eigen::ComputeEigenvectors |
                                                          Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw SolverError("rayleigh_stability: generalized eigensolve failed");

  RayleighResult<Scalar> res;
  res.min_quotient = es.eigenvalues()(0);
  res.coefficients = es.eigenvectors().col(0);
  res.r_lo = r_lo;
  res.r_hi = r_hi;
  res.basis_size = ndof;
  res.elements = M;
  if (!std::isfinite(static_cast<double>(res.min_quotient)) ||
      res.min_quotient <= Scalar(0))
    throw SolverError("rayleigh_stability: discrete form lost positivity");
  const Vector ax = A * res.coefficients;
  const Vector rv = ax - res.min_quotient * (B * res.coefficients);
  res.eig_residual = rv.template lpNorm<Eigen::Infinity>() /
                     std::max(ax.template lpNorm<Eigen::Infinity>(),
                              std::numeric_limits<Scalar>::min());
  return res;
}

// Weight u^{p-1} from a stored radial profile, interpolated log-log linearly
// and extrapolated with the end slopes. The profile must be positive.
template <typename Scalar>
std::function<Scalar(Scalar)> weight_from_profile(const RadialSolution<Scalar>& sol) {
  detail::require(sol.size() >= 2, "weight_from_profile: profile too short");
  auto logs = std::make_shared<std::vector<std::array<Scalar, 2>>>();
  logs->reserve(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i) {
    detail::require(sol.u[i] > Scalar(0), "weight_from_profile: u must be positive");
    logs->push_back({std::log(sol.r[i]), std::log(sol.u[i])});
  }
  const Scalar pm1 = sol.p - Scalar(1);
  return [logs, pm1](Scalar r) {
    const Scalar x = std::log(r);
    const auto& v = *logs;
    std::size_t hi = 1;
    if (x >= v.back()[0])
      hi = v.size() - 1;
    else
      while (v[hi][0] < x) ++hi;
    const auto& a = v[hi - 1];
    const auto& b = v[hi];
    const Scalar logu = a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]);
    return std::exp(pm1 * logu);
  };
}

template <typename Scalar>
struct QuotientSample {
  Scalar decades;
  Scalar min_quotient;
};

template <typename Scalar>
struct StabilityConsistency {
  Scalar p{};
  int N{};
  Scalar algebraic_ratio{};  // Hardy-Rellich constant / (p Q4(-4/(p-1)))
  std::vector<QuotientSample<Scalar>> trajectory;
  bool rayleigh_unstable = false;  // sound: some finite-domain quotient < 1
  SingularClass classification{};
  bool agree = false;
};

// Runs the discrete Rayleigh test on the singular weight
// Q4(-4/(p-1)) r^{-4} over widening log-domains (aligned grids) and compares
// the verdict with the algebraic classification. An instability verdict is
// sound; a stability verdict is finite-domain evidence only.
template <typename Scalar>
StabilityConsistency<Scalar> stability_consistency(Scalar p, int N,
                                                   int max_decades = 6,
                                                   int basis_size = 384) {
  detail::require(p > sobolev_critical<Scalar>(N),
                  "stability_consistency: supercritical p required");
  StabilityConsistency<Scalar> rep;
  rep.p = p;
  rep.N = N;
  const Scalar q4 = Q4(-Scalar(4) / (p - Scalar(1)), N);
  rep.algebraic_ratio = hardy_rellich_constant<Scalar>(N) / (p * q4);
  rep.classification = classify_singular_solution(p, N);
  const auto weight = [q4](Scalar r) { return q4 / (r * r * r * r); };

  // Three nested domains with a common element size.
  const int m_max = 3 * ((basis_size + 2 + 5) / 6);
  for (int k = 1; k <= 3; ++k) {
    const Scalar dec = Scalar(max_decades) * Scalar(k) / Scalar(3);
    const Scalar half = std::pow(Scalar(10), dec / Scalar(2));
    const int basis_k = std::max(8, 2 * (m_max * k / 3) - 2);
    const auto r = rayleigh_stability<Scalar>(weight, p, N, Scalar(1) / half, half,
                                              basis_k);
    rep.trajectory.push_back({dec, r.min_quotient});
    if (r.min_quotient < Scalar(1)) rep.rayleigh_unstable = true;
  }
  rep.agree = rep.rayleigh_unstable == (rep.classification == SingularClass::unstable);
  return rep;
}

}  // namespace liouville
