// Dense univariate real polynomials with certified real-root isolation.
//
// Coefficients are stored in ascending degree order. Root isolation uses a
// Sturm chain on the square-free part (sign-variation counts), followed by
// bisection with an optional Newton polish. Every returned root carries a
// certified enclosure half-width.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/errors.hpp"

namespace liouville {

inline constexpr double kDefaultRootTol = 1e-10;

template <typename Scalar>
class Poly {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Largest degree the library ever needs (paper polynomials are quartic,
  // head-room for products of two of them).
  static constexpr int kMaxDegree = 8;

  Poly() : coeffs_(Vector::Zero(1)) {}

  // Ascending coefficients; exact zero leading terms are trimmed.
  explicit Poly(Vector coeffs) : coeffs_(std::move(coeffs)) {
    detail::require(coeffs_.size() > 0, "Poly: empty coefficient vector");
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_[n - 1] == Scalar(0)) --n;
    coeffs_.conservativeResize(n);
    detail::require(coeffs_.size() - 1 <= kMaxDegree,
                    "Poly: degree exceeds supported maximum (8)");
  }

  Poly(std::initializer_list<Scalar> ascending)
      : Poly(Eigen::Map<const Vector>(ascending.begin(),
                                      static_cast<Eigen::Index>(ascending.size()))
                 .eval()) {}

  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Scalar(0); }

  // Degree of the zero polynomial is reported as -1.
  int degree() const { return is_zero() ? -1 : static_cast<int>(coeffs_.size()) - 1; }

  const Vector& coeffs() const { return coeffs_; }

  Scalar operator[](int i) const {
    return i >= 0 && i < coeffs_.size() ? coeffs_[i] : Scalar(0);
  }

  // Horner evaluation.
  Scalar operator()(Scalar x) const {
    Scalar acc = coeffs_[coeffs_.size() - 1];
    for (Eigen::Index i = coeffs_.size() - 2; i >= 0; --i) acc = acc * x + coeffs_[i];
    return acc;
  }

 private:
  Vector coeffs_;
};

template <typename Scalar>
Scalar eval(const Poly<Scalar>& f, Scalar x) {
  return f(x);
}

// Value together with the magnitude sum sum_i |c_i| |x|^i. The scale bounds
// the roundoff of the Horner evaluation and is the natural residual
// denominator for identity checks.
template <typename Scalar>
struct EvalWithScale {
  Scalar value;
  Scalar scale;
};

template <typename Scalar>
EvalWithScale<Scalar> eval_with_scale(const Poly<Scalar>& f, Scalar x) {
  const auto& c = f.coeffs();
  Scalar acc = c[c.size() - 1];
  Scalar mag = std::abs(acc);
  const Scalar ax = std::abs(x);
  for (Eigen::Index i = c.size() - 2; i >= 0; --i) {
    acc = acc * x + c[i];
    mag = mag * ax + std::abs(c[i]);
  }
  return {acc, mag};
}

template <typename Scalar>
Poly<Scalar> derivative(const Poly<Scalar>& f) {
  if (f.degree() <= 0) return Poly<Scalar>{};
  typename Poly<Scalar>::Vector d(f.degree());
  for (int i = 1; i <= f.degree(); ++i) d[i - 1] = Scalar(i) * f.coeffs()[i];
  return Poly<Scalar>(std::move(d));
}

template <typename Scalar>
struct RootEnclosure {
  Scalar location;
  Scalar half_width;   // certified enclosure half-width
  int multiplicity;    // > 1 when a multiple root or unresolved cluster
};

template <typename Scalar>
struct RootSet {
  std::vector<RootEnclosure<Scalar>> roots;  // strictly increasing by location
  std::string method = "sturm+bisection";

  bool empty() const { return roots.empty(); }
  std::size_t size() const { return roots.size(); }
};

namespace detail {

template <typename Scalar>
using CoeffVec = std::vector<Scalar>;

template <typename Scalar>
int vec_degree(const CoeffVec<Scalar>& c) {
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
    if (c[i] != Scalar(0)) return i;
  return -1;
}

template <typename Scalar>
void vec_trim(CoeffVec<Scalar>& c, Scalar tol) {
  int d = static_cast<int>(c.size()) - 1;
  while (d >= 0 && std::abs(c[d]) <= tol) --d;
  c.resize(static_cast<std::size_t>(d + 1));
}

template <typename Scalar>
Scalar vec_maxabs(const CoeffVec<Scalar>& c) {
  Scalar m = 0;
  for (Scalar v : c) m = std::max(m, std::abs(v));
  return m;
}

template <typename Scalar>
void vec_normalize(CoeffVec<Scalar>& c) {
  Scalar m = vec_maxabs(c);
  if (m > Scalar(0))
    for (Scalar& v : c) v /= m;
}

template <typename Scalar>
Scalar vec_eval(const CoeffVec<Scalar>& c, Scalar x) {
  Scalar acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

template <typename Scalar>
CoeffVec<Scalar> vec_derivative(const CoeffVec<Scalar>& c) {
  if (c.size() <= 1) return {};
  CoeffVec<Scalar> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = Scalar(i) * c[i];
  return d;
}

// Remainder of a by b (b already trimmed, deg b >= 0).
template <typename Scalar>
CoeffVec<Scalar> vec_rem(CoeffVec<Scalar> a, const CoeffVec<Scalar>& b) {
  const int db = static_cast<int>(b.size()) - 1;
  const Scalar lead = b[static_cast<std::size_t>(db)];
  for (int da = static_cast<int>(a.size()) - 1; da >= db;
       da = static_cast<int>(a.size()) - 1) {
    const Scalar q = a[static_cast<std::size_t>(da)] / lead;
    for (int k = 0; k <= db; ++k)
      a[static_cast<std::size_t>(da - db + k)] -= q * b[static_cast<std::size_t>(k)];
    a.resize(static_cast<std::size_t>(da));  // forced cancellation of the top term
    if (a.empty()) break;
  }
  return a;
}

// Quotient of a by b, remainder discarded (used after a gcd was established,
// where the true remainder vanishes).
template <typename Scalar>
CoeffVec<Scalar> vec_quot(CoeffVec<Scalar> a, const CoeffVec<Scalar>& b) {
  const int db = static_cast<int>(b.size()) - 1;
  const int da = static_cast<int>(a.size()) - 1;
  if (da < db) return {};
  CoeffVec<Scalar> q(static_cast<std::size_t>(da - db + 1), Scalar(0));
  const Scalar lead = b[static_cast<std::size_t>(db)];
  for (int i = da; i >= db; --i) {
    const Scalar f = a[static_cast<std::size_t>(i)] / lead;
    q[static_cast<std::size_t>(i - db)] = f;
    for (int k = 0; k <= db; ++k)
      a[static_cast<std::size_t>(i - db + k)] -= f * b[static_cast<std::size_t>(k)];
  }
  return q;
}

// Approximate gcd via the Euclidean chain with a relative truncation
// threshold. Returns a constant ({1}) when the inputs are coprime at the
// working precision.
template <typename Scalar>
CoeffVec<Scalar> vec_gcd(CoeffVec<Scalar> a, CoeffVec<Scalar> b) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  vec_normalize(a);
  vec_normalize(b);
  while (true) {
    if (vec_degree(b) < 0) return a;
    if (vec_degree(b) == 0) return {Scalar(1)};
    CoeffVec<Scalar> r = vec_rem(a, b);
    vec_trim(r, Scalar(64) * eps * std::max(Scalar(1), vec_maxabs(r)));
    a = std::move(b);
    b = std::move(r);
    vec_normalize(b);
  }
}

// Sturm chain of a (square-free) polynomial; every element normalized by its
// own max coefficient (a positive factor, so sign variations are unchanged).
template <typename Scalar>
std::vector<CoeffVec<Scalar>> sturm_chain(const CoeffVec<Scalar>& f) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  std::vector<CoeffVec<Scalar>> chain;
  chain.push_back(f);
  chain.push_back(vec_derivative(f));
  vec_normalize(chain.back());
  while (vec_degree(chain.back()) > 0) {
    CoeffVec<Scalar> r = vec_rem(chain[chain.size() - 2], chain.back());
    vec_trim(r, Scalar(64) * eps * std::max(Scalar(1), vec_maxabs(r)));
    if (vec_degree(r) < 0) break;
    for (Scalar& v : r) v = -v;
    vec_normalize(r);
    chain.push_back(std::move(r));
  }
  return chain;
}

// Sign variations of the chain at x; values at roundoff level are treated as
// zero and skipped, per the generalized Sturm counting rule.
template <typename Scalar>
int sturm_variations(const std::vector<CoeffVec<Scalar>>& chain, Scalar x) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  int vars = 0, last = 0;
  for (const auto& c : chain) {
    Scalar v = 0, mag = 0;
    const Scalar ax = std::abs(x);
    for (std::size_t i = c.size(); i-- > 0;) {
      v = v * x + c[i];
      mag = mag * ax + std::abs(c[i]);
    }
    int s = (std::abs(v) <= Scalar(32) * eps * mag) ? 0 : (v > 0 ? 1 : -1);
    if (s != 0) {
      if (last != 0 && s != last) ++vars;
      last = s;
    }
  }
  return vars;
}

// Number of distinct real roots in (a, b].
template <typename Scalar>
int sturm_count(const std::vector<CoeffVec<Scalar>>& chain, Scalar a, Scalar b) {
  return std::max(0, sturm_variations(chain, a) - sturm_variations(chain, b));
}

// Fujiwara bound: all roots lie in [-B, B].
template <typename Scalar>
Scalar root_bound(const CoeffVec<Scalar>& c) {
  const int n = vec_degree(c);
  const Scalar lead = std::abs(c[static_cast<std::size_t>(n)]);
  Scalar b = 0;
  for (int k = 1; k <= n; ++k) {
    const Scalar ratio = std::abs(c[static_cast<std::size_t>(n - k)]) / lead;
    b = std::max(b, std::pow(ratio, Scalar(1) / Scalar(k)));
  }
  return Scalar(2) * b + Scalar(1);
}

template <typename Scalar>
[[noreturn]] void throw_interval_failure(const char* what, Scalar lo, Scalar hi) {
  std::ostringstream os;
  os << what << " on interval [" << static_cast<double>(lo) << ", "
     << static_cast<double>(hi) << "]";
  throw ConvergenceError(os.str());
}

// Bisection refinement of a simple root inside (lo, hi]. Raw computed signs
// drive the bisection; an exact zero evaluation terminates immediately.
template <typename Scalar>
RootEnclosure<Scalar> refine_root(const CoeffVec<Scalar>& f, Scalar lo, Scalar hi,
                                  Scalar tol) {
  Scalar flo = vec_eval(f, lo), fhi = vec_eval(f, hi);
  if (flo == Scalar(0)) return {lo, Scalar(0), 1};
  if (fhi == Scalar(0)) return {hi, Scalar(0), 1};
  if ((flo > 0) == (fhi > 0)) {
    // Sturm certified a root but the endpoint signs agree (noise near a
    // cluster); scan for a usable sign change before giving up.
    const int pieces = 64;
    bool found = false;
    for (int i = 0; i < pieces && !found; ++i) {
      const Scalar x = lo + (hi - lo) * Scalar(i + 1) / Scalar(pieces);
      const Scalar fx = vec_eval(f, x);
      if (fx == Scalar(0)) return {x, Scalar(0), 1};
      if ((fx > 0) != (flo > 0)) {
        hi = x;
        fhi = fx;
        found = true;
      } else {
        lo = x;
        flo = fx;
      }
    }
    if (!found) throw_interval_failure("root refinement lost its sign bracket", lo, hi);
  }
  for (int it = 0; it < 4000 && (hi - lo) > Scalar(2) * tol; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid == lo || mid == hi) {
      if ((hi - lo) / Scalar(2) <= tol) break;
      throw_interval_failure("bisection stalled above the requested tolerance", lo, hi);
    }
    const Scalar fm = vec_eval(f, mid);
    if (fm == Scalar(0)) return {mid, Scalar(0), 1};
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  if ((hi - lo) > Scalar(2) * tol)
    throw_interval_failure("root refinement did not converge", lo, hi);

  // Newton polish of the reported location; the certified bracket stays.
  Scalar x = lo + (hi - lo) / Scalar(2);
  const CoeffVec<Scalar> df = vec_derivative(f);
  for (int it = 0; it < 3; ++it) {
    const Scalar d = vec_eval(df, x);
    if (d == Scalar(0)) break;
    const Scalar step = vec_eval(f, x) / d;
    const Scalar nx = x - step;
    if (!(nx > lo && nx < hi)) break;
    x = nx;
  }
  return {x, (hi - lo) / Scalar(2), 1};
}

template <typename Scalar>
void isolate_roots(const CoeffVec<Scalar>& f,
                   const std::vector<CoeffVec<Scalar>>& chain, Scalar lo, Scalar hi,
                   int count, Scalar tol, std::vector<RootEnclosure<Scalar>>& out,
                   int depth = 0) {
  if (count <= 0) return;
  if (depth > 220) throw_interval_failure("root isolation exceeded depth budget", lo, hi);
  if (count == 1) {
    out.push_back(refine_root(f, lo, hi, tol));
    return;
  }
  if (hi - lo <= Scalar(2) * tol) {
    // Unresolvable cluster at the requested tolerance: one root, flagged.
    out.push_back({lo + (hi - lo) / Scalar(2), (hi - lo) / Scalar(2), count});
    return;
  }
  const Scalar mid = lo + (hi - lo) / Scalar(2);
  const int left = sturm_count(chain, lo, mid);
  isolate_roots(f, chain, lo, mid, left, tol, out, depth + 1);
  isolate_roots(f, chain, mid, hi, count - left, tol, out, depth + 1);
}

}  // namespace detail

// All real roots of a nonconstant polynomial, isolated by Sturm
// sign-variation counts and refined to enclosure half-width <= tol.
// Multiple roots are reported once with their multiplicity.
template <typename Scalar>
RootSet<Scalar> real_roots(const Poly<Scalar>& f, Scalar tol = Scalar(kDefaultRootTol)) {
  detail::require(tol > Scalar(0), "real_roots: tol must be positive");
  detail::require(f.degree() >= 1, "real_roots: polynomial must be nonconstant");

  detail::CoeffVec<Scalar> work(f.coeffs().data(), f.coeffs().data() + f.coeffs().size());
  detail::vec_normalize(work);

  // Square-free reduction; the gcd holds the repeated factors.
  detail::CoeffVec<Scalar> g = detail::vec_gcd(work, detail::vec_derivative(work));
  detail::CoeffVec<Scalar> sf = work;
  const bool had_multiple = detail::vec_degree(g) >= 1;
  if (had_multiple) {
    sf = detail::vec_quot(work, g);
    detail::vec_normalize(sf);
  }

  RootSet<Scalar> result;
  const auto chain = detail::sturm_chain(sf);
  const Scalar bound = detail::root_bound(sf);
  const int total = detail::sturm_count(chain, -bound, bound);
  detail::isolate_roots(sf, chain, -bound, bound, total, tol, result.roots);
  std::sort(result.roots.begin(), result.roots.end(),
            [](const auto& a, const auto& b) { return a.location < b.location; });

  if (had_multiple) {
    // Multiplicity = 1 + multiplicity of the same location in the gcd.
    typename Poly<Scalar>::Vector gv =
        Eigen::Map<const typename Poly<Scalar>::Vector>(
            g.data(), static_cast<Eigen::Index>(g.size()));
    const Poly<Scalar> gpoly{std::move(gv)};
    if (gpoly.degree() >= 1) {
      const RootSet<Scalar> groots = real_roots(gpoly, tol);
      for (auto& r : result.roots) {
        const Scalar window =
            std::max(Scalar(100) * (tol + r.half_width),
                     Scalar(1e-7) * (Scalar(1) + std::abs(r.location)));
        for (const auto& gr : groots.roots)
          if (std::abs(gr.location - r.location) <= window)
            r.multiplicity += gr.multiplicity;
      }
    }
  }
  return result;
}

// Largest real root, or nothing when the polynomial has no real root.
template <typename Scalar>
std::optional<Scalar> largest_real_root(const Poly<Scalar>& f,
                                        Scalar tol = Scalar(kDefaultRootTol)) {
  const RootSet<Scalar> rs = real_roots(f, tol);
  if (rs.roots.empty()) return std::nullopt;
  return rs.roots.back().location;
}

}  // namespace liouville
