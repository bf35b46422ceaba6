#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "swarm/vec2.hpp"

namespace swarm {

// Dense univariate polynomial, coeffs[i] multiplies t^i.
using Poly = std::vector<double>;

inline double poly_eval(const Poly& p, double t) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
  return acc;
}

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

inline Poly poly_integral(const Poly& p) {
  Poly r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i] / static_cast<double>(i + 1);
  return r;
}

// Rebase: coefficients of q(s) = p(t0 + s).
inline Poly poly_shift(const Poly& p, double t0) {
  const std::size_t n = p.size();
  Poly q(n, 0.0);
  // Binomial expansion of (t0 + s)^l accumulated per source coefficient.
  std::vector<double> binom(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    // binom[j] = C(l, j) * t0^(l-j)
    double c = 1.0;
    for (std::size_t j = 0; j <= l; ++j) {
      binom[j] = c * std::pow(t0, static_cast<double>(l - j));
      c = c * static_cast<double>(l - j) / static_cast<double>(j + 1);
    }
    for (std::size_t j = 0; j <= l; ++j) q[j] += p[l] * binom[j];
  }
  return q;
}

inline std::size_t poly_degree(const Poly& p, double rel_tol = 0.0) {
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0;
  std::size_t deg = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (std::abs(p[i]) > rel_tol * scale) deg = i;
  return deg;
}

namespace detail {

// Magnitude envelope of p near t, used as a touch tolerance scale.
inline double poly_envelope(const Poly& p, double t) {
  double acc = 0.0, tp = 1.0;
  for (double c : p) {
    acc += std::abs(c) * std::abs(tp);
    tp *= t;
  }
  return acc;
}

inline int sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline double bisect_root(const Poly& p, double a, double b) {
  double fa = poly_eval(p, a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = poly_eval(p, m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if (b - a < 1e-15 * std::max(1.0, std::abs(a))) break;
  }
  // Newton polish, clamped to the bracket.
  const Poly dp = poly_derivative(p);
  double x = 0.5 * (a + b);
  for (int it = 0; it < 4; ++it) {
    const double f = poly_eval(p, x);
    const double d = poly_eval(dp, x);
    if (d == 0.0) break;
    const double xn = x - f / d;
    if (xn < a || xn > b) break;
    x = xn;
  }
  return x;
}

inline void real_roots_rec(const Poly& p, double lo, double hi, std::vector<double>& out) {
  const std::size_t deg = poly_degree(p, 1e-14);
  if (deg == 0) return;
  if (deg == 1) {
    const double r = -p[0] / p[1];
    if (r >= lo && r <= hi) out.push_back(r);
    return;
  }
  Poly trimmed(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(deg + 1));
  std::vector<double> crit;
  real_roots_rec(poly_derivative(trimmed), lo, hi, crit);
  std::sort(crit.begin(), crit.end());

  std::vector<double> pts;
  pts.push_back(lo);
  for (double c : crit)
    if (c > lo && c < hi) pts.push_back(c);
  pts.push_back(hi);

  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1];
    const double fa = poly_eval(trimmed, a);
    const double fb = poly_eval(trimmed, b);
    if (fa == 0.0) out.push_back(a);
    if (sgn(fa) * sgn(fb) < 0) out.push_back(bisect_root(trimmed, a, b));
  }
  if (poly_eval(trimmed, hi) == 0.0) out.push_back(hi);
  // Even-multiplicity roots touch zero at a critical point without a sign change.
  for (double c : crit) {
    if (c < lo || c > hi) continue;
    if (std::abs(poly_eval(trimmed, c)) <= 1e-11 * std::max(1.0, poly_envelope(trimmed, c)))
      out.push_back(c);
  }
}

}  // namespace detail

// All real roots of p in [lo, hi], ascending, deduplicated.
// Throws on the zero polynomial or a constant.
inline std::vector<double> real_roots_in(const Poly& p, double lo, double hi) {
  if (lo >= hi) throw std::invalid_argument("real_roots_in: lo >= hi");
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw std::invalid_argument("real_roots_in: zero polynomial");
  if (poly_degree(p) == 0) throw std::invalid_argument("real_roots_in: degree < 1");

  Poly norm(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) norm[i] = p[i] / scale;

  std::vector<double> roots;
  detail::real_roots_rec(norm, lo, hi, roots);
  std::sort(roots.begin(), roots.end());
  std::vector<double> uniq;
  for (double r : roots) {
    if (uniq.empty() || r - uniq.back() > 1e-9 * std::max(1.0, std::abs(r))) uniq.push_back(r);
  }
  return uniq;
}

// 2-D polynomial curve, coeffs[i] multiplies t^i componentwise.
using PolyVec2 = std::vector<Vec2>;

inline Vec2 poly_eval(const PolyVec2& p, double t) {
  Vec2 acc;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
  return acc;
}

inline PolyVec2 poly_derivative(const PolyVec2& p) {
  if (p.size() <= 1) return {Vec2{}};
  PolyVec2 d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

inline Poly poly_axis(const PolyVec2& p, int axis) {
  Poly r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = axis == 0 ? p[i].x : p[i].y;
  return r;
}

inline PolyVec2 poly_shift(const PolyVec2& p, double t0) {
  const Poly qx = poly_shift(poly_axis(p, 0), t0);
  const Poly qy = poly_shift(poly_axis(p, 1), t0);
  PolyVec2 q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = {qx[i], qy[i]};
  return q;
}

}  // namespace swarm
