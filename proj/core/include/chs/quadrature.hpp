#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace chs::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Rules for 1 <= n <= 64 are built once and cached.
const GaussRule& gauss_legendre(int n);

template <class F>
double gauss_panel(const F& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
  return sum * half;
}

// Composite rule with geometric panels toward endpoints that carry a
// singularity or a small length scale. A graded end is never evaluated;
// grading away from 0 stops at offsets near rounding of the endpoint.
struct GradedRule {
  int points = 12;
  int levels = 18;
  double ratio = 0.15;
  int plain_panels = 2;
};

namespace detail {

// Offsets below this multiple of |endpoint| round onto the endpoint, so
// grading stops there.
inline constexpr double kGradingFloor = 4096.0 * std::numeric_limits<double>::epsilon();

template <class F>
double geometric_toward_left(const F& f, double a, double b, const GradedRule& g,
                             const GaussRule& rule) {
  const double len = b - a;
  const double floor = kGradingFloor * std::abs(a);
  double hi = b;
  double scale = 1.0;
  double sum = 0.0;
  for (int j = 0; j < g.levels; ++j) {
    scale *= g.ratio;
    if (len * scale <= floor) break;
    const double lo = a + len * scale;
    sum += gauss_panel(f, lo, hi, rule);
    hi = lo;
  }
  return sum + gauss_panel(f, a, hi, rule);
}

template <class F>
double geometric_toward_right(const F& f, double a, double b, const GradedRule& g,
                              const GaussRule& rule) {
  const double len = b - a;
  const double floor = kGradingFloor * std::abs(b);
  double lo = a;
  double scale = 1.0;
  double sum = 0.0;
  for (int j = 0; j < g.levels; ++j) {
    scale *= g.ratio;
    if (len * scale <= floor) break;
    const double hi = b - len * scale;
    sum += gauss_panel(f, lo, hi, rule);
    lo = hi;
  }
  return sum + gauss_panel(f, lo, b, rule);
}

template <class F>
double plain(const F& f, double a, double b, const GradedRule& g, const GaussRule& rule) {
  const int n = g.plain_panels < 1 ? 1 : g.plain_panels;
  const double h = (b - a) / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == n) ? b : lo + h;
    sum += gauss_panel(f, lo, hi, rule);
  }
  return sum;
}

}  // namespace detail

template <class F>
double integrate_graded(const F& f, double a, double b, bool graded_a, bool graded_b,
                        const GradedRule& g = {}) {
  if (!(b > a)) return 0.0;
  const GaussRule& rule = gauss_legendre(g.points);
  if (graded_a && graded_b) {
    const double m = 0.5 * (a + b);
    return detail::geometric_toward_left(f, a, m, g, rule) +
           detail::geometric_toward_right(f, m, b, g, rule);
  }
  if (graded_a) return detail::geometric_toward_left(f, a, b, g, rule);
  if (graded_b) return detail::geometric_toward_right(f, a, b, g, rule);
  return detail::plain(f, a, b, g, rule);
}

// Integral over [a, inf) through r = a / t. The integrand must decay faster
// than 1/r.
template <class F>
double integrate_to_infinity(const F& f, double a, bool graded_a, const GradedRule& g = {}) {
  auto mapped = [&](double t) { return f(a / t) * a / (t * t); };
  return integrate_graded(mapped, 0.0, 1.0, true, graded_a, g);
}

struct Breakpoint {
  double r;
  bool graded;
};

// Sum of graded integrals between consecutive breakpoints. The last
// breakpoint may be +infinity.
template <class F>
double integrate_breakpoints(const F& f, std::span<const Breakpoint> pts,
                             const GradedRule& g = {}) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Breakpoint& lo = pts[k];
    const Breakpoint& hi = pts[k + 1];
    if (std::isinf(hi.r)) {
      sum += integrate_to_infinity(f, lo.r, lo.graded, g);
    } else {
      sum += integrate_graded(f, lo.r, hi.r, lo.graded, hi.graded, g);
    }
  }
  return sum;
}

}  // namespace chs::quad
