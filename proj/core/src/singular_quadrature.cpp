#include "chs/singular_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "chs/params.hpp"

namespace chs {
namespace {

constexpr double kPi = std::numbers::pi;

double sphere_normalization(int N) {
  return std::sqrt(kPi) * std::exp(std::lgamma(0.5 * (N - 1)) - std::lgamma(0.5 * N));
}

double int_pow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void check_kernel_args(double alpha, int N) {
  if (N < 3) throw std::invalid_argument("riesz kernel: N must be >= 3");
  if (!(alpha > 0.0 && alpha < N)) throw std::invalid_argument("riesz kernel: alpha must lie in (0, N)");
}

// ∫_0^π (gap² + 4ab sin²(θ/2))^{-α/2} sin^{N-2}θ dθ for 0 < a <= b.
double polar_integral(double a, double b, double gap, double alpha, int N) {
  const quad::GaussRule& rule = quad::gauss_legendre(10);
  const quad::GaussRule& far_rule = quad::gauss_legendre(12);
  const double c = 4.0 * a * b;
  const double d2 = gap * gap;
  const double e = -0.5 * alpha;
  const int m = N - 2;
  auto f = [&](double t) {
    const double h = std::sin(0.5 * t);
    return std::pow(d2 + c * h * h, e) * int_pow(std::sin(t), m);
  };
  double sum = quad::gauss_panel(f, 0.5 * kPi, kPi, far_rule);
  double hi = 0.5 * kPi;
  if (gap > 0.0) {
    const double stop = 0.25 * gap / std::sqrt(a * b);
    while (hi > stop) {
      const double lo = 0.25 * hi;
      sum += quad::gauss_panel(f, lo, hi, rule);
      hi = lo;
    }
    return sum + quad::gauss_panel(f, 0.0, hi, rule);
  }
  if (alpha >= N - 1.0) return std::numeric_limits<double>::infinity();
  while (hi > 1e-13) {
    const double lo = 0.25 * hi;
    sum += quad::gauss_panel(f, lo, hi, rule);
    hi = lo;
  }
  // Near θ = 0 the integrand is (ab)^{-α/2} θ^{N-2-α} to relative O(θ²).
  const double beta1 = N - 1.0 - alpha;
  return sum + std::pow(a * b, e) * std::pow(hi, beta1) / beta1;
}

double kernel_ordered(double a, double b, double gap, double alpha, int N) {
  if (a == 0.0) return std::pow(b, -alpha);
  return polar_integral(a, b, gap, alpha, N) / sphere_normalization(N);
}

// Inner graded levels so that the untreated end panel of a δ^{N-1-α}
// singularity carries relative weight below ~1e-13.
int singular_levels(double alpha, int N, int base) {
  const double e = N - 1.0 - alpha;
  if (e >= 0.0) return base;
  const int need = static_cast<int>(std::ceil(13.0 / ((1.0 + e) * std::log10(4.0))));
  return std::clamp(need, base, 200);
}

// ∫∫_{[lo,hi]^2} (r1 r2)^{N-1} k(r1, r2) dr1 dr2
double diagonal_cell(double lo, double hi, double alpha, int N) {
  const quad::GradedRule outer{3, 3, 0.25, 1};
  const quad::GradedRule inner{4, singular_levels(alpha, N, 6), 0.25, 1};
  auto row = [&](double a) {
    const double a_pow = int_pow(a, N - 1);
    auto g = [&](double delta) {
      const double r2 = a - delta;
      if (r2 <= 0.0) return 0.0;
      return int_pow(r2, N - 1) * kernel_ordered(r2, a, delta, alpha, N);
    };
    return a_pow * quad::integrate_graded(g, 0.0, a - lo, true, false, inner);
  };
  return 2.0 * quad::integrate_graded(row, lo, hi, true, false, outer);
}

}  // namespace

double riesz_angular_kernel_gap(double r1, double r2, double gap, double alpha, int N) {
  check_kernel_args(alpha, N);
  if (!(r1 >= 0.0 && r2 >= 0.0) || !std::isfinite(r1) || !std::isfinite(r2)) {
    throw std::invalid_argument("riesz kernel: radii must be finite and >= 0");
  }
  if (r1 == 0.0 && r2 == 0.0) throw std::invalid_argument("riesz kernel: both radii are zero");
  return kernel_ordered(std::min(r1, r2), std::max(r1, r2), std::abs(gap), alpha, N);
}

double riesz_angular_kernel(double r1, double r2, double alpha, int N) {
  return riesz_angular_kernel_gap(r1, r2, std::abs(r1 - r2), alpha, N);
}

KernelMatrix::KernelMatrix(std::shared_ptr<const RadialGrid> grid, double alpha, std::vector<double> entries)
    : grid_(std::move(grid)), alpha_(alpha), entries_(std::move(entries)) {
  if (!grid_) throw std::invalid_argument("kernel matrix: null grid");
  if (entries_.size() != grid_->size() * grid_->size()) {
    throw std::invalid_argument("kernel matrix: entry count does not match grid");
  }
}

void KernelMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t m = size();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = entries_.data() + i * m;
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

std::shared_ptr<const KernelMatrix> assemble_riesz_matrix(std::shared_ptr<const RadialGrid> grid,
                                                          double alpha, unsigned threads) {
  const int N = grid->dimension();
  check_kernel_args(alpha, N);
  const std::size_t m = grid->size();
  const auto& r = grid->nodes();
  const auto& w = grid->trapezoid_weights();
  const double om = omega(N);
  std::vector<double> K(m * m, 0.0);
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) weight[i] = om * int_pow(r[i], N - 1) * w[i];

  auto work = [&](unsigned t, unsigned nt) {
    for (std::size_t i = 1 + t; i < m; i += nt) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double v = weight[i] * weight[j] * kernel_ordered(r[i], r[j], r[j] - r[i], alpha, N);
        K[i * m + j] = v;
        K[j * m + i] = v;
      }
      const double lo = 0.5 * (r[i - 1] + r[i]);
      const double hi = (i + 1 < m) ? 0.5 * (r[i] + r[i + 1]) : r[i];
      K[i * m + i] = om * om * diagonal_cell(lo, hi, alpha, N);
    }
  };

  unsigned nt = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, m));
  if (nt <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
  }
  return std::make_shared<const KernelMatrix>(std::move(grid), alpha, std::move(K));
}

double riesz_double_integral(const RadialFunction& u, double p, const KernelMatrix& kernel) {
  if (!(p > 1.0)) throw std::invalid_argument("riesz_double_integral: p must be > 1");
  if (u.size() != kernel.size()) throw std::invalid_argument("riesz_double_integral: kernel/grid mismatch");
  const std::size_t m = u.size();
  std::vector<double> f(m);
  for (std::size_t i = 0; i < m; ++i) f[i] = std::pow(std::abs(u[i]), p);
  std::vector<double> kf(m);
  kernel.apply(f, kf);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += f[i] * kf[i];
  return sum;
}

std::vector<double> hardy_weights(const RadialGrid& grid, double s) {
  if (!(s >= 0.0 && s <= 2.0)) throw std::invalid_argument("hardy weights: s must lie in [0, 2]");
  const int N = grid.dimension();
  const double g = N - 1.0 - s;
  const auto& r = grid.nodes();
  std::vector<double> W(r.size(), 0.0);
  const quad::GaussRule& rule = quad::gauss_legendre(8);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double a = r[i];
    const double b = r[i + 1];
    const double h = b - a;
    double left = 0.0;
    double right = 0.0;
    if (a == 0.0 || b > 1.5 * a) {
      const double i0 = (std::pow(b, g + 1.0) - std::pow(a, g + 1.0)) / (g + 1.0);
      const double i1 = (std::pow(b, g + 2.0) - std::pow(a, g + 2.0)) / (g + 2.0);
      left = (b * i0 - i1) / h;
      right = (i1 - a * i0) / h;
    } else {
      left = quad::gauss_panel([&](double x) { return (b - x) / h * std::pow(x, g); }, a, b, rule);
      right = quad::gauss_panel([&](double x) { return (x - a) / h * std::pow(x, g); }, a, b, rule);
    }
    W[i] += left;
    W[i + 1] += right;
  }
  const double om = omega(N);
  for (double& x : W) x *= om;
  return W;
}

double hardy_weighted_integral(const RadialFunction& u, double q, double s, int N) {
  if (s > 2.0) throw std::invalid_argument("hardy_weighted_integral: s > 2 is not integrable against H^1");
  if (!(q >= 1.0)) throw std::invalid_argument("hardy_weighted_integral: q must be >= 1");
  if (N != u.grid().dimension()) throw std::invalid_argument("hardy_weighted_integral: N does not match the grid");
  const std::vector<double> W = hardy_weights(u.grid(), s);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += W[i] * std::pow(std::abs(u[i]), q);
  return sum;
}

namespace {

std::vector<quad::Breakpoint> profile_breakpoints(std::span<const double> scales, double support) {
  // Consecutive breakpoints at most a factor kSpan apart, so a profile that
  // decays like a power of r/scale gets panels of bounded relative width.
  constexpr double kSpan = 4.0;
  constexpr int kTailSpans = 3;
  std::vector<double> inner;
  for (double x : scales) {
    if (x > 0.0 && x < support) inner.push_back(x);
  }
  if (std::isinf(support) && inner.empty()) inner.push_back(1.0);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());

  std::vector<quad::Breakpoint> pts{{0.0, true}};
  for (std::size_t k = 0; k < inner.size(); ++k) {
    const double x = inner[k];
    pts.push_back({x, false});
    const double next = k + 1 < inner.size() ? inner[k + 1] : support;
    if (std::isinf(next)) {
      double z = x;
      for (int j = 0; j < kTailSpans; ++j) pts.push_back({z *= kSpan, false});
    } else {
      for (double z = x * kSpan; 1.5 * z < next; z *= kSpan) pts.push_back({z, false});
    }
  }
  pts.push_back({support, false});
  return pts;
}

}  // namespace

double radial_integral(const std::function<double(double)>& f, int N, double s,
                       std::span<const double> scales, double support, const ProfileQuadrature& pq) {
  const double g = N - 1.0 - s;
  auto integrand = [&](double r) { return f(r) * std::pow(r, g); };
  const auto pts = profile_breakpoints(scales, support);
  return omega(N) * quad::integrate_breakpoints(integrand, pts, pq.rule);
}

double riesz_double_integral_profile(const std::function<double(double)>& density, int N, double alpha,
                                     std::span<const double> scales, double support,
                                     const ProfileQuadrature& pq) {
  check_kernel_args(alpha, N);
  const auto outer_pts = profile_breakpoints(scales, support);
  quad::GradedRule inner_rule = pq.rule;
  inner_rule.levels = singular_levels(alpha, N, pq.rule.levels);

  auto F = [&](double r) { return density(r) * int_pow(r, N - 1); };

  auto row = [&](double r1) {
    const double f1 = F(r1);
    if (f1 == 0.0) return 0.0;
    // Inner integral over r2 in (0, r1) in the gap variable δ = r1 - r2.
    std::vector<quad::Breakpoint> pts{{0.0, true}};
    std::vector<double> cuts;
    for (const auto& bp : outer_pts) {
      if (bp.r > 0.0 && bp.r < r1) cuts.push_back(r1 - bp.r);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(r1);
    // Panels off the singular end grow at most geometrically.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      pts.push_back({cuts[i], false});
      for (double z = 4.0 * cuts[i]; 1.5 * z < cuts[i + 1]; z *= 4.0) pts.push_back({z, false});
    }
    pts.push_back({r1, true});
    auto g = [&](double delta) {
      const double r2 = r1 - delta;
      if (r2 <= 0.0) return 0.0;
      return F(r2) * kernel_ordered(r2, r1, delta, alpha, N);
    };
    return f1 * quad::integrate_breakpoints(g, pts, inner_rule);
  };
  const double om = omega(N);
  return 2.0 * om * om * quad::integrate_breakpoints(row, outer_pts, pq.rule);
}

}  // namespace chs
