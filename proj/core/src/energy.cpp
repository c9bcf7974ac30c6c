#include "chs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chs/sharp_constants.hpp"

namespace chs {

EnergyFunctional::EnergyFunctional(const ProblemParams& params, std::shared_ptr<const KernelMatrix> kernel)
    : params_(params), kernel_(std::move(kernel)) {
  params_.validate_relaxed();
  if (!kernel_) throw std::invalid_argument("energy: null kernel");
  const RadialGrid& g = kernel_->grid();
  if (g.dimension() != params_.N) throw std::invalid_argument("energy: kernel dimension does not match N");
  if (!exponent_equal(kernel_->alpha(), params_.alpha)) {
    throw std::invalid_argument("energy: kernel alpha does not match params");
  }
  if (std::abs(g.radius() - params_.radius) > 1e-12 * params_.radius) {
    throw std::invalid_argument("energy: grid radius does not match the domain radius");
  }
  stiffness_ = stiffness_matrix(g);
  hardy_weights_ = hardy_weights(g, params_.s);
}

double EnergyFunctional::kinetic_integral(std::span<const double> u) const {
  const std::size_t m = u.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double lu = stiffness_.diag[i] * u[i];
    if (i > 0) lu += stiffness_.off[i - 1] * u[i - 1];
    if (i + 1 < m) lu += stiffness_.off[i] * u[i + 1];
    sum += u[i] * lu;
  }
  return sum;
}

double EnergyFunctional::nonlocal_integral(std::span<const double> u) const {
  const std::size_t m = u.size();
  std::vector<double> f(m);
  for (std::size_t i = 0; i < m; ++i) f[i] = std::pow(std::abs(u[i]), params_.p);
  std::vector<double> kf(m);
  kernel_->apply(f, kf);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += f[i] * kf[i];
  return sum;
}

double EnergyFunctional::hardy_integral(std::span<const double> u) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += hardy_weights_[i] * std::pow(std::abs(u[i]), params_.q);
  return sum;
}

EnergyBreakdown EnergyFunctional::energy(std::span<const double> u) const {
  if (u.size() != size()) throw std::invalid_argument("energy: vector length does not match grid");
  EnergyBreakdown e;
  e.kinetic = 0.5 * kinetic_integral(u);
  e.nonlocal = params_.lambda == 0.0 ? 0.0 : params_.lambda / (2.0 * params_.p) * nonlocal_integral(u);
  e.hardy = params_.mu == 0.0 ? 0.0 : params_.mu / params_.q * hardy_integral(u);
  e.total = e.kinetic - e.nonlocal - e.hardy;
  return e;
}

EnergyBreakdown EnergyFunctional::energy_and_gradient(std::span<const double> u, std::span<double> grad) const {
  const std::size_t m = size();
  if (u.size() != m || grad.size() != m) throw std::invalid_argument("energy: vector length does not match grid");
  const double p = params_.p;
  const double q = params_.q;
  double A = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double lu = stiffness_.diag[i] * u[i];
    if (i > 0) lu += stiffness_.off[i - 1] * u[i - 1];
    if (i + 1 < m) lu += stiffness_.off[i] * u[i + 1];
    grad[i] = lu;
    A += u[i] * lu;
  }
  double B = 0.0;
  if (params_.lambda != 0.0) {
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = std::pow(std::abs(u[i]), p);
    std::vector<double> kf(m);
    kernel_->apply(f, kf);
    for (std::size_t i = 0; i < m; ++i) {
      B += f[i] * kf[i];
      if (u[i] != 0.0) grad[i] -= params_.lambda * kf[i] * f[i] / u[i];
    }
  }
  double D = 0.0;
  if (params_.mu != 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      const double g = std::pow(std::abs(u[i]), q);
      D += hardy_weights_[i] * g;
      if (u[i] != 0.0) grad[i] -= params_.mu * hardy_weights_[i] * g / u[i];
    }
  }
  grad[m - 1] = 0.0;
  EnergyBreakdown e;
  e.kinetic = 0.5 * A;
  e.nonlocal = params_.lambda / (2.0 * p) * B;
  e.hardy = params_.mu / q * D;
  e.total = e.kinetic - e.nonlocal - e.hardy;
  return e;
}

double EnergyFunctional::inner(std::span<const double> u, std::span<const double> v) const {
  const std::size_t m = u.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double lv = stiffness_.diag[i] * v[i];
    if (i > 0) lv += stiffness_.off[i - 1] * v[i - 1];
    if (i + 1 < m) lv += stiffness_.off[i] * v[i + 1];
    sum += u[i] * lv;
  }
  return sum;
}

std::vector<double> EnergyFunctional::riesz_map(std::span<const double> g) const {
  // Thomas algorithm on nodes 0..M-2; node M-1 is the Dirichlet node.
  const std::size_t n = size() - 1;
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  std::vector<double> x(size(), 0.0);
  double denom = stiffness_.diag[0];
  c[0] = n > 1 ? stiffness_.off[0] / denom : 0.0;
  d[0] = g[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = stiffness_.diag[i] - stiffness_.off[i - 1] * c[i - 1];
    c[i] = (i + 1 < n) ? stiffness_.off[i] / denom : 0.0;
    d[i] = (g[i] - stiffness_.off[i - 1] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

double EnergyFunctional::dual_norm(std::span<const double> g) const {
  const std::vector<double> x = riesz_map(g);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < size(); ++i) sum += g[i] * x[i];
  return std::sqrt(std::max(sum, 0.0));
}

EnergyBreakdown energy(const RadialFunction& u, const ProblemParams& params,
                       std::shared_ptr<const KernelMatrix> kernel) {
  const EnergyFunctional F(params, std::move(kernel));
  return F.energy(u.values());
}

std::vector<double> energy_gradient(const RadialFunction& u, const ProblemParams& params,
                                    std::shared_ptr<const KernelMatrix> kernel) {
  const EnergyFunctional F(params, std::move(kernel));
  std::vector<double> g(u.size());
  F.energy_and_gradient(u.values(), g);
  return g;
}

double fiber_value(double A, double lambda_B, double mu_D, double p, double q, double t) {
  return 0.5 * A * t * t - lambda_B / (2.0 * p) * std::pow(t, 2.0 * p) - mu_D / q * std::pow(t, q);
}

FiberProfile fiber_max(double A, double B, double D, double lambda, double mu, double p, double q) {
  if (!(A > 0.0)) throw std::invalid_argument("fiber_max: A = ∫|∇u|² must be > 0");
  if (!(p > 1.0) || !(q >= 2.0)) throw std::invalid_argument("fiber_max: need p > 1 and q >= 2");
  const double lb = lambda * B;
  const double md = mu * D;
  if (!(lb > 0.0) && !(md > 0.0 && q > 2.0)) {
    throw std::invalid_argument("fiber_max: h(t) is unbounded above");
  }
  // h'(t) = t g(t)
  auto g = [&](double t) { return A - lb * std::pow(t, 2.0 * p - 2.0) - md * std::pow(t, q - 2.0); };
  auto h = [&](double t) { return fiber_value(A, lb, md, p, q, t); };

  double hi = 1.0;
  for (int i = 0; i < 4000 && g(hi) >= 0.0; ++i) hi *= 2.0;
  double lo = 1e-6;
  for (int i = 0; i < 4000 && g(lo) <= 0.0; ++i) lo *= 0.5;
  if (!(g(lo) > 0.0) || !(g(hi) < 0.0)) throw std::invalid_argument("fiber_max: h has no positive maximum");

  constexpr int kScan = 256;
  const double ratio = std::pow(hi / lo, 1.0 / kScan);
  double best_t = 0.0;
  double best_h = -std::numeric_limits<double>::infinity();
  double a = lo;
  double ga = g(a);
  for (int k = 1; k <= kScan; ++k) {
    double b = (k == kScan) ? hi : a * ratio;
    const double gb = g(b);
    if ((ga > 0.0) != (gb > 0.0)) {
      double x0 = a;
      double x1 = b;
      const bool rising = gb > 0.0;
      for (int it = 0; it < 200 && x1 - x0 > 1e-15 * x1; ++it) {
        const double mid = 0.5 * (x0 + x1);
        if ((g(mid) > 0.0) == rising) {
          x1 = mid;
        } else {
          x0 = mid;
        }
      }
      const double root = 0.5 * (x0 + x1);
      const double hr = h(root);
      if (hr > best_h) {
        best_h = hr;
        best_t = root;
      }
    }
    a = b;
    ga = gb;
  }
  FiberProfile fp;
  fp.A = A;
  fp.B = B;
  fp.D = D;
  fp.exponent_nonlocal = 2.0 * p;
  fp.exponent_hardy = q;
  fp.t_star = best_t;
  fp.h_star = best_h;
  constexpr int kSamples = 65;
  for (int k = 0; k < kSamples; ++k) {
    const double t = best_t * std::pow(10.0, -2.0 + 4.0 * k / (kSamples - 1));
    fp.t_samples.push_back(t);
    fp.h_samples.push_back(h(t));
  }
  return fp;
}

FiberProfile fiber_max(const RadialFunction& u, const ProblemParams& params,
                       std::shared_ptr<const KernelMatrix> kernel) {
  const EnergyFunctional F(params, std::move(kernel));
  const auto& v = u.values();
  const double A = F.kinetic_integral(v);
  const double B = F.nonlocal_integral(v);
  const double D = F.hardy_integral(v);
  return fiber_max(A, B, D, params.lambda, params.mu, params.p, params.q);
}

MountainPassGeometry mp_geometry_check(const ProblemParams& params, const RadialFunction& probe,
                                       std::shared_ptr<const KernelMatrix> kernel) {
  const EnergyFunctional F(params, std::move(kernel));
  const auto& v = probe.values();
  const double A = F.kinetic_integral(v);
  if (!(A > 0.0)) throw std::invalid_argument("mp_geometry_check: probe must be nonzero");

  const int N = params.N;
  const double n = N;
  const DerivedExponents ex = derive_exponents(params);
  const double S = sobolev_constant(N);
  const double C = hls_sharp_constant(N, params.alpha);
  const double vol = omega(N) * std::pow(params.radius, n) / n;

  // ∫∫|u|^p|u|^p/|x-y|^α <= C |u|_r^{2p}, r = 2Np/(2N-α) <= 2*.
  const double r = 2.0 * n * params.p / (2.0 * n - params.alpha);
  const double embed = std::pow(vol, 1.0 / r - 1.0 / ex.sobolev) / std::sqrt(S);
  const double cb = C * std::pow(embed, 2.0 * params.p);

  double cd = 0.0;
  double quad_coeff = 0.5;
  if (exponent_equal(params.s, 2.0)) {
    quad_coeff = 0.5 * (1.0 - params.mu / ex.hardy_best);
  } else {
    const double mus = hardy_sobolev_constant(N, params.s);
    const double m = omega(N) * std::pow(params.radius, n - params.s) / (n - params.s);
    cd = std::pow(m, 1.0 - params.q / ex.hardy_sobolev) * std::pow(mus, -0.5 * params.q);
  }
  auto lower = [&](double rho) {
    double val = quad_coeff * rho * rho;
    val -= params.lambda / (2.0 * params.p) * cb * std::pow(rho, 2.0 * params.p);
    if (cd > 0.0) val -= params.mu / params.q * cd * std::pow(rho, params.q);
    return val;
  };

  MountainPassGeometry geo;
  geo.ball_constant_nonlocal = cb;
  geo.ball_constant_hardy = cd;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = -120; k <= 60; ++k) {
    const double rho = std::pow(10.0, k / 20.0);
    const double val = lower(rho);
    if (val > best) {
      best = val;
      geo.rho = rho;
    }
  }
  if (!(best > 0.0)) {
    throw GeometryError(
        "mp_geometry_check: no positive lower bound for I on any sphere ||u|| = rho >= 1e-6; "
        "the quadratic part is not coercive for these parameters");
  }
  geo.beta = best;

  const double norm = std::sqrt(A);
  std::vector<double> w(v.begin(), v.end());
  for (double& x : w) x *= geo.rho / norm;
  geo.probe_beta = F.energy(w).total;

  const double B = F.nonlocal_integral(v);
  const double D = F.hardy_integral(v);
  const FiberProfile fp = fiber_max(A, B, D, params.lambda, params.mu, params.p, params.q);
  double t = fp.t_star;
  auto energy_at = [&](double scale) {
    return fiber_value(A, params.lambda * B, params.mu * D, params.p, params.q, scale);
  };
  for (int i = 0; i < 200 && (energy_at(t) >= 0.0 || t * norm < geo.rho); ++i) t *= 2.0;
  if (energy_at(t) >= 0.0) throw GeometryError("mp_geometry_check: no negative-energy endpoint along the probe");
  geo.e_scale = t;
  return geo;
}

}  // namespace chs
