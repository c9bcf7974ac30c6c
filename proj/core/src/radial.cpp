#include "chs/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "chs/params.hpp"

namespace chs {
namespace {

// ∫_a^b r^{N-1} dr = (b - a) Σ_k a^k b^{N-1-k} / N, free of cancellation.
double power_moment(double a, double b, int N) {
  double sum = 0.0;
  double ak = 1.0;
  for (int k = 0; k < N; ++k) {
    sum += ak * std::pow(b, N - 1 - k);
    ak *= a;
  }
  return (b - a) * sum / N;
}

void check_same_grid(const RadialFunction& a, const RadialFunction& b) {
  if (&a.grid() != &b.grid() && a.grid().nodes() != b.grid().nodes()) {
    throw std::invalid_argument("radial functions live on different grids");
  }
}

}  // namespace

std::shared_ptr<const RadialGrid> RadialGrid::make(double R, int M, double grading, int N) {
  if (M < 16) throw std::invalid_argument("grid: M must be >= 16");
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("grid: R must be > 0");
  if (!(grading >= 1.0) || !std::isfinite(grading)) throw std::invalid_argument("grid: grading must be >= 1");
  if (N < 3) throw std::invalid_argument("grid: N must be >= 3");
  std::vector<double> nodes(M);
  for (int i = 0; i < M; ++i) nodes[i] = R * std::pow(static_cast<double>(i) / (M - 1), grading);
  nodes.front() = 0.0;
  nodes.back() = R;
  return std::make_shared<const RadialGrid>(std::move(nodes), grading, N);
}

RadialGrid::RadialGrid(std::vector<double> nodes, double grading, int N)
    : nodes_(std::move(nodes)), grading_(grading), N_(N) {
  const std::size_t m = nodes_.size();
  if (m < 2) throw std::invalid_argument("grid: need at least two nodes");
  for (std::size_t i = 1; i < m; ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("grid: nodes must increase strictly");
  }
  weights_.assign(m, 0.0);
  moments_.assign(m - 1, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double h = nodes_[i + 1] - nodes_[i];
    weights_[i] += 0.5 * h;
    weights_[i + 1] += 0.5 * h;
    moments_[i] = power_moment(nodes_[i], nodes_[i + 1], N_);
  }
}

std::uint64_t RadialGrid::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t n = N_;
  mix(&n, sizeof n);
  mix(&grading_, sizeof grading_);
  mix(nodes_.data(), nodes_.size() * sizeof(double));
  return h;
}

RadialFunction::RadialFunction(std::shared_ptr<const RadialGrid> grid, std::vector<double> values,
                               bool boundary_zero)
    : grid_(std::move(grid)), values_(std::move(values)), boundary_zero_(boundary_zero) {
  if (!grid_) throw std::invalid_argument("radial function: null grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("radial function: size does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("radial function: non-finite value");
  }
  if (boundary_zero_) values_.back() = 0.0;
}

RadialFunction RadialFunction::sample(std::shared_ptr<const RadialGrid> grid,
                                      const std::function<double(double)>& f, bool boundary_zero) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*grid)[i]);
  return RadialFunction(std::move(grid), std::move(v), boundary_zero);
}

RadialFunction RadialFunction::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return RadialFunction(grid_, std::move(v), boundary_zero_);
}

void RadialFunction::write_csv(std::ostream& os) const {
  os << "r,u\n";
  char buf[64];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", (*grid_)[i], values_[i]);
    os << buf;
  }
}

void BubbleSpec::validate(double R) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("bubble: epsilon must be > 0");
  if (family == BubbleFamily::HardySobolev) {
    if (!(k > 0.0)) throw std::invalid_argument("bubble: k must be > 0");
    if (!(s >= 0.0 && s < 2.0)) throw std::invalid_argument("bubble: s must lie in [0, 2) for the Hardy-Sobolev family");
  }
  if (cut) {
    if (!(cutoff_inner > 0.0)) throw std::invalid_argument("bubble: cutoff radius must be > 0");
    if (cutoff_outer() > R * (1.0 + 1e-12)) throw std::invalid_argument("bubble: 2*rho must not exceed R");
  }
}

double hardy_sobolev_bubble(int N, double s, double k, double r) {
  const double n = N;
  const double c = std::pow(k * (n - s) * (n - 2.0), (n - 2.0) / (2.0 * (2.0 - s)));
  return c * std::pow(k + std::pow(r, 2.0 - s), -(n - 2.0) / (2.0 - s));
}

double hardy_sobolev_bubble_derivative(int N, double s, double k, double r) {
  const double n = N;
  const double c = std::pow(k * (n - s) * (n - 2.0), (n - 2.0) / (2.0 * (2.0 - s)));
  return -c * (n - 2.0) * std::pow(r, 1.0 - s) * std::pow(k + std::pow(r, 2.0 - s), -(n - s) / (2.0 - s));
}

double aubin_talenti_bubble(int N, double r) {
  const double n = N;
  return std::pow(n * (n - 2.0), (n - 2.0) / 4.0) * std::pow(1.0 + r * r, -(n - 2.0) / 2.0);
}

double aubin_talenti_bubble_derivative(int N, double r) {
  const double n = N;
  return -std::pow(n * (n - 2.0), (n - 2.0) / 4.0) * (n - 2.0) * r * std::pow(1.0 + r * r, -n / 2.0);
}

double cutoff(double r, double rho) {
  if (r <= rho) return 1.0;
  if (r >= 2.0 * rho) return 0.0;
  const double x = (r - rho) / rho;
  return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

double cutoff_derivative(double r, double rho) {
  if (r <= rho || r >= 2.0 * rho) return 0.0;
  const double x = (r - rho) / rho;
  return -30.0 * x * x * (1.0 - x) * (1.0 - x) / rho;
}

RadialProfile bubble_profile(const BubbleSpec& spec, int N) {
  const BubbleSpec sp = spec;
  const double eps = sp.epsilon;
  const double amp = std::pow(eps, -(N - 2.0) / 2.0);
  const double amp_d = std::pow(eps, -N / 2.0);
  std::function<double(double)> base;
  std::function<double(double)> base_d;
  if (sp.family == BubbleFamily::HardySobolev) {
    base = [N, sp](double x) { return hardy_sobolev_bubble(N, sp.s, sp.k, x); };
    base_d = [N, sp](double x) { return hardy_sobolev_bubble_derivative(N, sp.s, sp.k, x); };
  } else {
    base = [N](double x) { return aubin_talenti_bubble(N, x); };
    base_d = [N](double x) { return aubin_talenti_bubble_derivative(N, x); };
  }
  RadialProfile prof;
  if (!sp.cut) {
    prof.value = [=](double r) { return amp * base(r / eps); };
    prof.derivative = [=](double r) { return amp_d * base_d(r / eps); };
    prof.scales = {eps};
    prof.support = std::numeric_limits<double>::infinity();
    return prof;
  }
  const double rho = sp.cutoff_inner;
  prof.value = [=](double r) {
    if (r >= 2.0 * rho) return 0.0;
    return cutoff(r, rho) * amp * base(r / eps);
  };
  prof.derivative = [=](double r) {
    if (r >= 2.0 * rho) return 0.0;
    const double d = amp_d * base_d(r / eps) * cutoff(r, rho);
    if (r <= rho) return d;
    return d + cutoff_derivative(r, rho) * amp * base(r / eps);
  };
  prof.scales = {eps, rho, 2.0 * rho};
  prof.support = 2.0 * rho;
  return prof;
}

RadialFunction eval_bubble(const BubbleSpec& spec, int N, std::shared_ptr<const RadialGrid> grid) {
  spec.validate(grid->radius());
  const RadialProfile prof = bubble_profile(spec, N);
  return RadialFunction::sample(std::move(grid), prof.value, spec.cut);
}

double dirichlet_norm_sq(const RadialGrid& grid, std::span<const double> u) {
  const auto& r = grid.nodes();
  const auto& m = grid.cell_moments();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double g = (u[i + 1] - u[i]) / (r[i + 1] - r[i]);
    sum += g * g * m[i];
  }
  return omega(grid.dimension()) * sum;
}

double dirichlet_norm_sq(const RadialFunction& u, int N) {
  if (N != u.grid().dimension()) throw std::invalid_argument("dirichlet_norm_sq: N does not match the grid");
  return dirichlet_norm_sq(u.grid(), u.values());
}

Tridiagonal stiffness_matrix(const RadialGrid& grid) {
  const auto& r = grid.nodes();
  const auto& m = grid.cell_moments();
  const double w = omega(grid.dimension());
  Tridiagonal L;
  L.diag.assign(r.size(), 0.0);
  L.off.assign(r.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double h = r[i + 1] - r[i];
    const double c = w * m[i] / (h * h);
    L.diag[i] += c;
    L.diag[i + 1] += c;
    L.off[i] = -c;
  }
  return L;
}

double dirichlet_fraction(const RadialGrid& grid, std::span<const double> u, double radius) {
  const auto& r = grid.nodes();
  const int N = grid.dimension();
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double h = r[i + 1] - r[i];
    const double g = (u[i + 1] - u[i]) / h;
    const double cell = g * g * grid.cell_moments()[i];
    total += cell;
    if (r[i + 1] <= radius) {
      inside += cell;
    } else if (r[i] < radius) {
      inside += g * g * power_moment(r[i], radius, N);
    }
  }
  if (total <= 0.0) return radius >= grid.radius() ? 1.0 : 0.0;
  return inside / total;
}

double laplace_residual(const RadialFunction& u, const RadialFunction& rhs, int N) {
  check_same_grid(u, rhs);
  const auto& r = u.grid().nodes();
  const auto& v = u.values();
  const auto& f = rhs.values();
  double worst = 0.0;
  for (std::size_t i = kResidualSkip; i + 1 < r.size(); ++i) {
    const double hm = r[i] - r[i - 1];
    const double hp = r[i + 1] - r[i];
    const double d2 = 2.0 * ((v[i + 1] - v[i]) / hp - (v[i] - v[i - 1]) / hm) / (hp + hm);
    const double d1 = (hm * hm * v[i + 1] - hp * hp * v[i - 1] + (hp * hp - hm * hm) * v[i]) /
                      (hp * hm * (hp + hm));
    worst = std::max(worst, std::abs(d2 + (N - 1.0) / r[i] * d1 + f[i]));
  }
  return worst;
}

}  // namespace chs
