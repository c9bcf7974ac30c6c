#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace chs {

class RadialGrid {
 public:
  // r_i = R (i/(M-1))^grading. Throws std::invalid_argument for M < 16,
  // R <= 0 or grading < 1.
  static std::shared_ptr<const RadialGrid> make(double R, int M, double grading, int N = 3);

  // Unchecked construction from explicit nodes; used for small
  // illustrative grids and by make().
  RadialGrid(std::vector<double> nodes, double grading, int N);

  double radius() const { return nodes_.back(); }
  double grading() const { return grading_; }
  int dimension() const { return N_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  // Dual-cell trapezoid weights w_i (half the sum of adjacent spacings).
  const std::vector<double>& trapezoid_weights() const { return weights_; }
  // m_i = ∫_{r_i}^{r_{i+1}} r^{N-1} dr, one per cell.
  const std::vector<double>& cell_moments() const { return moments_; }

  // Stable 64-bit fingerprint of (N, grading, nodes).
  std::uint64_t hash() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> moments_;
  double grading_;
  int N_;
};

// Nodal values of a radial function. `boundary_zero` marks an element of
// H^1_0(B(0,R)), which forces the last value to 0.
class RadialFunction {
 public:
  RadialFunction(std::shared_ptr<const RadialGrid> grid, std::vector<double> values,
                 bool boundary_zero = true);

  static RadialFunction sample(std::shared_ptr<const RadialGrid> grid,
                               const std::function<double(double)>& f, bool boundary_zero = true);

  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool boundary_zero() const { return boundary_zero_; }

  RadialFunction scaled(double c) const;

  // CSV with header "r,u", 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  std::shared_ptr<const RadialGrid> grid_;
  std::vector<double> values_;
  bool boundary_zero_;
};

enum class BubbleFamily { HardySobolev, AubinTalenti };

struct BubbleSpec {
  BubbleFamily family = BubbleFamily::AubinTalenti;
  double epsilon = 1.0;
  double k = 1.0;  // HardySobolev only
  double s = 0.0;  // HardySobolev only
  double cutoff_inner = 0.5;
  bool cut = true;  // false evaluates the bare rescaled bubble

  double cutoff_outer() const { return 2.0 * cutoff_inner; }
  void validate(double R) const;
};

// Closed-form radial profile with its derivative. `scales` lists radii
// where the profile changes character (for quadrature breakpoints);
// `support` is +inf for profiles on all of R^N.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::vector<double> scales;
  double support;
};

// Unscaled bubbles (ε = 1, no cutoff) and their derivatives.
double hardy_sobolev_bubble(int N, double s, double k, double r);
double hardy_sobolev_bubble_derivative(int N, double s, double k, double r);
double aubin_talenti_bubble(int N, double r);
double aubin_talenti_bubble_derivative(int N, double r);

// Quintic smoothstep cutoff: 1 on [0, ρ], 0 beyond 2ρ, C^2.
double cutoff(double r, double rho);
double cutoff_derivative(double r, double rho);

RadialProfile bubble_profile(const BubbleSpec& spec, int N);

RadialFunction eval_bubble(const BubbleSpec& spec, int N, std::shared_ptr<const RadialGrid> grid);

// ω_{N-1} ∫ u'^2 r^{N-1} dr with u piecewise linear (exact on each cell).
double dirichlet_norm_sq(const RadialFunction& u, int N);
double dirichlet_norm_sq(const RadialGrid& grid, std::span<const double> u);

// Symmetric tridiagonal stiffness matrix of dirichlet_norm_sq, so that
// dirichlet_norm_sq(u) = u^T L u.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1
};

Tridiagonal stiffness_matrix(const RadialGrid& grid);

// Fraction of ∫|∇u|^2 inside B(0, radius); radius >= R gives 1.
double dirichlet_fraction(const RadialGrid& grid, std::span<const double> u, double radius);

// Number of nodes (from the origin) skipped by laplace_residual.
inline constexpr int kResidualSkip = 2;

// max over interior nodes i >= kResidualSkip of |u'' + (N-1)/r u' + rhs|
// with second-order nonuniform differences.
double laplace_residual(const RadialFunction& u, const RadialFunction& rhs, int N);

}  // namespace chs
