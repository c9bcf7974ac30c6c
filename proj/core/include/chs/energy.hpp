#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "chs/params.hpp"
#include "chs/radial.hpp"
#include "chs/singular_quadrature.hpp"

namespace chs {

struct EnergyBreakdown {
  double kinetic = 0.0;   // ½∫|∇u|²
  double nonlocal = 0.0;  // (λ/2p)∫∫|u|^p|u|^p/|x-y|^α
  double hardy = 0.0;     // (μ/q)∫|u|^q/|x|^s
  double total = 0.0;     // kinetic - nonlocal - hardy
};

// Discrete energy on a fixed grid with all quadrature weights precomputed.
// Holds the kernel by shared pointer; const member functions are safe to
// call concurrently.
class EnergyFunctional {
 public:
  EnergyFunctional(const ProblemParams& params, std::shared_ptr<const KernelMatrix> kernel);

  const ProblemParams& params() const { return params_; }
  const RadialGrid& grid() const { return kernel_->grid(); }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return kernel_->grid_ptr(); }
  const KernelMatrix& kernel() const { return *kernel_; }
  std::size_t size() const { return kernel_->size(); }

  EnergyBreakdown energy(std::span<const double> u) const;
  // Energy and its exact nodal gradient; the boundary component is zero.
  EnergyBreakdown energy_and_gradient(std::span<const double> u, std::span<double> grad) const;

  // Raw integrals A = ∫|∇u|², B = ∫∫|u|^p|u|^p/|x-y|^α, D = ∫|u|^q/|x|^s.
  double kinetic_integral(std::span<const double> u) const;
  double nonlocal_integral(std::span<const double> u) const;
  double hardy_integral(std::span<const double> u) const;

  // H¹₀ inner product (∇u, ∇v) and the Riesz map of a dual vector:
  // solves L x = g with the boundary node held at 0.
  double inner(std::span<const double> u, std::span<const double> v) const;
  std::vector<double> riesz_map(std::span<const double> g) const;
  // sqrt(g^T L^{-1} g)
  double dual_norm(std::span<const double> g) const;

 private:
  ProblemParams params_;
  std::shared_ptr<const KernelMatrix> kernel_;
  Tridiagonal stiffness_;
  std::vector<double> hardy_weights_;
};

EnergyBreakdown energy(const RadialFunction& u, const ProblemParams& params,
                       std::shared_ptr<const KernelMatrix> kernel);

// Dual vector of the same length as u; entry M-1 is zero.
std::vector<double> energy_gradient(const RadialFunction& u, const ProblemParams& params,
                                    std::shared_ptr<const KernelMatrix> kernel);

struct FiberProfile {
  double A = 0.0;
  double B = 0.0;
  double D = 0.0;
  double exponent_nonlocal = 0.0;  // 2p
  double exponent_hardy = 0.0;     // q
  double t_star = 0.0;
  double h_star = 0.0;
  std::vector<double> t_samples;
  std::vector<double> h_samples;
};

// h(t) = A t²/2 - λB t^{2p}/(2p) - μD t^q/q
double fiber_value(double A, double lambda_B, double mu_D, double p, double q, double t);

// Maximizes h over t > 0 by bracketing on [1e-6, T] (T doubled until
// h' < 0) and bisection of every sign change of h'; the root with the
// largest h wins.
FiberProfile fiber_max(double A, double B, double D, double lambda, double mu, double p, double q);
FiberProfile fiber_max(const RadialFunction& u, const ProblemParams& params,
                       std::shared_ptr<const KernelMatrix> kernel);

class GeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MountainPassGeometry {
  double rho = 0.0;         // radius of the certified sphere ‖u‖ = ρ
  double beta = 0.0;        // certified lower bound of I on that sphere
  double probe_beta = 0.0;  // I(ρ probe/‖probe‖)
  double e_scale = 0.0;     // t* with I(t* probe) < 0
  double ball_constant_nonlocal = 0.0;
  double ball_constant_hardy = 0.0;
};

// Certifies I >= β > 0 on ‖u‖ = ρ via
// ½ρ² - (λ/2p) C_B ρ^{2p} - (μ/q) C_D ρ^q with C_B, C_D built from the HLS,
// Sobolev, Hölder and Hardy-Sobolev inequalities on B(0, R); then finds
// the endpoint scale along the probe. Throws GeometryError when no
// positive β exists for ρ >= 1e-6.
MountainPassGeometry mp_geometry_check(const ProblemParams& params, const RadialFunction& probe,
                                       std::shared_ptr<const KernelMatrix> kernel);

}  // namespace chs
