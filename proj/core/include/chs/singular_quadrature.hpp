#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chs/quadrature.hpp"
#include "chs/radial.hpp"

namespace chs {

// Average of |x - y|^{-α} over |y| = r2 with |x| = r1. Symmetric in
// (r1, r2) bit for bit. On the diagonal the value is +inf when α >= N - 1.
double riesz_angular_kernel(double r1, double r2, double alpha, int N);

// Same average with the radial gap |r1 - r2| supplied by the caller, for
// integrands that approach the diagonal closer than rounding of r1 - r2
// allows.
double riesz_angular_kernel_gap(double r1, double r2, double gap, double alpha, int N);

// Dense weighted kernel: K[i][j] = ω² r_i^{N-1} r_j^{N-1} w_i w_j k(r_i, r_j)
// off the diagonal. Diagonal entries are integrals of the weighted kernel
// over the dual cell squared, which stay finite for every α < N.
class KernelMatrix {
 public:
  KernelMatrix(std::shared_ptr<const RadialGrid> grid, double alpha, std::vector<double> entries);

  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  double alpha() const { return alpha_; }
  int dimension() const { return grid_->dimension(); }
  std::size_t size() const { return grid_->size(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
  const std::vector<double>& entries() const { return entries_; }

  // y = K x
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::shared_ptr<const RadialGrid> grid_;
  double alpha_;
  std::vector<double> entries_;
};

// Assembly splits rows across up to `threads` workers (0 = hardware
// concurrency). The result does not depend on the thread count.
std::shared_ptr<const KernelMatrix> assemble_riesz_matrix(std::shared_ptr<const RadialGrid> grid,
                                                          double alpha, unsigned threads = 0);

// Binary cache: header (N, α, M, R, grading) then row-major float64
// entries, all little-endian. Files are keyed by (N, α, grid hash).
std::filesystem::path kernel_cache_path(const std::filesystem::path& dir, const RadialGrid& grid,
                                        double alpha);
void save_kernel(const KernelMatrix& kernel, const std::filesystem::path& file);
// Returns nullopt when the file is missing or its header does not match.
std::optional<std::shared_ptr<const KernelMatrix>> load_kernel(
    const std::filesystem::path& file, std::shared_ptr<const RadialGrid> grid, double alpha);
std::shared_ptr<const KernelMatrix> cached_riesz_matrix(const std::filesystem::path& dir,
                                                        std::shared_ptr<const RadialGrid> grid,
                                                        double alpha);

// Σ_ij |u_i|^p K_ij |u_j|^p
double riesz_double_integral(const RadialFunction& u, double p, const KernelMatrix& kernel);

// Weights W_i with Σ W_i |u_i|^q = ω ∫ I[|u|^q](r) r^{N-1-s} dr, where I is
// the piecewise linear interpolant; the weight is integrated exactly.
std::vector<double> hardy_weights(const RadialGrid& grid, double s);

double hardy_weighted_integral(const RadialFunction& u, double q, double s, int N);

// Integrals of closed-form profiles on [0, support) with graded Gauss rules.
struct ProfileQuadrature {
  quad::GradedRule rule{12, 25, 0.25, 2};
};

// ω ∫ f(r) r^{N-1-s} dr, with f supplied directly.
double radial_integral(const std::function<double(double)>& f, int N, double s,
                       std::span<const double> scales, double support,
                       const ProfileQuadrature& pq = {});

// ∫∫ f(|x|) f(|y|) |x - y|^{-α} dx dy for a radial density f >= 0.
double riesz_double_integral_profile(const std::function<double(double)>& density, int N,
                                     double alpha, std::span<const double> scales, double support,
                                     const ProfileQuadrature& pq = {});

}  // namespace chs
