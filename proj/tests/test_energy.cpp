#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chs/energy.hpp"
#include "chs/mountain_pass.hpp"

namespace chs {
namespace {

ProblemParams case_one() {
  ProblemParams pr;
  pr.N = 3;
  pr.alpha = 1.0;
  pr.s = 0.5;
  pr.p = 3.0;
  pr.q = 4.0;
  return pr;
}

class EnergyTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    grid_ = RadialGrid::make(1.0, 96, 2.0);
    kernel_ = assemble_riesz_matrix(grid_, 1.0);
  }
  static void TearDownTestSuite() {
    kernel_.reset();
    grid_.reset();
  }

  static std::vector<double> bump(double amp) {
    std::vector<double> u(grid_->size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = (*grid_)[i];
      u[i] = amp * (1.0 - r * r) * (1.0 + 0.5 * std::cos(3.0 * r));
    }
    u.back() = 0.0;
    return u;
  }

  static inline std::shared_ptr<const RadialGrid> grid_;
  static inline std::shared_ptr<const KernelMatrix> kernel_;
};

TEST_F(EnergyTest, BreakdownAndScaling) {
  const EnergyFunctional F(case_one(), kernel_);
  const auto u = bump(1.0);
  const auto e = F.energy(u);
  EXPECT_NEAR(e.total, e.kinetic - e.nonlocal - e.hardy, 1e-14);
  EXPECT_NEAR(e.kinetic, 0.5 * dirichlet_norm_sq(*grid_, u), 1e-13);
  EXPECT_NEAR(e.nonlocal, F.nonlocal_integral(u) / 6.0, 1e-14);
  EXPECT_NEAR(e.hardy, F.hardy_integral(u) / 4.0, 1e-14);

  const double t = 1.7;
  const auto v = bump(t);
  EXPECT_NEAR(F.kinetic_integral(v) / F.kinetic_integral(u), t * t, 1e-12);
  EXPECT_NEAR(F.nonlocal_integral(v) / F.nonlocal_integral(u), std::pow(t, 6.0), 1e-11);
  EXPECT_NEAR(F.hardy_integral(v) / F.hardy_integral(u), std::pow(t, 4.0), 1e-12);
}

TEST_F(EnergyTest, GradientMatchesDifferences) {
  const EnergyFunctional F(case_one(), kernel_);
  const auto u = bump(1.3);
  std::vector<double> g(u.size());
  F.energy_and_gradient(u, g);
  EXPECT_EQ(g.back(), 0.0);
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(u.size());
    for (auto& x : v) x = n01(rng) * 0.1;
    v.back() = 0.0;
    const double h = 1e-5;
    std::vector<double> up(u), um(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      up[i] += h * v[i];
      um[i] -= h * v[i];
    }
    const double fd = (F.energy(up).total - F.energy(um).total) / (2 * h);
    double dir = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dir += g[i] * v[i];
    EXPECT_NEAR(dir, fd, 1e-6 * (1.0 + std::abs(fd))) << trial;
  }
}

TEST_F(EnergyTest, FreeFunctionsAgree) {
  const auto pr = case_one();
  const RadialFunction u(grid_, bump(0.8));
  const EnergyFunctional F(pr, kernel_);
  std::vector<double> g(u.size());
  const auto e = F.energy_and_gradient(u.values(), g);
  EXPECT_EQ(energy(u, pr, kernel_).total, e.total);
  EXPECT_EQ(energy_gradient(u, pr, kernel_), g);
}

TEST_F(EnergyTest, RieszMapAndDualNorm) {
  const EnergyFunctional F(case_one(), kernel_);
  std::vector<double> g(grid_->size());
  F.energy_and_gradient(bump(1.0), g);
  const auto x = F.riesz_map(g);
  EXPECT_EQ(x.back(), 0.0);
  const auto v = bump(0.3);
  double gv = 0.0;
  double gx = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    gv += g[i] * v[i];
    gx += g[i] * x[i];
  }
  EXPECT_NEAR(F.inner(x, v), gv, 1e-11 * (1.0 + std::abs(gv)));
  EXPECT_NEAR(F.dual_norm(g), std::sqrt(gx), 1e-12);
  EXPECT_NEAR(F.inner(v, v), F.kinetic_integral(v), 1e-13);
}

TEST(FiberMax, EqualPowersClosedForm) {
  // 2p = q: h* = (1/2 - 1/q) A^{q/(q-2)} / (λB + μD)^{2/(q-2)}.
  const double A = 2.3, B = 0.7, D = 1.9, lambda = 1.5, mu = 0.4, p = 2.0, q = 4.0;
  const auto fp = fiber_max(A, B, D, lambda, mu, p, q);
  const double c = lambda * B + mu * D;
  EXPECT_NEAR(fp.h_star, (0.5 - 1.0 / q) * std::pow(A, q / (q - 2)) / std::pow(c, 2.0 / (q - 2)), 1e-12);
  EXPECT_NEAR(fp.t_star, std::pow(A / c, 1.0 / (q - 2)), 1e-12);
}

TEST(FiberMax, DominatesSamplesAndSinglePower) {
  const double A = 1.0, B = 0.2, D = 3.0;
  const auto fp = fiber_max(A, B, D, 1.0, 2.0, 2.5, 3.0);
  ASSERT_FALSE(fp.t_samples.empty());
  for (std::size_t i = 0; i < fp.t_samples.size(); ++i) EXPECT_LE(fp.h_samples[i], fp.h_star + 1e-12);
  for (double t = 0.01; t < 3.0; t += 0.01) EXPECT_LE(fiber_value(A, B, 6.0, 2.5, 3.0, t), fp.h_star + 1e-12);

  // λ = 0 leaves a single power q: h* = (1/2 - 1/q) A^{q/(q-2)} (μD)^{-2/(q-2)}.
  const auto only = fiber_max(A, B, D, 0.0, 2.0, 2.5, 3.0);
  EXPECT_NEAR(only.h_star, (0.5 - 1.0 / 3.0) * std::pow(6.0, -2.0), 1e-12);
}

TEST(FiberMax, Rejects) {
  EXPECT_THROW(fiber_max(0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 4.0), std::invalid_argument);
  EXPECT_THROW(fiber_max(1.0, 0.0, 1.0, 1.0, 0.0, 2.0, 4.0), std::invalid_argument);
}

TEST_F(EnergyTest, FiberOfFunctionUsesIntegrals) {
  const auto pr = case_one();
  const RadialFunction u(grid_, bump(1.0));
  const EnergyFunctional F(pr, kernel_);
  const auto fp = fiber_max(u, pr, kernel_);
  EXPECT_EQ(fp.A, F.kinetic_integral(u.values()));
  EXPECT_NEAR(F.energy(u.scaled(fp.t_star).values()).total, fp.h_star, 1e-10 * fp.h_star);
}

TEST_F(EnergyTest, GeometryCertificate) {
  const auto pr = case_one();
  const auto probe = default_probe(grid_);
  const auto geo = mp_geometry_check(pr, probe, kernel_);
  EXPECT_GT(geo.rho, 0.0);
  EXPECT_GT(geo.beta, 0.0);
  EXPECT_GT(geo.probe_beta, 0.0);
  const EnergyFunctional F(pr, kernel_);
  EXPECT_LT(F.energy(probe.scaled(geo.e_scale).values()).total, 0.0);
  EXPECT_GT(geo.e_scale * std::sqrt(F.kinetic_integral(probe.values())), geo.rho);
}

TEST_F(EnergyTest, GeometryFailsWithoutCoercivity) {
  auto pr = case_one();
  pr.s = 2.0;
  pr.q = 2.0;
  pr.mu = 0.3;
  EXPECT_THROW(mp_geometry_check(pr, default_probe(grid_), kernel_), GeometryError);
}

}  // namespace
}  // namespace chs
