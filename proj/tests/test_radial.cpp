#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "chs/params.hpp"
#include "chs/radial.hpp"

namespace chs {
namespace {

TEST(RadialGrid, Validation) {
  EXPECT_THROW(RadialGrid::make(1.0, 15, 2.0), std::invalid_argument);
  EXPECT_THROW(RadialGrid::make(0.0, 64, 2.0), std::invalid_argument);
  EXPECT_THROW(RadialGrid::make(1.0, 64, 0.5), std::invalid_argument);
  EXPECT_THROW(RadialGrid::make(1.0, 64, 2.0, 2), std::invalid_argument);
  EXPECT_THROW(RadialGrid({0.0, 0.5, 0.5, 1.0}, 1.0, 3), std::invalid_argument);
}

TEST(RadialGrid, NodesAndWeights) {
  const auto g = RadialGrid::make(2.0, 65, 2.0);
  EXPECT_EQ(g->size(), 65u);
  EXPECT_EQ((*g)[0], 0.0);
  EXPECT_EQ(g->radius(), 2.0);
  EXPECT_DOUBLE_EQ((*g)[32], 0.5);
  double wsum = 0.0;
  for (double w : g->trapezoid_weights()) wsum += w;
  EXPECT_NEAR(wsum, 2.0, 1e-14);
  double msum = 0.0;
  for (double m : g->cell_moments()) msum += m;
  EXPECT_NEAR(msum, 8.0 / 3.0, 1e-13);
}

TEST(RadialGrid, Hash) {
  const auto a = RadialGrid::make(1.0, 64, 2.0);
  const auto b = RadialGrid::make(1.0, 64, 2.0);
  EXPECT_EQ(a->hash(), b->hash());
  EXPECT_NE(a->hash(), RadialGrid::make(1.0, 64, 2.5)->hash());
  EXPECT_NE(a->hash(), RadialGrid::make(1.0, 65, 2.0)->hash());
  EXPECT_NE(a->hash(), RadialGrid::make(1.0, 64, 2.0, 4)->hash());
}

TEST(RadialFunction, BoundaryAndFiniteness) {
  const auto g = RadialGrid::make(1.0, 32, 1.0);
  std::vector<double> v(32, 1.0);
  EXPECT_THROW(RadialFunction(g, std::vector<double>(31, 0.0)), std::invalid_argument);
  v[3] = NAN;
  EXPECT_THROW(RadialFunction(g, v, false), std::invalid_argument);
  const auto u = RadialFunction::sample(g, [](double r) { return 2.0 - r; });
  EXPECT_EQ(u.values().back(), 0.0);
  EXPECT_EQ(u.scaled(3.0)[0], 6.0);
}

TEST(RadialFunction, CsvHeader) {
  const auto g = RadialGrid::make(1.0, 16, 1.0);
  std::ostringstream os;
  RadialFunction::sample(g, [](double r) { return 1.0 - r; }).write_csv(os);
  EXPECT_EQ(os.str().substr(0, 4), "r,u\n");
}

TEST(DirichletNorm, ExactForPiecewiseLinear) {
  // u = 1 - r on the unit ball: ω ∫ r^{N-1} dr = ω/N.
  for (int N : {3, 4, 6}) {
    const auto g = RadialGrid::make(1.0, 40, 2.0, N);
    const auto u = RadialFunction::sample(g, [](double r) { return 1.0 - r; });
    EXPECT_NEAR(dirichlet_norm_sq(u, N), omega(N) / N, 1e-13) << N;
  }
}

TEST(DirichletNorm, QuadraticConverges) {
  // u = 1 - r²: ω ∫ 4 r^{N+1} dr = 4ω/(N+2).
  const double exact = 4.0 * omega(3) / 5.0;
  const auto err = [&](int M) {
    const auto g = RadialGrid::make(1.0, M, 1.5);
    return std::abs(dirichlet_norm_sq(RadialFunction::sample(g, [](double r) { return 1.0 - r * r; }), 3) - exact);
  };
  EXPECT_LT(err(400), 1e-4);
  EXPECT_GT(err(200) / err(400), 3.5);
}

TEST(DirichletNorm, StiffnessMatrixMatchesQuadraticForm) {
  const auto g = RadialGrid::make(1.0, 50, 2.0);
  const auto L = stiffness_matrix(*g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 10; ++t) {
    std::vector<double> u(50);
    for (auto& x : u) x = n01(rng);
    double q = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      q += L.diag[i] * u[i] * u[i];
      if (i + 1 < u.size()) q += 2.0 * L.off[i] * u[i] * u[i + 1];
    }
    EXPECT_NEAR(q, dirichlet_norm_sq(*g, u), 1e-10 * std::abs(q));
  }
}

TEST(DirichletFraction, Values) {
  const auto g = RadialGrid::make(1.0, 65, 2.0);
  const auto u = RadialFunction::sample(g, [](double r) { return 1.0 - r; });
  EXPECT_EQ(dirichlet_fraction(*g, u.values(), 1.0), 1.0);
  EXPECT_EQ(dirichlet_fraction(*g, u.values(), 5.0), 1.0);
  EXPECT_NEAR(dirichlet_fraction(*g, u.values(), 0.25), 1.0 / 64.0, 1e-13);
  // Within a cell.
  EXPECT_NEAR(dirichlet_fraction(*g, u.values(), 0.3), 0.027, 1e-13);
  double prev = 0.0;
  for (double r = 0.05; r < 1.0; r += 0.05) {
    const double f = dirichlet_fraction(*g, u.values(), r);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(Bubbles, DerivativesMatchDifferences) {
  const double h = 1e-6;
  for (double r : {0.01, 0.3, 1.0, 4.0}) {
    const double fd_at = (aubin_talenti_bubble(3, r + h) - aubin_talenti_bubble(3, r - h)) / (2 * h);
    EXPECT_NEAR(aubin_talenti_bubble_derivative(3, r), fd_at, 1e-7) << r;
    for (double s : {0.0, 0.7, 1.5}) {
      const double fd = (hardy_sobolev_bubble(4, s, 2.0, r + h) - hardy_sobolev_bubble(4, s, 2.0, r - h)) / (2 * h);
      EXPECT_NEAR(hardy_sobolev_bubble_derivative(4, s, 2.0, r), fd, 1e-6) << r << " " << s;
    }
  }
}

TEST(Bubbles, HardySobolevWithZeroWeightIsAubinTalenti) {
  for (double r : {0.0, 0.5, 3.0}) EXPECT_NEAR(hardy_sobolev_bubble(5, 0.0, 1.0, r), aubin_talenti_bubble(5, r), 1e-14);
}

TEST(Bubbles, SolveCriticalEquation) {
  // -ΔU = U^5 in R^3; the discrete residual falls at second order.
  const auto residual = [](int M) {
    const auto g = RadialGrid::make(2.0, M, 1.0);
    const auto u = RadialFunction::sample(g, [](double r) { return aubin_talenti_bubble(3, r); }, false);
    const auto f = RadialFunction::sample(g, [](double r) { return std::pow(aubin_talenti_bubble(3, r), 5.0); }, false);
    return laplace_residual(u, f, 3);
  };
  const double e1 = residual(200);
  const double e2 = residual(400);
  EXPECT_LT(e2, 1e-2);
  EXPECT_GT(e1 / e2, 3.5);
}

TEST(Cutoff, Properties) {
  const double rho = 0.4;
  EXPECT_EQ(cutoff(0.0, rho), 1.0);
  EXPECT_EQ(cutoff(rho, rho), 1.0);
  EXPECT_EQ(cutoff(2 * rho, rho), 0.0);
  EXPECT_EQ(cutoff(3.0, rho), 0.0);
  double prev = 1.0;
  for (double r = rho; r <= 2 * rho; r += 0.01) {
    EXPECT_LE(cutoff(r, rho), prev + 1e-15);
    prev = cutoff(r, rho);
  }
  const double h = 1e-7;
  for (double r : {0.45, 0.6, 0.75}) {
    EXPECT_NEAR(cutoff_derivative(r, rho), (cutoff(r + h, rho) - cutoff(r - h, rho)) / (2 * h), 1e-6);
  }
  EXPECT_NEAR(cutoff_derivative(rho, rho), 0.0, 1e-14);
  EXPECT_NEAR(cutoff_derivative(2 * rho, rho), 0.0, 1e-14);
}

TEST(BubbleSpec, Validation) {
  BubbleSpec sp;
  EXPECT_NO_THROW(sp.validate(1.0));
  sp.epsilon = 0.0;
  EXPECT_THROW(sp.validate(1.0), std::invalid_argument);
  sp = {};
  sp.cutoff_inner = 0.6;
  EXPECT_THROW(sp.validate(1.0), std::invalid_argument);
  sp = {};
  sp.family = BubbleFamily::HardySobolev;
  sp.s = 2.0;
  EXPECT_THROW(sp.validate(1.0), std::invalid_argument);
}

TEST(EvalBubble, ScalingAndSupport) {
  const auto g = RadialGrid::make(1.0, 129, 2.0);
  BubbleSpec sp;
  sp.epsilon = 0.01;
  sp.cutoff_inner = 0.25;
  const auto u = eval_bubble(sp, 3, g);
  EXPECT_NEAR(u[0], std::pow(0.01, -0.5) * aubin_talenti_bubble(3, 0.0), 1e-10);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if ((*g)[i] >= 0.5) EXPECT_EQ(u[i], 0.0);
    if ((*g)[i] <= 0.25) EXPECT_NEAR(u[i], std::pow(0.01, -0.5) * aubin_talenti_bubble(3, (*g)[i] / 0.01), 1e-10);
  }
  const auto prof = bubble_profile(sp, 3);
  EXPECT_EQ(prof.support, 0.5);
  sp.cut = false;
  EXPECT_TRUE(std::isinf(bubble_profile(sp, 3).support));
}

}  // namespace
}  // namespace chs
