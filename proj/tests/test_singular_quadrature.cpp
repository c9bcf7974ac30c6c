#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "chs/params.hpp"
#include "chs/sharp_constants.hpp"
#include "chs/singular_quadrature.hpp"

namespace chs {
namespace {

constexpr double kPi = std::numbers::pi;

// Sphere average in R^3 in closed form.
double kernel3(double a, double b, double alpha) {
  if (alpha == 2.0) return std::log((a + b) / std::abs(a - b)) / (2.0 * a * b);
  return (std::pow(a + b, 2.0 - alpha) - std::pow(std::abs(a - b), 2.0 - alpha)) / (2.0 * a * b * (2.0 - alpha));
}

// Sphere average in R^N as a weighted integral over t = cos θ.
double kernel_tanh_sinh(double a, double b, double alpha, int N) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double t) {
    return std::pow(a * a + b * b - 2.0 * a * b * t, -alpha / 2.0) * std::pow(1.0 - t * t, (N - 3) / 2.0);
  };
  const double norm = std::sqrt(kPi) * boost::math::tgamma((N - 1) / 2.0) / boost::math::tgamma(N / 2.0);
  return ts.integrate(f, -1.0, 1.0) / norm;
}

TEST(AngularKernel, ClosedFormInThreeDimensions) {
  for (double alpha : {0.3, 1.0, 2.0, 2.7}) {
    for (auto [a, b] : {std::pair{0.1, 1.0}, {0.5, 0.51}, {2.0, 1.0}, {1e-3, 3.0}, {1.0, 1.0 + 1e-7}}) {
      const double ref = kernel3(a, b, alpha);
      EXPECT_NEAR(riesz_angular_kernel(a, b, alpha, 3) / ref, 1.0, 1e-9) << alpha << " " << a << " " << b;
    }
  }
}

TEST(AngularKernel, HigherDimensions) {
  for (int N : {4, 5, 7}) {
    for (double alpha : {0.5, 1.5, 3.0}) {
      for (auto [a, b] : {std::pair{0.2, 1.0}, {0.9, 1.0}, {1.0, 0.5}}) {
        const double ref = kernel_tanh_sinh(a, b, alpha, N);
        EXPECT_NEAR(riesz_angular_kernel(a, b, alpha, N) / ref, 1.0, 1e-9) << N << " " << alpha << " " << a;
      }
    }
  }
}

TEST(AngularKernel, Diagonal) {
  for (double alpha : {0.5, 1.0, 1.8}) {
    const double r = 0.7;
    const double ref = std::pow(2.0, 1.0 - alpha) * std::pow(r, -alpha) / (2.0 - alpha);
    EXPECT_NEAR(riesz_angular_kernel(r, r, alpha, 3) / ref, 1.0, 1e-9) << alpha;
  }
  EXPECT_TRUE(std::isinf(riesz_angular_kernel(0.7, 0.7, 2.0, 3)));
  EXPECT_TRUE(std::isinf(riesz_angular_kernel(0.7, 0.7, 2.5, 3)));
  EXPECT_NEAR(riesz_angular_kernel(0.0, 2.0, 1.5, 4), std::pow(2.0, -1.5), 1e-15);
}

TEST(AngularKernel, SymmetricBitForBit) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-4, 3.0);
  for (int t = 0; t < 200; ++t) {
    const double a = u(rng);
    const double b = u(rng);
    for (int N : {3, 5}) EXPECT_EQ(riesz_angular_kernel(a, b, 1.3, N), riesz_angular_kernel(b, a, 1.3, N));
  }
}

TEST(AngularKernel, MonteCarloInFourDimensions) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n01;
  const double a = 0.6;
  const double b = 1.0;
  const double alpha = 1.2;
  double sum = 0.0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    double y[4];
    double norm = 0.0;
    for (double& c : y) {
      c = n01(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    double d2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double diff = b * y[k] / norm - (k == 0 ? a : 0.0);
      d2 += diff * diff;
    }
    sum += std::pow(d2, -alpha / 2.0);
  }
  EXPECT_NEAR(riesz_angular_kernel(a, b, alpha, 4) / (sum / n), 1.0, 5e-3);
}

TEST(AngularKernel, Rejects) {
  EXPECT_THROW(riesz_angular_kernel(0.5, 1.0, 3.0, 3), std::invalid_argument);
  EXPECT_THROW(riesz_angular_kernel(0.5, 1.0, 0.0, 3), std::invalid_argument);
  EXPECT_THROW(riesz_angular_kernel(0.5, 1.0, 1.0, 2), std::invalid_argument);
}

TEST(KernelMatrix, SymmetricPositiveAndThreadIndependent) {
  const auto g = RadialGrid::make(1.0, 64, 2.0);
  const auto k1 = assemble_riesz_matrix(g, 2.0, 1);
  const auto k4 = assemble_riesz_matrix(g, 2.0, 4);
  EXPECT_EQ(k1->entries(), k4->entries());
  for (std::size_t i = 0; i < 64; ++i) {
    for (std::size_t j = 0; j < 64; ++j) {
      EXPECT_EQ((*k1)(i, j), (*k1)(j, i));
      EXPECT_TRUE(std::isfinite((*k1)(i, j)));
      EXPECT_GE((*k1)(i, j), 0.0);
    }
  }
  std::vector<double> x(64, 1.0);
  std::vector<double> y(64);
  k1->apply(x, y);
  double direct = 0.0;
  for (std::size_t j = 0; j < 64; ++j) direct += (*k1)(5, j);
  EXPECT_NEAR(y[5], direct, 1e-12 * direct);
}

TEST(KernelMatrix, CacheRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "chs_kernel_cache_test";
  std::filesystem::remove_all(dir);
  const auto g = RadialGrid::make(1.0, 32, 2.0);
  const auto k = cached_riesz_matrix(dir, g, 1.0);
  const auto file = kernel_cache_path(dir, *g, 1.0);
  ASSERT_TRUE(std::filesystem::exists(file));
  const auto loaded = load_kernel(file, g, 1.0);
  ASSERT_TRUE(loaded);
  EXPECT_EQ((*loaded)->entries(), k->entries());
  EXPECT_FALSE(load_kernel(file, g, 1.5));
  EXPECT_FALSE(load_kernel(file, RadialGrid::make(1.0, 32, 2.5), 1.0));
  EXPECT_FALSE(load_kernel(dir / "missing.bin", g, 1.0));
  EXPECT_NE(kernel_cache_path(dir, *g, 1.0), kernel_cache_path(dir, *g, 1.5));
  EXPECT_EQ(cached_riesz_matrix(dir, g, 1.0)->entries(), k->entries());
  std::filesystem::remove_all(dir);
}

TEST(HardyWeights, ExactMoments) {
  for (double s : {0.0, 0.5, 1.9, 2.0}) {
    const auto g = RadialGrid::make(1.5, 40, 2.0);
    const auto W = hardy_weights(*g, s);
    double m0 = 0.0;
    double m1 = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i) {
      m0 += W[i];
      m1 += W[i] * (*g)[i];
    }
    EXPECT_NEAR(m0, omega(3) * std::pow(1.5, 3.0 - s) / (3.0 - s), 1e-12) << s;
    EXPECT_NEAR(m1, omega(3) * std::pow(1.5, 4.0 - s) / (4.0 - s), 1e-12) << s;
  }
}

double gaussian_pair(double alpha) {
  // Two independent Gaussians of variance 1/2: the difference is standard normal.
  return std::pow(kPi, 3.0) * std::pow(2.0, -alpha / 2.0) * boost::math::tgamma((3.0 - alpha) / 2.0) /
         boost::math::tgamma(1.5);
}

TEST(ProfileDoubleIntegral, Gaussian) {
  const double scale[] = {1.0};
  for (double alpha : {0.5, 1.0, 2.0, 2.5}) {
    const double v = riesz_double_integral_profile([](double r) { return std::exp(-r * r); }, 3, alpha, scale,
                                                   INFINITY);
    EXPECT_NEAR(v / gaussian_pair(alpha), 1.0, 1e-8) << alpha;
  }
}

TEST(ProfileDoubleIntegral, HlsExtremalAttainsConstant) {
  for (double alpha : {1.0, 2.0}) {
    const double t = 6.0 / (6.0 - alpha);
    auto f = [&](double r) { return std::pow(1.0 + r * r, -(6.0 - alpha) / 2.0); };
    const double scale[] = {1.0};
    const double lhs = riesz_double_integral_profile(f, 3, alpha, scale, INFINITY);
    const double norm = radial_integral([&](double r) { return std::pow(f(r), t); }, 3, 0.0, scale, INFINITY);
    EXPECT_NEAR(lhs / (hls_sharp_constant(3, alpha) * std::pow(norm, 2.0 / t)), 1.0, 1e-7) << alpha;
  }
}

TEST(ProfileDoubleIntegral, RandomProfilesObeyHls) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const double alpha = 1.5;
  const double t = 6.0 / (6.0 - alpha);
  for (int trial = 0; trial < 8; ++trial) {
    const double a1 = u(rng), a2 = u(rng), c2 = u(rng), w = u(rng);
    auto f = [=](double r) { return std::exp(-a1 * r * r) + c2 * std::exp(-a2 * (r - w) * (r - w)); };
    const double scales[] = {0.5, w, 2.0};
    const double lhs = riesz_double_integral_profile(f, 3, alpha, scales, INFINITY);
    const double norm = radial_integral([&](double r) { return std::pow(f(r), t); }, 3, 0.0, scales, INFINITY);
    EXPECT_LE(lhs, hls_sharp_constant(3, alpha) * std::pow(norm, 2.0 / t) * (1.0 + 1e-9)) << trial;
    EXPECT_GT(lhs, 0.0);
  }
}

TEST(GridDoubleIntegral, ConvergesToGaussian) {
  const auto err = [](int M, double alpha) {
    const auto g = RadialGrid::make(6.0, M, 1.0);
    const auto u = RadialFunction::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
    const auto k = assemble_riesz_matrix(g, alpha);
    return std::abs(riesz_double_integral(u, 2.0, *k) / gaussian_pair(alpha) - 1.0);
  };
  EXPECT_LT(err(256, 1.0), 2e-3);
  EXPECT_LT(err(256, 2.0), 2e-2);
  EXPECT_GT(err(128, 1.0) / err(256, 1.0), 1.8);
}

}  // namespace
}  // namespace chs
