#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "chs/quadrature.hpp"

namespace chs::quad {
namespace {

TEST(GaussLegendre, WeightsSumToTwo) {
  for (int n : {1, 2, 5, 12, 33, 64}) {
    const auto& r = gauss_legendre(n);
    ASSERT_EQ(r.x.size(), static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double w : r.w) sum += w;
    EXPECT_NEAR(sum, 2.0, 1e-14) << n;
  }
}

TEST(GaussLegendre, ExactForDegree2nMinus1) {
  for (int n : {3, 8, 20}) {
    const auto& r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < r.x.size(); ++i) sum += r.w[i] * std::pow(r.x[i], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(sum, exact, 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, RejectsOutOfRange) {
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
  EXPECT_THROW(gauss_legendre(65), std::invalid_argument);
}

TEST(IntegrateGraded, EndpointSingularity) {
  auto f = [](double x) { return std::pow(x, -0.5); };
  EXPECT_NEAR(integrate_graded(f, 0.0, 1.0, true, false, {12, 30, 0.25, 2}), 2.0, 1e-8);
  auto g = [](double x) { return std::log(x); };
  EXPECT_NEAR(integrate_graded(g, 0.0, 1.0, true, false, {12, 30, 0.25, 2}), -1.0, 1e-12);
}

TEST(IntegrateGraded, BothEnds) {
  // Grading toward 1 stops near rounding of the endpoint, which limits
  // the resolution of a singularity there.
  auto f = [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); };
  EXPECT_NEAR(integrate_graded(f, 0.0, 1.0, true, true, {12, 30, 0.25, 2}), std::numbers::pi, 1e-5);
  auto g = [](double x) { return std::log(x * (1.0 - x)); };
  EXPECT_NEAR(integrate_graded(g, 0.0, 1.0, true, true, {12, 30, 0.25, 2}), -2.0, 1e-10);
}

TEST(IntegrateGraded, GradedEndNeverEvaluated) {
  auto f = [](double x) { return x == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  EXPECT_NEAR(integrate_graded(f, 0.0, 3.0, true, false), 3.0, 1e-13);
}

TEST(IntegrateToInfinity, PowerDecay) {
  auto f = [](double r) { return 1.0 / (1.0 + r * r); };
  EXPECT_NEAR(integrate_to_infinity(f, 0.0 + 1.0, false), std::numbers::pi / 4.0, 1e-12);
}

TEST(IntegrateBreakpoints, GaussianMoment) {
  auto f = [](double r) { return r * r * std::exp(-r * r); };
  const Breakpoint pts[] = {{0.0, true}, {1.0, false}, {4.0, false}, {std::numeric_limits<double>::infinity(), false}};
  EXPECT_NEAR(integrate_breakpoints(f, std::span<const Breakpoint>(pts)), std::sqrt(std::numbers::pi) / 4.0, 1e-12);
}

}  // namespace
}  // namespace chs::quad
