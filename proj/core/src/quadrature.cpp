#include "chs/quadrature.hpp"

#include <array>
#include <numbers>
#include <stdexcept>

namespace chs::quad {
namespace {

constexpr int kMaxRule = 64;

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::array<GaussRule, kMaxRule + 1> rules = [] {
    std::array<GaussRule, kMaxRule + 1> r;
    for (int k = 1; k <= kMaxRule; ++k) r[k] = build_rule(k);
    return r;
  }();
  if (n < 1 || n > kMaxRule) throw std::invalid_argument("gauss_legendre: order must be in [1, 64]");
  return rules[n];
}

}  // namespace chs::quad
