#include "chs/sharp_constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chs {
namespace {

constexpr double kRefineTolerance = 1e-10;

ProfileQuadrature refined(const ProfileQuadrature& pq) {
  ProfileQuadrature out = pq;
  out.rule.points = pq.rule.points + 4;
  out.rule.levels = pq.rule.levels + 6;
  return out;
}

template <class F>
double checked(const F& integral, const ProfileQuadrature& pq, const char* what) {
  const double coarse = integral(pq);
  const double fine = integral(refined(pq));
  const double err = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
  if (!(err <= kRefineTolerance) || !std::isfinite(fine)) {
    throw QuadratureError(std::string(what) + ": quadrature did not converge", err);
  }
  return fine;
}

}  // namespace

double hls_sharp_constant(int N, double alpha) {
  if (N < 3) throw std::invalid_argument("hls_sharp_constant: N must be >= 3");
  if (!(alpha > 0.0 && alpha < N)) throw std::invalid_argument("hls_sharp_constant: alpha must lie in (0, N)");
  const double n = N;
  const double log_c = 0.5 * alpha * std::log(std::numbers::pi) + std::lgamma(0.5 * (n - alpha)) -
                       std::lgamma(0.5 * (2.0 * n - alpha)) +
                       (alpha / n - 1.0) * (std::lgamma(0.5 * n) - std::lgamma(n));
  return std::exp(log_c);
}

BubbleIntegrals hardy_sobolev_bubble_integrals(int N, double s, double k, double epsilon,
                                               const ProfileQuadrature& pq) {
  if (N < 3) throw std::invalid_argument("hardy_sobolev_bubble_integrals: N must be >= 3");
  if (!(s >= 0.0 && s < 2.0)) throw std::invalid_argument("hardy_sobolev_bubble_integrals: s must lie in [0, 2)");
  if (!(k > 0.0)) throw std::invalid_argument("hardy_sobolev_bubble_integrals: k must be > 0");
  BubbleSpec spec;
  spec.family = BubbleFamily::HardySobolev;
  spec.s = s;
  spec.k = k;
  spec.epsilon = epsilon;
  spec.cut = false;
  const RadialProfile prof = bubble_profile(spec, N);
  // The profile changes character at r ~ ε k^{1/(2-s)}.
  const double scale = epsilon * std::pow(k, 1.0 / (2.0 - s));
  const double scales[] = {scale};
  const double crit = derive_exponents(N, 1.0, s).hardy_sobolev;
  auto kinetic = [&](const ProfileQuadrature& rule) {
    return radial_integral([&](double r) { const double d = prof.derivative(r); return d * d; }, N, 0.0,
                           scales, prof.support, rule);
  };
  auto weighted = [&](const ProfileQuadrature& rule) {
    return radial_integral([&](double r) { return std::pow(prof.value(r), crit); }, N, s, scales,
                           prof.support, rule);
  };
  return {checked(kinetic, pq, "bubble kinetic integral"), checked(weighted, pq, "bubble weighted integral")};
}

double sobolev_constant(int N, double epsilon) {
  if (N < 3) throw std::invalid_argument("sobolev_constant: N must be >= 3");
  BubbleSpec spec;
  spec.family = BubbleFamily::AubinTalenti;
  spec.epsilon = epsilon;
  spec.cut = false;
  const RadialProfile prof = bubble_profile(spec, N);
  const double crit = 2.0 * N / (N - 2.0);
  const double scales[] = {epsilon};
  const ProfileQuadrature pq;
  const double grad = checked(
      [&](const ProfileQuadrature& rule) {
        return radial_integral([&](double r) { const double d = prof.derivative(r); return d * d; }, N, 0.0,
                               scales, prof.support, rule);
      },
      pq, "sobolev gradient integral");
  const double lp = checked(
      [&](const ProfileQuadrature& rule) {
        return radial_integral([&](double r) { return std::pow(prof.value(r), crit); }, N, 0.0, scales,
                               prof.support, rule);
      },
      pq, "sobolev L^{2*} integral");
  return grad / std::pow(lp, 2.0 / crit);
}

double hardy_sobolev_constant(int N, double s, double k) {
  if (!(s < 2.0)) throw std::invalid_argument("hardy_sobolev_constant: s = 2 is degenerate");
  const BubbleIntegrals b = hardy_sobolev_bubble_integrals(N, s, k);
  return std::pow(b.kinetic, (2.0 - s) / (N - s));
}

double hls_best_ratio(int N, double alpha) {
  if (!(alpha > 0.0 && alpha < N)) throw std::invalid_argument("hls_best_ratio: alpha must lie in (0, N)");
  BubbleSpec spec;
  spec.family = BubbleFamily::AubinTalenti;
  spec.cut = false;
  const RadialProfile prof = bubble_profile(spec, N);
  const double p = (2.0 * N - alpha) / (N - 2.0);
  const double scales[] = {1.0};
  const double grad = radial_integral([&](double r) { const double d = prof.derivative(r); return d * d; }, N,
                                      0.0, scales, prof.support);
  const double B = riesz_double_integral_profile([&](double r) { return std::pow(prof.value(r), p); }, N,
                                                 alpha, scales, prof.support);
  return grad / std::pow(B, 1.0 / p);
}

SharpConstants compute_sharp_constants(int N, double alpha, double s, bool with_best_ratio) {
  SharpConstants c;
  c.N = N;
  c.alpha = alpha;
  c.s = s;
  c.hls_constant = hls_sharp_constant(N, alpha);
  c.sobolev_constant = sobolev_constant(N);
  if (s < 2.0) c.hardy_sobolev_constant = hardy_sobolev_constant(N, s);
  if (with_best_ratio) c.hls_best_ratio = hls_best_ratio(N, alpha);
  return c;
}

std::optional<double> ThresholdReport::applicable() const {
  std::optional<double> out;
  if (hardy_sobolev_applies && hardy_sobolev_threshold) out = *hardy_sobolev_threshold;
  if (hls_applies) out = out ? std::min(*out, hls_threshold) : hls_threshold;
  return out;
}

ThresholdReport ps_thresholds(const ProblemParams& params, const SharpConstants& consts) {
  if (params.N != consts.N || !exponent_equal(params.alpha, consts.alpha) ||
      !exponent_equal(params.s, consts.s)) {
    throw std::invalid_argument("ps_thresholds: constants computed for a different (N, alpha, s)");
  }
  const DerivedExponents ex = derive_exponents(params);
  const double n = params.N;
  ThresholdReport t;
  if (params.s < 2.0 && consts.hardy_sobolev_constant) {
    const double s = params.s;
    t.hardy_sobolev_threshold = (2.0 - s) / (2.0 * (n - s)) * std::pow(params.mu, -(n - 2.0) / (2.0 - s)) *
                                std::pow(*consts.hardy_sobolev_constant, (n - s) / (2.0 - s));
    t.hardy_sobolev_applies = exponent_equal(params.q, ex.hardy_sobolev) && !exponent_equal(s, 2.0);
  }
  const double a = params.alpha;
  const double crit = ex.upper_critical;
  t.hls_threshold = (n - a + 2.0) / (2.0 * (2.0 * n - a)) *
                    std::pow(1.0 / (params.lambda * consts.hls_constant), 1.0 / (crit - 1.0)) *
                    std::pow(consts.sobolev_constant, crit / (crit - 1.0));
  t.hls_applies = exponent_equal(params.p, crit);
  return t;
}

}  // namespace chs
