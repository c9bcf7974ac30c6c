#include "chs/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chs {
namespace {

bool strictly_less(double a, double b) { return a < b && !exponent_equal(a, b); }
bool less_or_equal(double a, double b) { return a < b || exponent_equal(a, b); }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void validate_common(const ProblemParams& pr) {
  require(pr.N >= 3, "N: dimension must be >= 3");
  require(std::isfinite(pr.alpha) && pr.alpha > 0.0 && pr.alpha < pr.N, "alpha: must lie in (0, N)");
  require(std::isfinite(pr.s) && pr.s >= 0.0 && pr.s <= 2.0, "s: must lie in [0, 2]");
  const DerivedExponents ex = derive_exponents(pr.N, pr.alpha, pr.s);
  require(std::isfinite(pr.p) && pr.p > 1.0 && less_or_equal(pr.p, ex.upper_critical),
          "p: must lie in (1, (2N - alpha)/(N - 2)]");
  require(std::isfinite(pr.q) && less_or_equal(2.0, pr.q) && less_or_equal(pr.q, ex.hardy_sobolev),
          "q: must lie in [2, 2(N - s)/(N - 2)]");
  require(std::isfinite(pr.radius) && pr.radius > 0.0, "radius: must be > 0");
}

}  // namespace

bool exponent_equal(double a, double b) {
  return std::abs(a - b) <= kExponentTolerance * std::max(1.0, std::abs(b));
}

void ProblemParams::validate() const {
  validate_common(*this);
  require(std::isfinite(lambda) && lambda > 0.0, "lambda: must be > 0");
  require(std::isfinite(mu) && mu > 0.0, "mu: must be > 0");
}

void ProblemParams::validate_relaxed() const {
  validate_common(*this);
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda: must be >= 0");
  require(std::isfinite(mu) && mu >= 0.0, "mu: must be >= 0");
}

DerivedExponents derive_exponents(int N, double alpha, double s) {
  if (N < 3) throw std::invalid_argument("N: dimension must be >= 3");
  if (!(alpha > 0.0 && alpha < N)) throw std::invalid_argument("alpha: must lie in (0, N)");
  if (!(s >= 0.0 && s <= 2.0)) throw std::invalid_argument("s: must lie in [0, 2]");
  const double n = N;
  DerivedExponents ex{};
  ex.upper_critical = (2.0 * n - alpha) / (n - 2.0);
  ex.lower_critical = (2.0 * n - alpha) / n;
  ex.hardy_sobolev = 2.0 * (n - s) / (n - 2.0);
  ex.sobolev = 2.0 * n / (n - 2.0);
  ex.hardy_best = (n - 2.0) * (n - 2.0) / 4.0;
  return ex;
}

DerivedExponents derive_exponents(const ProblemParams& params) {
  return derive_exponents(params.N, params.alpha, params.s);
}

double omega(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

std::string_view to_string(CaseId id) {
  switch (id) {
    case CaseId::One: return "1";
    case CaseId::Two: return "2";
    case CaseId::ThreeI: return "3i";
    case CaseId::ThreeII: return "3ii";
    case CaseId::FourI: return "4i";
    case CaseId::FourII: return "4ii";
    case CaseId::FourIII: return "4iii";
    case CaseId::FourIV: return "4iv";
    case CaseId::Uncovered: return "uncovered";
  }
  return "uncovered";
}

std::string_view to_string(LargeParameter which) {
  return which == LargeParameter::Lambda ? "lambda" : "mu";
}

bool is_critical_case(CaseId id) {
  switch (id) {
    case CaseId::ThreeI:
    case CaseId::ThreeII:
    case CaseId::FourI:
    case CaseId::FourII:
    case CaseId::FourIII:
    case CaseId::FourIV:
      return true;
    default:
      return false;
  }
}

RateCase bubble_hardy_rate_case(int N, double s, double q) {
  const double split = (N - s) / (N - 2.0);
  if (exponent_equal(q, split)) return RateCase::AtSplit;
  return q > split ? RateCase::AboveSplit : RateCase::BelowSplit;
}

double bubble_hardy_rate(int N, double s, double q) {
  if (bubble_hardy_rate_case(N, s, q) == RateCase::BelowSplit) return (N - 2.0) * q / 2.0;
  return N - (N - 2.0) * q / 2.0 - s;
}

RegimeCase classify_regime(const ProblemParams& pr) {
  const DerivedExponents ex = derive_exponents(pr);
  const double crit_p = ex.upper_critical;
  const double crit_q = ex.hardy_sobolev;
  RegimeCase out;

  const bool p_sub = pr.p > 1.0 && strictly_less(pr.p, crit_p);
  const bool p_crit = exponent_equal(pr.p, crit_p);
  const bool s_is_two = exponent_equal(pr.s, 2.0);

  if (s_is_two) {
    if (exponent_equal(pr.q, 2.0) && pr.mu > 0.0 && pr.mu < ex.hardy_best && p_sub) {
      out.case_id = CaseId::Two;
    }
    return out;
  }

  const bool q_sub = strictly_less(2.0, pr.q) && strictly_less(pr.q, crit_q);
  const bool q_crit = exponent_equal(pr.q, crit_q) && crit_q > 2.0;

  if (p_sub && q_sub) {
    out.case_id = CaseId::One;
  } else if (p_sub && q_crit) {
    if (strictly_less(crit_p - 1.0, pr.p)) {
      out.case_id = CaseId::ThreeI;
    } else if (less_or_equal(pr.alpha, 4.0)) {
      out.case_id = CaseId::ThreeII;
      out.requires_large_parameter = LargeParameter::Lambda;
      out.theta_lower_bound = 2.0 * pr.N - pr.alpha - (pr.N - 2.0) * (pr.p + 1.0);
    }
  } else if (p_crit && q_sub) {
    if (pr.N == 3) {
      if (strictly_less(pr.s, 1.0)) {
        if (strictly_less(crit_q - 2.0, pr.q)) {
          out.case_id = CaseId::FourI;
        } else {
          out.case_id = CaseId::FourII;
          out.requires_large_parameter = LargeParameter::Mu;
          out.theta_lower_bound = bubble_hardy_rate(pr.N, pr.s, pr.q) - (pr.N - 2.0);
        }
      } else {
        out.case_id = CaseId::FourIII;
      }
    } else if (pr.s > 0.0 && !exponent_equal(pr.s, 0.0)) {
      out.case_id = CaseId::FourIV;
    }
  }
  return out;
}

}  // namespace chs
