#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace chs {

// Relative band used for every exponent equality test.
inline constexpr double kExponentTolerance = 1e-9;

bool exponent_equal(double a, double b);

// One instance of -Δu = λ(|x|^{-α} * |u|^p)|u|^{p-2}u + μ|u|^{q-2}u/|x|^s on B(0, R).
struct ProblemParams {
  int N = 3;
  double alpha = 1.0;
  double s = 0.0;
  double p = 2.0;
  double q = 4.0;
  double lambda = 1.0;
  double mu = 1.0;
  double radius = 1.0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  // Same as validate() but admits lambda = 0 or mu = 0, which the numerical
  // modules handle as degenerate sub-cases.
  void validate_relaxed() const;
};

struct DerivedExponents {
  double upper_critical;  // (2N - α)/(N - 2)
  double lower_critical;  // (2N - α)/N
  double hardy_sobolev;   // 2(N - s)/(N - 2)
  double sobolev;         // 2N/(N - 2)
  double hardy_best;      // (N - 2)^2 / 4
};

DerivedExponents derive_exponents(const ProblemParams& params);
DerivedExponents derive_exponents(int N, double alpha, double s);

double omega(int N);  // surface area of the unit sphere in R^N

enum class CaseId { One, Two, ThreeI, ThreeII, FourI, FourII, FourIII, FourIV, Uncovered };

std::string_view to_string(CaseId id);

enum class LargeParameter { Lambda, Mu };

std::string_view to_string(LargeParameter which);

struct RegimeCase {
  CaseId case_id = CaseId::Uncovered;
  std::optional<LargeParameter> requires_large_parameter;
  // Strict lower bound on θ for the prescription λ = ε^{-θ} (3ii) or
  // μ = ε^{-θ} (4ii).
  std::optional<double> theta_lower_bound;
};

RegimeCase classify_regime(const ProblemParams& params);

bool is_critical_case(CaseId id);  // cases 3 and 4

// Exponent e in ∫|u_ε|^q/|x|^s ~ ε^e for the cut Aubin-Talenti bubble.
// The logarithmic case q = (N-s)/(N-2) returns the power part only.
double bubble_hardy_rate(int N, double s, double q);

enum class RateCase { AboveSplit, AtSplit, BelowSplit };

RateCase bubble_hardy_rate_case(int N, double s, double q);

}  // namespace chs
