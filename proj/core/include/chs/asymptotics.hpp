#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chs/params.hpp"
#include "chs/radial.hpp"
#include "chs/sharp_constants.hpp"

namespace chs {

// Raised when an operation is called outside the regimes it is defined for.
class RegimeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepMode { Profile, Grid };

struct SweepConfig {
  std::vector<double> ladder;  // absolute ε, strictly decreasing; empty = 2^{-1..-8} R
  std::optional<double> theta;
  BubbleFamily family = BubbleFamily::HardySobolev;
  double k = 1.0;
  std::optional<double> cutoff_inner;  // default R/2
  SweepMode mode = SweepMode::Profile;
  int grid_points = 512;  // Grid mode only
  double grading = 2.0;   // Grid mode only

  std::vector<double> resolved_ladder(double R) const;
};

std::vector<double> geometric_ladder(double R, int first_exponent, int last_exponent);

struct SweepRow {
  double epsilon = 0.0;
  double lambda = 0.0;  // effective λ (ε^{-θ} under the 3ii prescription)
  double mu = 0.0;      // effective μ (ε^{-θ} under the 4ii prescription)
  double kinetic = 0.0;        // ∫|∇u_ε|²
  double hardy_term = 0.0;     // ∫|u_ε|^q/|x|^s
  double nonlocal_term = 0.0;  // ∫∫|u_ε|^p|u_ε|^p/|x-y|^α
  double t_star = 0.0;
  double h_star = 0.0;
  double margin = 0.0;  // threshold - h_star, NaN without an applicable threshold
  // Cut minus uncut bubble integrals, computed directly on [ρ, ∞). NaN in
  // grid mode or when the uncut integral diverges.
  double kinetic_deviation = 0.0;
  double hardy_deviation = 0.0;
};

struct SweepTable {
  BubbleFamily family = BubbleFamily::HardySobolev;
  double cutoff_inner = 0.0;
  std::optional<double> threshold;  // for the base parameters
  std::vector<SweepRow> rows;
};

// Profile mode integrates the closed-form cut bubble with graded Gauss
// rules; Grid mode samples it on a RadialGrid and uses the discrete
// quadratures of the energy.
SweepTable epsilon_sweep(const ProblemParams& params, const SweepConfig& config);

enum class SweepColumn {
  Kinetic,
  HardyTerm,
  NonlocalTerm,
  TStar,
  HStar,
  Margin,
  KineticDeviation,
  HardyDeviation
};

std::string_view to_string(SweepColumn column);
double column_value(const SweepRow& row, SweepColumn column);

struct RatePrediction {
  double exponent = 0.0;
  double tolerance = 0.05;
  bool one_sided = false;  // pass when slope >= exponent - tolerance
  // true: a |ln ε| factor must be detected and the slope comes from the log
  // model. false: the power model is used regardless. unset: whichever fits.
  std::optional<bool> expect_log;
};

enum class FitVerdict { Pass, Fail, Inconclusive };

std::string_view to_string(FitVerdict verdict);

struct RateFit {
  SweepColumn column = SweepColumn::HardyTerm;
  double slope = 0.0;
  double power_slope = 0.0;  // slope of the pure power model
  double log_slope = 0.0;    // slope with the |ln ε| factor divided out
  RatePrediction expected;
  bool log_factor_detected = false;
  double r_squared = 0.0;
  double residual_power = 0.0;
  double residual_log = 0.0;
  int points = 0;
  FitVerdict verdict = FitVerdict::Inconclusive;
};

inline constexpr int kFitWindow = 5;
inline constexpr double kLogImprovement = 10.0;
inline constexpr double kMinRSquared = 0.99;

// Least squares of log|y| on log ε over the last five rows (at least four
// required). The log-factor test refits log|y| - log ln(1/ε) on log ε and
// flags a factor |ln ε| when the residual sum drops at least tenfold.
RateFit fit_rate(const SweepTable& table, SweepColumn column, const RatePrediction& expected);

// Same fit on raw (ε, y) pairs.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& y, SweepColumn column,
                 const RatePrediction& expected);

struct ColumnPrediction {
  SweepColumn column;
  RatePrediction prediction;
};

// Every column with a predicted exponent for this family and parameter set.
std::vector<ColumnPrediction> predicted_rates(const ProblemParams& params, const SweepConfig& config);

enum class LevelVerdict { Verified, NotVerified };

std::string_view to_string(LevelVerdict verdict);

struct LevelBoundReport {
  CaseId case_id = CaseId::Uncovered;
  std::string threshold_kind;  // "hardy_sobolev" or "hls"
  double threshold = 0.0;
  SweepTable table;
  LevelVerdict verdict = LevelVerdict::NotVerified;
  bool tail_positive = false;
  bool tail_increasing = false;
  std::optional<double> theta;
  std::optional<double> theta_lower_bound;
  std::vector<std::string> warnings;
  // Log-log slope of the margin over the tail, when all tail margins are
  // positive. Informational.
  std::optional<double> margin_slope;
};

inline constexpr int kLevelTail = 3;

// Runs the sweep for the bubble family of the regime (Hardy-Sobolev for
// cases 3, Aubin-Talenti for cases 4) and checks that the margin is
// positive and increasing as ε decreases over the last three rows.
// Throws RegimeError outside cases 3 and 4.
LevelBoundReport verify_level_bound(const ProblemParams& params, const SweepConfig& config,
                                    const ThresholdReport& thresholds);

}  // namespace chs
