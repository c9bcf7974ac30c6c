#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "chs/energy.hpp"
#include "chs/sharp_constants.hpp"

namespace chs {

struct SolverConfig {
  double tol = 1e-6;  // dual norm of the gradient at the path maximum
  int max_iters = 5000;
  int path_points = 32;
  double backtracking = 0.5;
  double armijo = 1e-4;
  bool record_iterates = true;

  void validate() const;
};

enum class SolveStatus { Converged, NonConvergence, DegeneratePath, TrivialSolution };

std::string_view to_string(SolveStatus status);

struct IterationRecord {
  int iteration = 0;
  double level = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
  int max_index = 0;
  std::vector<double> iterate;  // empty unless record_iterates
};

struct MountainPassResult {
  std::optional<RadialFunction> solution;
  double level = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::NonConvergence;
  std::optional<double> threshold;        // applicable PS threshold, if any
  std::optional<bool> below_threshold;
  double concentration_index = 0.0;       // Dirichlet fraction in B(0, R/10)
  double nehari_residual = 0.0;           // <I'(u*), u*>
  double solution_norm_sq = 0.0;          // ‖u*‖²
  double segment_max = 0.0;               // max_t I(t e)
  MountainPassGeometry geometry;
  std::vector<IterationRecord> trace;
  std::string message;
};

// (1 - (r/R)²)², the default probe direction.
RadialFunction default_probe(std::shared_ptr<const RadialGrid> grid);

// Path deformation: start from t e, t ∈ [0, 1]. Every interior node takes
// an H¹-preconditioned descent step with the path tangent removed, except
// the maximal node, which climbs along the tangent and descends across
// it; then the path is re-spaced by H¹ arc length. Converges to a
// critical point at the top of the deformed path. Admits lambda = 0 or
// mu = 0.
MountainPassResult mountain_pass_solve(const ProblemParams& params, const SolverConfig& config,
                                       std::shared_ptr<const KernelMatrix> kernel,
                                       const std::optional<RadialFunction>& probe = std::nullopt,
                                       const std::optional<ThresholdReport>& thresholds = std::nullopt);

inline constexpr int kConcentrationBalls = 5;

struct PsIteration {
  int iteration = 0;
  double level = 0.0;
  double gradient_norm = 0.0;
  // Dirichlet fraction inside B(0, R 2^{-j}), j = 0..5; j = 0 is 1.
  std::array<double, kConcentrationBalls + 1> concentration{};
};

struct PsReport {
  std::vector<PsIteration> rows;
  bool concentration_suspected = false;
};

// Flags concentration when, over the last (up to 20) iterations, the
// innermost index rises monotonically past 1/2 while the gradient norm
// stays within a factor 10 of its value at the window start.
PsReport ps_diagnostics(const std::vector<IterationRecord>& trace, const RadialGrid& grid);

struct WitnessStep {
  double value = 0.0;
  double level = 0.0;
  std::optional<double> threshold;
  bool below = false;
  SolveStatus status = SolveStatus::NonConvergence;
};

struct WitnessReport {
  LargeParameter parameter = LargeParameter::Lambda;
  std::optional<double> witness;
  std::vector<WitnessStep> steps;
};

// Multiplies λ or μ by 10 (starting from the params value) until a
// converged run lands below its threshold, at most max_steps times.
WitnessReport find_large_parameter_witness(const ProblemParams& params, const SolverConfig& config,
                                           std::shared_ptr<const KernelMatrix> kernel,
                                           const SharpConstants& consts, LargeParameter which,
                                           int max_steps = 6);

}  // namespace chs
