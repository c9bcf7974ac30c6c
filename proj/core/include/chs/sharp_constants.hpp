#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "chs/params.hpp"
#include "chs/singular_quadrature.hpp"

namespace chs {

// A quadrature whose refined re-evaluation disagrees beyond tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

// π^{α/2} Γ((N-α)/2)/Γ((2N-α)/2) (Γ(N/2)/Γ(N))^{α/N-1}
double hls_sharp_constant(int N, double alpha);

// Both sides of the bubble scaling identity for U_{s,ε} on R^N.
struct BubbleIntegrals {
  double kinetic;   // ∫|∇U_{s,ε}|²
  double weighted;  // ∫|U_{s,ε}|^{2*(s)}/|x|^s
};

BubbleIntegrals hardy_sobolev_bubble_integrals(int N, double s, double k, double epsilon = 1.0,
                                               const ProfileQuadrature& pq = {});

// S from the Aubin-Talenti bubble: ∫|∇U|² / |U|_{2*}².
double sobolev_constant(int N, double epsilon = 1.0);

// μ_s(R^N) = (∫|∇U_s|²)^{(2-s)/(N-s)}, for 0 <= s < 2.
double hardy_sobolev_constant(int N, double s, double k = 1.0);

// S_{H,L} = ∫|∇U|² / (∫∫ U^{2α*} U^{2α*} |x-y|^{-α})^{1/2α*}. Costly: one
// double integral over R^N.
double hls_best_ratio(int N, double alpha);

enum class Provenance { ClosedForm, Quadrature };

struct SharpConstants {
  int N = 3;
  double alpha = 1.0;
  double s = 0.0;
  double hls_constant = 0.0;
  double sobolev_constant = 0.0;
  std::optional<double> hls_best_ratio;          // omitted unless requested
  std::optional<double> hardy_sobolev_constant;  // none for s = 2
  Provenance hls_constant_provenance = Provenance::ClosedForm;
  Provenance sobolev_constant_provenance = Provenance::Quadrature;
  Provenance hls_best_ratio_provenance = Provenance::Quadrature;
  Provenance hardy_sobolev_constant_provenance = Provenance::Quadrature;
};

SharpConstants compute_sharp_constants(int N, double alpha, double s, bool with_best_ratio = false);

struct ThresholdReport {
  std::optional<double> hardy_sobolev_threshold;  // none for s = 2
  double hls_threshold = 0.0;
  bool hardy_sobolev_applies = false;  // q = 2*(s), s < 2
  bool hls_applies = false;            // p = 2α*

  // Smallest applicable threshold, if any.
  std::optional<double> applicable() const;
};

ThresholdReport ps_thresholds(const ProblemParams& params, const SharpConstants& consts);

}  // namespace chs
