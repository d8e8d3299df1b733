#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ttslat {

// Token efficiency: per-branch accuracy as a saturating function of the
// number of generated tokens. Four-parameter logistic in log2(tokens).
struct EfficiencyCurve {
  double a_min = 0.0;    // accuracy floor as tokens -> 1
  double a_max = 1.0;    // saturation ceiling
  double midpoint = 10;  // log2-tokens at the halfway point
  double slope = 1.0;    // > 0

  void validate() const;
  bool operator==(const EfficiencyCurve&) const = default;
};

// accuracy at `tokens` (tokens >= 1); monotone nondecreasing, range within
// [a_min, a_max].
double curve_eval(const EfficiencyCurve& curve, double tokens);

struct CurveAnchor {
  double tokens = 1;     // >= 1
  double accuracy = 0;   // in [0, 1]
  bool operator==(const CurveAnchor&) const = default;
};

struct CurveFitBounds {
  double a_min_lo = 0.0;
  double a_min_hi = 1.0;
  double a_max_lo = 0.0;
  double a_max_hi = 1.0;
  double slope_lo = 0.05;
  double slope_hi = 32.0;
};

struct CurveFit {
  EfficiencyCurve curve;
  double rms_residual = 0.0;
  bool degenerate = false;  // under-determined input, flat curve returned
};

// Deterministic least-squares fit over log2-token space: a fixed (midpoint,
// slope) grid with a closed-form linear solve for (a_min, a_max) at each
// node, followed by fixed-iteration compass refinement. Anchors are sorted
// internally, so the result is invariant under permutation of the input.
CurveFit curve_fit(std::vector<CurveAnchor> anchors,
                   const CurveFitBounds& bounds = {});

// Two-column CSV with header "tokens,accuracy".
std::vector<CurveAnchor> load_anchors_csv(const std::string& path);

}  // namespace ttslat
