#include "ttslat/curves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ttslat/errors.hpp"

namespace ttslat {

void EfficiencyCurve::validate() const {
  if (!(a_min >= 0.0 && a_min <= 1.0)) {
    throw ValidationError("curve.a_min must lie in [0,1]");
  }
  if (!(a_max >= 0.0 && a_max <= 1.0)) {
    throw ValidationError("curve.a_max must lie in [0,1]");
  }
  if (a_min > a_max) {
    throw ValidationError("curve.a_min must not exceed curve.a_max");
  }
  if (!(slope > 0.0)) {
    throw ValidationError("curve.slope must be > 0");
  }
  if (!std::isfinite(midpoint)) {
    throw ValidationError("curve.midpoint must be finite");
  }
}

double curve_eval(const EfficiencyCurve& curve, double tokens) {
  if (!(tokens >= 1.0)) {
    throw std::invalid_argument("curve_eval: tokens must be >= 1");
  }
  double x = std::log2(tokens);
  double z = -curve.slope * (x - curve.midpoint);
  // exp underflow/overflow saturates cleanly to the asymptotes
  double sigma = 1.0 / (1.0 + std::exp(z));
  double value = curve.a_min + (curve.a_max - curve.a_min) * sigma;
  return std::clamp(value, curve.a_min, curve.a_max);
}

namespace {

// Least squares over (a_min, a_max) for fixed logistic shape. The model is
// linear in the two levels: y = a_min * (1 - sigma) + a_max * sigma.
struct LevelFit {
  double a_min = 0;
  double a_max = 0;
  double sse = std::numeric_limits<double>::infinity();
};

double sse_for(const std::vector<double>& sig, const std::vector<double>& ys,
               double lo, double hi) {
  double sse = 0;
  for (size_t i = 0; i < ys.size(); ++i) {
    double pred = lo * (1.0 - sig[i]) + hi * sig[i];
    double r = pred - ys[i];
    sse += r * r;
  }
  return sse;
}

// Minimizes over a line segment a_min = a_max = t (degenerate direction).
double flat_level(const std::vector<double>& ys) {
  double sum = 0;
  for (double y : ys) sum += y;
  return sum / static_cast<double>(ys.size());
}

LevelFit solve_levels(const std::vector<double>& sig,
                      const std::vector<double>& ys,
                      const CurveFitBounds& b) {
  double suu = 0, suv = 0, svv = 0, suy = 0, svy = 0;
  for (size_t i = 0; i < ys.size(); ++i) {
    double u = 1.0 - sig[i];
    double v = sig[i];
    suu += u * u;
    suv += u * v;
    svv += v * v;
    suy += u * ys[i];
    svy += v * ys[i];
  }
  double det = suu * svv - suv * suv;

  auto clamped = [&](double lo, double hi) {
    LevelFit f;
    f.a_min = std::clamp(lo, b.a_min_lo, b.a_min_hi);
    f.a_max = std::clamp(hi, b.a_max_lo, b.a_max_hi);
    if (f.a_min > f.a_max) {
      double t = std::clamp(flat_level(ys), std::max(b.a_min_lo, b.a_max_lo),
                            std::min(b.a_min_hi, b.a_max_hi));
      f.a_min = f.a_max = t;
    }
    f.sse = sse_for(sig, ys, f.a_min, f.a_max);
    return f;
  };

  if (std::abs(det) < 1e-14 * (suu * svv + 1e-300)) {
    double t = flat_level(ys);
    return clamped(t, t);
  }

  double lo = (suy * svv - svy * suv) / det;
  double hi = (svy * suu - suy * suv) / det;
  LevelFit best = clamped(lo, hi);

  // The unconstrained optimum may sit outside the box or violate
  // a_min <= a_max; probe the active-constraint candidates as well.
  for (double fixed_lo : {b.a_min_lo, b.a_min_hi}) {
    double hi1 = svv > 0 ? (svy - fixed_lo * suv) / svv : fixed_lo;
    LevelFit f = clamped(fixed_lo, hi1);
    if (f.sse < best.sse) best = f;
  }
  for (double fixed_hi : {b.a_max_lo, b.a_max_hi}) {
    double lo1 = suu > 0 ? (suy - fixed_hi * suv) / suu : fixed_hi;
    LevelFit f = clamped(lo1, fixed_hi);
    if (f.sse < best.sse) best = f;
  }
  return best;
}

struct ShapeEval {
  double sse = std::numeric_limits<double>::infinity();
  LevelFit levels;
};

ShapeEval eval_shape(double mid, double slope, const std::vector<double>& xs,
                     const std::vector<double>& ys, const CurveFitBounds& b,
                     std::vector<double>& sig_scratch) {
  sig_scratch.resize(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    sig_scratch[i] = 1.0 / (1.0 + std::exp(-slope * (xs[i] - mid)));
  }
  ShapeEval e;
  e.levels = solve_levels(sig_scratch, ys, b);
  e.sse = e.levels.sse;
  return e;
}

}  // namespace

CurveFit curve_fit(std::vector<CurveAnchor> anchors,
                   const CurveFitBounds& bounds) {
  for (const auto& a : anchors) {
    if (!(a.tokens >= 1.0)) {
      throw std::invalid_argument("curve_fit: anchor tokens must be >= 1");
    }
    if (!(a.accuracy >= 0.0 && a.accuracy <= 1.0)) {
      throw std::invalid_argument("curve_fit: anchor accuracy must be in [0,1]");
    }
  }
  std::sort(anchors.begin(), anchors.end(), [](const auto& l, const auto& r) {
    return l.tokens != r.tokens ? l.tokens < r.tokens : l.accuracy < r.accuracy;
  });

  size_t distinct = 0;
  for (size_t i = 0; i < anchors.size(); ++i) {
    if (i == 0 || anchors[i].tokens != anchors[i - 1].tokens) ++distinct;
  }
  if (distinct < 2) {
    throw std::invalid_argument(
        "curve_fit: need at least 2 anchors with distinct token counts");
  }

  std::vector<double> xs(anchors.size()), ys(anchors.size());
  for (size_t i = 0; i < anchors.size(); ++i) {
    xs[i] = std::log2(anchors[i].tokens);
    ys[i] = anchors[i].accuracy;
  }

  bool all_same = std::all_of(ys.begin(), ys.end(),
                              [&](double y) { return y == ys.front(); });
  if (all_same) {
    CurveFit flat;
    flat.curve.a_min = flat.curve.a_max = ys.front();
    flat.curve.slope = 1.0;
    flat.curve.midpoint = 0.5 * (xs.front() + xs.back());
    flat.degenerate = true;
    return flat;
  }

  const double mid_lo = xs.front() - 2.0;
  const double mid_hi = xs.back() + 2.0;
  const double ls_lo = std::log(bounds.slope_lo);
  const double ls_hi = std::log(bounds.slope_hi);

  std::vector<double> sig;
  double best_mid = 0.5 * (mid_lo + mid_hi);
  double best_ls = 0;
  ShapeEval best;

  // Multi-start grid over (midpoint, log slope).
  const int kMidSteps = 97;
  const int kSlopeSteps = 41;
  for (int i = 0; i < kMidSteps; ++i) {
    double mid = mid_lo + (mid_hi - mid_lo) * i / (kMidSteps - 1);
    for (int j = 0; j < kSlopeSteps; ++j) {
      double ls = ls_lo + (ls_hi - ls_lo) * j / (kSlopeSteps - 1);
      ShapeEval e = eval_shape(mid, std::exp(ls), xs, ys, bounds, sig);
      if (e.sse < best.sse) {
        best = e;
        best_mid = mid;
        best_ls = ls;
      }
    }
  }

  // Fixed-iteration compass refinement.
  double step_mid = (mid_hi - mid_lo) / (kMidSteps - 1);
  double step_ls = (ls_hi - ls_lo) / (kSlopeSteps - 1);
  for (int iter = 0; iter < 240; ++iter) {
    bool moved = false;
    const std::array<std::array<double, 2>, 4> dirs{
        {{step_mid, 0.0}, {-step_mid, 0.0}, {0.0, step_ls}, {0.0, -step_ls}}};
    for (const auto& d : dirs) {
      double mid = std::clamp(best_mid + d[0], mid_lo, mid_hi);
      double ls = std::clamp(best_ls + d[1], ls_lo, ls_hi);
      ShapeEval e = eval_shape(mid, std::exp(ls), xs, ys, bounds, sig);
      if (e.sse < best.sse) {
        best = e;
        best_mid = mid;
        best_ls = ls;
        moved = true;
      }
    }
    if (!moved) {
      step_mid *= 0.5;
      step_ls *= 0.5;
      if (step_mid < 1e-14 && step_ls < 1e-14) break;
    }
  }

  CurveFit fit;
  fit.curve.a_min = best.levels.a_min;
  fit.curve.a_max = best.levels.a_max;
  fit.curve.midpoint = best_mid;
  fit.curve.slope = std::exp(best_ls);
  fit.rms_residual = std::sqrt(best.sse / static_cast<double>(ys.size()));
  fit.curve.validate();
  return fit;
}

std::vector<CurveAnchor> load_anchors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open anchor file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty anchor file: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "tokens,accuracy") {
    throw ParseError("anchor file must start with header 'tokens,accuracy': " +
                     path);
  }
  std::vector<CurveAnchor> anchors;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok, acc;
    if (!std::getline(row, tok, ',') || !std::getline(row, acc)) {
      throw ParseError("malformed anchor row " + std::to_string(line_no) +
                       " in " + path);
    }
    try {
      anchors.push_back({std::stod(tok), std::stod(acc)});
    } catch (const std::exception&) {
      throw ParseError("non-numeric anchor row " + std::to_string(line_no) +
                       " in " + path);
    }
  }
  return anchors;
}

}  // namespace ttslat
