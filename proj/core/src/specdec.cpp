#include "ttslat/specdec.hpp"

#include <cmath>
#include <stdexcept>

namespace ttslat {

double expected_tokens_per_cycle(double alpha, uint64_t gamma) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(
        "expected_tokens_per_cycle: alpha must lie in [0,1)");
  }
  if (alpha == 0.0 || gamma == 0) return 1.0;
  // sum_{i=0..gamma} alpha^i
  return (1.0 - std::pow(alpha, static_cast<double>(gamma + 1))) /
         (1.0 - alpha);
}

CycleModel cycle_model(const HardwareProfile& hw, const SpecDecPair& pair,
                       uint64_t branches, uint64_t gamma, double seq_len) {
  if (gamma < 1) {
    throw std::invalid_argument(
        "cycle_model: gamma must be >= 1 (use plain decoding otherwise)");
  }
  if (branches < 1) {
    throw std::invalid_argument("cycle_model: branches must be >= 1");
  }
  StepCost draft = step_cost(hw, pair.draft, branches, 1, seq_len);
  StepCost verify = step_cost(hw, pair.target, branches, gamma + 1, seq_len);
  StepCost plain = step_cost(hw, pair.target, branches, 1, seq_len);

  CycleModel m;
  m.gamma = gamma;
  m.expected_tokens = expected_tokens_per_cycle(pair.acceptance_rate, gamma);
  m.cycle_time =
      static_cast<double>(gamma) * draft.step_time + verify.step_time;
  m.effective_rate = m.expected_tokens / m.cycle_time;
  m.speedup_vs_plain = m.effective_rate * plain.step_time;
  return m;
}

std::pair<uint64_t, CycleModel> best_gamma(const HardwareProfile& hw,
                                           const SpecDecPair& pair,
                                           uint64_t branches, double seq_len,
                                           uint64_t gamma_max) {
  if (gamma_max < 1) {
    throw std::invalid_argument("best_gamma: gamma_max must be >= 1");
  }
  uint64_t best = 1;
  CycleModel best_model = cycle_model(hw, pair, branches, 1, seq_len);
  for (uint64_t g = 2; g <= gamma_max; ++g) {
    CycleModel m = cycle_model(hw, pair, branches, g, seq_len);
    if (m.speedup_vs_plain > best_model.speedup_vs_plain) {
      best = g;
      best_model = m;
    }
  }
  return {best, best_model};
}

}  // namespace ttslat
