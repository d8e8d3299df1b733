#pragma once

#include <cstdint>
#include <utility>

#include "ttslat/profiles.hpp"
#include "ttslat/roofline.hpp"

namespace ttslat {

// One speculative-decoding cycle: gamma draft steps plus one batched verify
// pass that scores gamma+1 tokens per sequence.
struct CycleModel {
  uint64_t gamma = 1;
  double expected_tokens = 1;    // in [1, gamma + 1]
  double cycle_time = 0;         // seconds
  double effective_rate = 0;     // tokens/s per branch
  double speedup_vs_plain = 0;   // vs one-token-per-step decoding
};

// E[accepted + 1 correction] per cycle for i.i.d. Bernoulli(alpha) accepts:
// sum_{i=0..gamma} alpha^i. alpha must lie in [0, 1).
double expected_tokens_per_cycle(double alpha, uint64_t gamma);

// Cycle latency and speedup at the given branch count and KV length.
// gamma must be >= 1; plain decoding is the roofline path.
CycleModel cycle_model(const HardwareProfile& hw, const SpecDecPair& pair,
                       uint64_t branches, uint64_t gamma, double seq_len);

// argmax of speedup over gamma in {1..gamma_max}; ties toward smaller gamma.
std::pair<uint64_t, CycleModel> best_gamma(const HardwareProfile& hw,
                                           const SpecDecPair& pair,
                                           uint64_t branches, double seq_len,
                                           uint64_t gamma_max);

}  // namespace ttslat
