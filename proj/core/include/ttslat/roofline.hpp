#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ttslat/profiles.hpp"

namespace ttslat {

enum class Bound { MemoryBound, ComputeBound };

const char* to_string(Bound bound);

// One batched decode (or verify) pass through the model.
struct StepCost {
  double mem_time = 0;      // seconds to stream weights + KV
  double compute_time = 0;  // seconds of arithmetic
  double step_time = 0;     // max of the two
  Bound bound = Bound::MemoryBound;
  double mem_bytes = 0;
  double flops = 0;
  bool capacity_exceeded = false;  // weights + total KV > mem_capacity
};

// Roofline cost of one forward pass over `sequences` sequences, each
// processing `tokens_per_seq` tokens, with `seq_len` tokens of KV cache per
// sequence already resident. seq_len may be fractional (expected-value
// timelines).
StepCost step_cost(const HardwareProfile& hw, const ModelProfile& model,
                   uint64_t sequences, uint64_t tokens_per_seq,
                   double seq_len);

// Plain-decoding throughput in tokens/s: one token per sequence per step.
double throughput(const HardwareProfile& hw, const ModelProfile& model,
                  const ConcurrencyConfig& config, double seq_len);

// Smallest sequence count at which the pass becomes compute-bound
// (compute_time >= mem_time); nullopt when compute can never dominate under
// the linear KV-growth model.
std::optional<uint64_t> crossover_sequences(const HardwareProfile& hw,
                                            const ModelProfile& model,
                                            uint64_t tokens_per_seq,
                                            double seq_len);

// Deterministic decode timeline under a wall-clock budget.
struct BudgetUsage {
  double tokens_per_branch = 0;  // fractional; last step/cycle prorated
  double elapsed = 0;            // seconds actually consumed, incl. prefill
  double cycles = 0;             // decode steps (gamma = 0) or SD cycles
  double final_seq_len = 0;
  Bound final_bound = Bound::MemoryBound;
  bool capacity_exceeded = false;
};

// Walks the decode timeline: plain steps when config.draft_len == 0,
// speculative cycles otherwise (expected accepted tokens per cycle; KV grown
// between cycles). `model` is the target; pair supplies the draft model and
// acceptance rate when speculative decoding is on.
BudgetUsage decode_within_budget(const HardwareProfile& hw,
                                 const ModelProfile& model,
                                 const SpecDecPair& pair,
                                 const ConcurrencyConfig& config,
                                 double budget_seconds,
                                 double prefill_offset = 0,
                                 uint64_t max_tokens_per_branch = 0);

// Expected generated tokens per branch within the budget.
double tokens_within_budget(const HardwareProfile& hw,
                            const ModelProfile& model, const SpecDecPair& pair,
                            const ConcurrencyConfig& config,
                            double budget_seconds, double prefill_offset = 0,
                            uint64_t max_tokens_per_branch = 0);

}  // namespace ttslat
