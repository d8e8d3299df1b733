#include "ttslat/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ttslat/specdec.hpp"

namespace ttslat {

const char* to_string(Bound bound) {
  return bound == Bound::MemoryBound ? "memory" : "compute";
}

StepCost step_cost(const HardwareProfile& hw, const ModelProfile& model,
                   uint64_t sequences, uint64_t tokens_per_seq,
                   double seq_len) {
  if (sequences < 1 || tokens_per_seq < 1) {
    throw std::invalid_argument(
        "step_cost: sequences and tokens_per_seq must be >= 1");
  }
  if (seq_len < 0) {
    throw std::invalid_argument("step_cost: seq_len must be >= 0");
  }
  StepCost c;
  double seqs = static_cast<double>(sequences);
  c.mem_bytes = model.weights_bytes() + seqs * model.kv_bytes_per_token * seq_len;
  c.flops = model.flops_per_token * seqs * static_cast<double>(tokens_per_seq);
  c.mem_time = c.mem_bytes / hw.effective_bandwidth();
  c.compute_time = c.flops / hw.effective_compute();
  c.step_time = std::max(c.mem_time, c.compute_time);
  c.bound = c.mem_time >= c.compute_time ? Bound::MemoryBound
                                         : Bound::ComputeBound;
  c.capacity_exceeded = c.mem_bytes > hw.mem_capacity;
  return c;
}

double throughput(const HardwareProfile& hw, const ModelProfile& model,
                  const ConcurrencyConfig& config, double seq_len) {
  config.validate();
  StepCost c = step_cost(hw, model, config.sequences(), 1, seq_len);
  return static_cast<double>(config.sequences()) / c.step_time;
}

std::optional<uint64_t> crossover_sequences(const HardwareProfile& hw,
                                            const ModelProfile& model,
                                            uint64_t tokens_per_seq,
                                            double seq_len) {
  if (tokens_per_seq < 1) {
    throw std::invalid_argument("crossover_sequences: tokens_per_seq >= 1");
  }
  // compute_time(s) = s * F * tps / Ce            (through the origin)
  // mem_time(s)     = (W + s * kv * L) / Be       (affine)
  double compute_slope = model.flops_per_token *
                         static_cast<double>(tokens_per_seq) /
                         hw.effective_compute();
  double mem_slope = model.kv_bytes_per_token * seq_len / hw.effective_bandwidth();
  double mem_const = model.weights_bytes() / hw.effective_bandwidth();
  double slope_diff = compute_slope - mem_slope;
  if (!(slope_diff > 0)) {
    return std::nullopt;  // KV streaming grows at least as fast as compute
  }
  double raw = mem_const / slope_diff;
  uint64_t guess = raw <= 1.0 ? 1 : static_cast<uint64_t>(std::ceil(raw));
  // snap to the exact roofline comparison around the closed-form root;
  // beyond the root the comparison holds, so this terminates immediately
  uint64_t s = guess > 2 ? guess - 2 : 1;
  for (;;) {
    StepCost c = step_cost(hw, model, s, tokens_per_seq, seq_len);
    if (c.compute_time >= c.mem_time) return s;
    ++s;
  }
}

BudgetUsage decode_within_budget(const HardwareProfile& hw,
                                 const ModelProfile& model,
                                 const SpecDecPair& pair,
                                 const ConcurrencyConfig& config,
                                 double budget_seconds, double prefill_offset,
                                 uint64_t max_tokens_per_branch) {
  config.validate();
  BudgetUsage u;
  double budget = budget_seconds - prefill_offset;
  if (budget <= 0) {
    u.elapsed = std::min(budget_seconds, prefill_offset);
    return u;
  }
  const uint64_t sequences = config.sequences();
  const double cap = max_tokens_per_branch > 0
                         ? static_cast<double>(max_tokens_per_branch)
                         : std::numeric_limits<double>::infinity();
  double elapsed = 0;
  double tokens = 0;
  double seq_len = 0;
  Bound bound = Bound::MemoryBound;
  bool capacity = false;

  if (config.draft_len == 0) {
    for (;;) {
      StepCost c = step_cost(hw, model, sequences, 1, seq_len);
      bound = c.bound;
      capacity = capacity || c.capacity_exceeded;
      double remaining = budget - elapsed;
      if (c.step_time > remaining) {
        // prorate the final partial step (expected-value semantics)
        double fraction = remaining / c.step_time;
        tokens = std::min(cap, tokens + fraction);
        elapsed = budget;
        break;
      }
      elapsed += c.step_time;
      tokens += 1.0;
      seq_len += 1.0;
      if (tokens >= cap) {
        tokens = cap;
        break;
      }
    }
  } else {
    const uint64_t gamma = config.draft_len;
    const double expected =
        expected_tokens_per_cycle(pair.acceptance_rate, gamma);
    for (;;) {
      StepCost draft = step_cost(hw, pair.draft, sequences, 1, seq_len);
      StepCost verify = step_cost(hw, model, sequences, gamma + 1, seq_len);
      bound = verify.bound;
      capacity = capacity || verify.capacity_exceeded || draft.capacity_exceeded;
      double cycle = static_cast<double>(gamma) * draft.step_time +
                     verify.step_time;
      double remaining = budget - elapsed;
      if (cycle > remaining) {
        double fraction = remaining / cycle;
        tokens = std::min(cap, tokens + expected * fraction);
        elapsed = budget;
        u.cycles += fraction;
        break;
      }
      elapsed += cycle;
      u.cycles += 1.0;
      tokens += expected;
      seq_len += expected;
      if (tokens >= cap) {
        double overshoot = tokens - cap;
        elapsed -= cycle * (overshoot / expected);
        tokens = cap;
        break;
      }
    }
  }

  u.tokens_per_branch = tokens;
  u.elapsed = prefill_offset + elapsed;
  if (config.draft_len == 0) u.cycles = tokens;  // one token per step
  u.final_seq_len = tokens;
  u.final_bound = bound;
  u.capacity_exceeded = capacity;
  return u;
}

double tokens_within_budget(const HardwareProfile& hw,
                            const ModelProfile& model, const SpecDecPair& pair,
                            const ConcurrencyConfig& config,
                            double budget_seconds, double prefill_offset,
                            uint64_t max_tokens_per_branch) {
  return decode_within_budget(hw, model, pair, config, budget_seconds,
                              prefill_offset, max_tokens_per_branch)
      .tokens_per_branch;
}

}  // namespace ttslat
