#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttslat/profiles.hpp"
#include "ttslat/roofline.hpp"

namespace ttslat {

struct TrialRecord {
  uint64_t trial_id = 0;
  std::vector<uint64_t> tokens_per_branch;  // length B
  uint64_t cycles = 0;
  double elapsed = 0;     // <= T, includes prefill offset
  int chosen_answer = 0;  // 0 = correct
  bool correct = false;
};

struct SimulationSummary {
  double accuracy_estimate = 0;
  double std_error = 0;  // sqrt(acc * (1 - acc) / trials)
  double mean_tokens = 0;
  double mean_cycles = 0;
  uint64_t trials = 0;
  uint64_t seed = 0;
};

// Monte Carlo run of the decode timeline plus answer sampling and
// aggregation. Deterministic for a fixed seed; trials are keyed by
// (seed, trial_id) so any worker count yields the same summary.
// workers == 0 uses hardware concurrency.
SimulationSummary simulate(const Scenario& scenario,
                           const ConcurrencyConfig& config, double T,
                           uint64_t trials, uint64_t seed,
                           unsigned workers = 0);

// One trial, exposed for tests and the trace command.
TrialRecord simulate_trial(const Scenario& scenario,
                           const ConcurrencyConfig& config, double T,
                           uint64_t seed, uint64_t trial_id);

struct TraceEvent {
  std::string event;     // "start" or "cycle"
  double elapsed = 0;    // seconds at event end
  int64_t branch = -1;   // -1 for batch-level events
  uint64_t tokens = 0;   // tokens emitted for this branch this cycle
  uint64_t seq_len = 0;  // branch sequence length after the event
  Bound bound = Bound::MemoryBound;
};

// Timeline events of trial 0 for the given seed; replayable bit-identically.
std::vector<TraceEvent> simulate_trace(const Scenario& scenario,
                                       const ConcurrencyConfig& config,
                                       double T, uint64_t seed);

}  // namespace ttslat
