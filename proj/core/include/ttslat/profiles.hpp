#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttslat/curves.hpp"
#include "ttslat/voting.hpp"

namespace ttslat {

struct HardwareProfile {
  std::string name;
  double mem_bandwidth = 0;         // bytes/s, > 0
  double peak_compute = 0;          // FLOP/s, > 0
  double bandwidth_efficiency = 1;  // in (0, 1]
  double compute_efficiency = 1;    // in (0, 1]
  double mem_capacity = 0;          // bytes, > 0

  double effective_bandwidth() const {
    return mem_bandwidth * bandwidth_efficiency;
  }
  double effective_compute() const {
    return peak_compute * compute_efficiency;
  }

  void validate() const;
  bool operator==(const HardwareProfile&) const = default;
};

struct ModelProfile {
  std::string name;
  uint64_t param_count = 0;        // > 0
  double bytes_per_param = 2;      // half precision unless overridden
  double kv_bytes_per_token = 0;   // per sequence, > 0
  double flops_per_token = 0;      // defaulted to 2 * param_count at load

  double weights_bytes() const {
    return static_cast<double>(param_count) * bytes_per_param;
  }

  void validate() const;
  bool operator==(const ModelProfile&) const = default;
};

struct SpecDecPair {
  ModelProfile target;
  ModelProfile draft;
  double acceptance_rate = 0;  // alpha in [0, 1)

  void validate() const;
  // Soft checks (e.g. draft larger than target) that do not fail validation.
  std::vector<std::string> warnings() const;
  bool operator==(const SpecDecPair&) const = default;
};

struct ConcurrencyConfig {
  uint64_t branches = 1;   // B >= 1
  uint64_t draft_len = 0;  // gamma >= 0; 0 disables speculative decoding
  uint64_t requests = 1;   // R >= 1

  uint64_t sequences() const { return branches * requests; }

  void validate() const;
  bool operator==(const ConcurrencyConfig&) const = default;
};

struct BetaParams {
  double alpha = 1;
  double beta = 1;
  bool operator==(const BetaParams&) const = default;
};

// Everything the planner and simulator consume for one problem setting.
struct Scenario {
  HardwareProfile hardware;
  SpecDecPair pair;
  EfficiencyCurve curve;         // single-branch accuracy vs tokens
  AnswerModel answer_model;      // distractor structure; p_correct is a base
  double budget = 0;             // T, seconds > 0
  uint64_t max_tokens_per_branch = 0;  // 0 = unbounded
  double prefill_offset = 0;     // seconds >= 0

  TieRule tie_rule = TieRule::SplitCredit;
  AggregationStrategy aggregation = AggregationStrategy::PlainVote;
  BetaParams confidence_correct{8, 2};  // synthetic confidence distributions
  BetaParams confidence_wrong{2, 4};
  std::optional<ConcurrencyConfig> default_config;

  void validate() const;
  std::vector<std::string> warnings() const { return pair.warnings(); }
  bool operator==(const Scenario&) const = default;
};

// Strict JSON loading: unknown keys are rejected, all invariants checked.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

// The five target/draft pairs measured in the reference experiments.
const std::vector<SpecDecPair>& builtin_pairs();
std::optional<SpecDecPair> find_builtin_pair(const std::string& target_name);

// Derives a per-token KV footprint from a (total KV, sequence length) anchor.
double kv_bytes_from_anchor(double total_kv_bytes, uint64_t seq_len);

}  // namespace ttslat
