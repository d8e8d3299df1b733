#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ttslat/profiles.hpp"
#include "ttslat/roofline.hpp"

namespace ttslat {

// Objective value of one concurrency configuration under a budget T.
struct ConfigEvaluation {
  ConcurrencyConfig config;
  double tokens_per_branch = 0;
  double predicted_accuracy = 0;  // 0 for infeasible configs
  double wall_latency = 0;        // <= T for feasible entries
  Bound bound = Bound::MemoryBound;
  bool feasible = true;
};

struct SearchResult {
  ConfigEvaluation best;
  uint64_t evaluations_used = 0;  // == trace.size()
  std::vector<ConfigEvaluation> trace;
};

// Accuracy improvements below this threshold count as ties and stop a
// greedy phase.
inline constexpr double kGreedyImprovementEps = 1e-9;

// tokens -> curve -> vote pipeline for one (B, gamma, R) cell. Exact vote
// enumeration when the outcome guard allows it, seeded Monte Carlo otherwise.
ConfigEvaluation evaluate_config(const Scenario& scenario,
                                 const ConcurrencyConfig& config, double T);

// Coordinate greedy: double B (gamma = 0) while accuracy strictly improves,
// then increment gamma from (B*, 0) while it strictly improves.
// B_max must be a power of two >= 1.
SearchResult greedy_search(const Scenario& scenario, double T, uint64_t B_max,
                           uint64_t gamma_max);

// Full cross product; ties broken toward smaller (B, gamma) lexicographically.
SearchResult grid_search(const Scenario& scenario, double T,
                         const std::vector<uint64_t>& B_set,
                         const std::vector<uint64_t>& gamma_set);

// Grid optimum per budget, filtered to a nondecreasing-accuracy boundary.
std::vector<std::pair<double, ConfigEvaluation>> pareto_frontier(
    const Scenario& scenario, const std::vector<double>& T_grid,
    const std::vector<uint64_t>& B_set, const std::vector<uint64_t>& gamma_set);

// Search cores over an abstract objective, shared by the scenario-facing
// entry points and usable directly with synthetic objectives.
using SearchObjective =
    std::function<ConfigEvaluation(uint64_t branches, uint64_t gamma)>;

SearchResult greedy_search_core(const SearchObjective& objective,
                                uint64_t B_max, uint64_t gamma_max);
SearchResult grid_search_core(const SearchObjective& objective,
                              const std::vector<uint64_t>& B_set,
                              const std::vector<uint64_t>& gamma_set);

}  // namespace ttslat
