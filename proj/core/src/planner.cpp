#include "ttslat/planner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ttslat/curves.hpp"
#include "ttslat/errors.hpp"
#include "ttslat/voting.hpp"

namespace ttslat {

namespace {

constexpr uint64_t kMcFallbackTrials = 200000;
constexpr uint64_t kMcFallbackSeed = 0;

bool is_power_of_two(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<uint64_t> sorted_unique(std::vector<uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

ConfigEvaluation evaluate_config(const Scenario& scenario,
                                 const ConcurrencyConfig& config, double T) {
  config.validate();
  BudgetUsage usage = decode_within_budget(
      scenario.hardware, scenario.pair.target, scenario.pair, config, T,
      scenario.prefill_offset, scenario.max_tokens_per_branch);

  ConfigEvaluation ev;
  ev.config = config;
  ev.tokens_per_branch = usage.tokens_per_branch;
  ev.wall_latency = usage.elapsed;
  ev.bound = usage.final_bound;
  ev.feasible = !usage.capacity_exceeded;
  if (!ev.feasible) {
    ev.predicted_accuracy = 0.0;
    return ev;
  }

  double p = usage.tokens_per_branch >= 1.0
                 ? curve_eval(scenario.curve, usage.tokens_per_branch)
                 : scenario.curve.a_min;
  AnswerModel model = scenario.answer_model.with_p_correct(p);
  uint64_t B = config.branches;
  if (vote_enumeration_outcomes(B, model.distractors()) <=
          kVoteEnumerationLimit &&
      B <= 1000) {
    ev.predicted_accuracy =
        vote_accuracy_exact(model, B, scenario.tie_rule);
  } else {
    ev.predicted_accuracy =
        vote_accuracy_mc(model, B, scenario.tie_rule, kMcFallbackTrials,
                         kMcFallbackSeed)
            .estimate;
  }
  return ev;
}

SearchResult greedy_search_core(const SearchObjective& objective,
                                uint64_t B_max, uint64_t gamma_max) {
  if (!is_power_of_two(B_max)) {
    throw std::invalid_argument(
        "greedy_search: B_max must be a power of two >= 1");
  }
  SearchResult result;
  auto eval = [&](uint64_t B, uint64_t g) {
    ConfigEvaluation e = objective(B, g);
    result.trace.push_back(e);
    return e;
  };

  // Phase 1: double B at gamma = 0 while accuracy strictly improves.
  ConfigEvaluation best = eval(1, 0);
  for (uint64_t B = 2; B <= B_max; B *= 2) {
    ConfigEvaluation e = eval(B, 0);
    if (e.predicted_accuracy >
        best.predicted_accuracy + kGreedyImprovementEps) {
      best = e;
    } else {
      break;
    }
  }

  // Phase 2: from (B*, 0), increment gamma while accuracy strictly improves.
  uint64_t B_star = best.config.branches;
  for (uint64_t g = 1; g <= gamma_max; ++g) {
    ConfigEvaluation e = eval(B_star, g);
    if (e.predicted_accuracy >
        best.predicted_accuracy + kGreedyImprovementEps) {
      best = e;
    } else {
      break;
    }
  }

  result.best = best;
  result.evaluations_used = result.trace.size();
  return result;
}

SearchResult grid_search_core(const SearchObjective& objective,
                              const std::vector<uint64_t>& B_set,
                              const std::vector<uint64_t>& gamma_set) {
  if (B_set.empty() || gamma_set.empty()) {
    throw std::invalid_argument("grid_search: sets must be nonempty");
  }
  SearchResult result;
  bool have_best = false;
  // lexicographic (B, gamma) order; strict > keeps the first (smallest) argmax
  for (uint64_t B : sorted_unique(B_set)) {
    for (uint64_t g : sorted_unique(gamma_set)) {
      ConfigEvaluation e = objective(B, g);
      result.trace.push_back(e);
      if (!have_best ||
          e.predicted_accuracy > result.best.predicted_accuracy) {
        result.best = e;
        have_best = true;
      }
    }
  }
  result.evaluations_used = result.trace.size();
  return result;
}

namespace {

SearchObjective scenario_objective(const Scenario& scenario, double T) {
  return [&scenario, T](uint64_t B, uint64_t g) {
    ConcurrencyConfig config;
    config.branches = B;
    config.draft_len = g;
    config.requests =
        scenario.default_config ? scenario.default_config->requests : 1;
    return evaluate_config(scenario, config, T);
  };
}

}  // namespace

SearchResult greedy_search(const Scenario& scenario, double T, uint64_t B_max,
                           uint64_t gamma_max) {
  return greedy_search_core(scenario_objective(scenario, T), B_max, gamma_max);
}

SearchResult grid_search(const Scenario& scenario, double T,
                         const std::vector<uint64_t>& B_set,
                         const std::vector<uint64_t>& gamma_set) {
  return grid_search_core(scenario_objective(scenario, T), B_set, gamma_set);
}

std::vector<std::pair<double, ConfigEvaluation>> pareto_frontier(
    const Scenario& scenario, const std::vector<double>& T_grid,
    const std::vector<uint64_t>& B_set,
    const std::vector<uint64_t>& gamma_set) {
  if (T_grid.empty()) {
    throw std::invalid_argument("pareto_frontier: T_grid must be nonempty");
  }
  std::vector<double> ts = T_grid;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<std::pair<double, ConfigEvaluation>> frontier;
  double best_so_far = -1.0;
  for (double T : ts) {
    SearchResult r = grid_search(scenario, T, B_set, gamma_set);
    if (r.best.predicted_accuracy >= best_so_far) {
      frontier.emplace_back(T, r.best);
      best_so_far = r.best.predicted_accuracy;
    }
  }
  return frontier;
}

}  // namespace ttslat
