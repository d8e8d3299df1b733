#include "ttslat/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ttslat/curves.hpp"
#include "ttslat/rng.hpp"
#include "ttslat/voting.hpp"

namespace ttslat {

namespace {

// Stream tags so a trial's accept, answer, confidence, and tie draws never
// collide regardless of how many cycles the timeline runs.
constexpr uint64_t kStreamAccept = 1;
constexpr uint64_t kStreamAnswer = 2;
constexpr uint64_t kStreamConfidence = 3;
constexpr uint64_t kStreamTie = 4;

struct SimPlan {
  const Scenario* sc = nullptr;
  ConcurrencyConfig config;
  uint64_t B = 1;
  uint64_t sequences = 1;
  uint64_t gamma = 0;
  double budget = 0;   // decode budget, T - prefill (may be <= 0)
  double prefill = 0;
  uint64_t cap = 0;    // 0 = unbounded
  std::vector<double> accept_cdf;  // accept_cdf[i] = P(accepts <= i), i < gamma
  std::vector<double> wrong_cum;   // normalized distractor shape, cumulative
  bool needs_confidence = false;

  // gamma == 0: the timeline is deterministic and shared across trials
  uint64_t det_tokens = 0;
  uint64_t det_cycles = 0;
  double det_elapsed = 0;
  Bound det_bound = Bound::MemoryBound;
};

struct TimelineResult {
  uint64_t cycles = 0;
  double elapsed = 0;  // decode time only
  Bound bound = Bound::MemoryBound;
};

// Advances the decode clock until the budget is exhausted; a step or cycle
// that would overrun is dropped entirely. tokens must arrive sized B (zeros).
TimelineResult run_timeline(const SimPlan& plan, uint64_t seed, uint64_t trial,
                            std::vector<uint64_t>& tokens,
                            std::vector<TraceEvent>* events) {
  const Scenario& sc = *plan.sc;
  TimelineResult r;
  if (plan.budget <= 0) return r;

  if (events) {
    events->push_back({"start", plan.prefill, -1, 0, 0, Bound::MemoryBound});
  }

  if (plan.gamma == 0) {
    uint64_t len = 0;
    for (;;) {
      StepCost c = step_cost(sc.hardware, sc.pair.target, plan.sequences, 1,
                             static_cast<double>(len));
      r.bound = c.bound;
      if (r.elapsed + c.step_time > plan.budget) break;
      r.elapsed += c.step_time;
      ++len;
      ++r.cycles;
      if (events) {
        for (uint64_t b = 0; b < plan.B; ++b) {
          events->push_back({"cycle", plan.prefill + r.elapsed,
                             static_cast<int64_t>(b), 1, len, c.bound});
        }
      }
      if (plan.cap > 0 && len >= plan.cap) break;
    }
    std::fill(tokens.begin(), tokens.end(), len);
    return r;
  }

  const uint64_t gamma = plan.gamma;
  uint64_t total = 0;
  std::vector<uint64_t> accept_keys(plan.B);
  for (uint64_t b = 0; b < plan.B; ++b) {
    accept_keys[b] = CounterRng::derive_key(seed, trial, b, kStreamAccept);
  }
  const double cap_total =
      plan.cap > 0 ? static_cast<double>(plan.cap) * plan.B : -1.0;
  for (;;) {
    double mean_len = static_cast<double>(total) / static_cast<double>(plan.B);
    StepCost draft =
        step_cost(sc.hardware, sc.pair.draft, plan.sequences, 1, mean_len);
    StepCost verify = step_cost(sc.hardware, sc.pair.target, plan.sequences,
                                gamma + 1, mean_len);
    double cycle =
        static_cast<double>(gamma) * draft.step_time + verify.step_time;
    r.bound = verify.bound;
    if (r.elapsed + cycle > plan.budget) break;
    r.elapsed += cycle;
    ++r.cycles;
    for (uint64_t b = 0; b < plan.B; ++b) {
      double u = CounterRng::unit_at(accept_keys[b], r.cycles);
      uint64_t accepted = 0;
      while (accepted < gamma && u >= plan.accept_cdf[accepted]) ++accepted;
      uint64_t emitted = accepted + 1;
      if (plan.cap > 0) {
        uint64_t room = plan.cap - std::min(plan.cap, tokens[b]);
        emitted = std::min(emitted, room);
      }
      tokens[b] += emitted;
      total += emitted;
      if (events) {
        events->push_back({"cycle", plan.prefill + r.elapsed,
                           static_cast<int64_t>(b), emitted, tokens[b],
                           verify.bound});
      }
    }
    if (cap_total >= 0 && static_cast<double>(total) >= cap_total) break;
  }
  return r;
}

// Samples each branch's answer, then aggregates. Returns the chosen id.
int choose_answer(const SimPlan& plan, uint64_t seed, uint64_t trial,
                  const std::vector<uint64_t>& tokens,
                  std::vector<uint64_t>& counts_scratch,
                  std::vector<BranchOutput>& outputs_scratch) {
  const Scenario& sc = *plan.sc;
  const size_t k = plan.wrong_cum.size();
  counts_scratch.assign(k + 1, 0);
  outputs_scratch.clear();

  for (uint64_t b = 0; b < plan.B; ++b) {
    double p = tokens[b] >= 1
                   ? curve_eval(sc.curve, static_cast<double>(tokens[b]))
                   : sc.curve.a_min;
    uint64_t answer_key = CounterRng::derive_key(seed, trial, b, kStreamAnswer);
    double u = CounterRng::unit_at(answer_key, 0);
    int ans = 0;
    if (u >= p) {
      double v = (u - p) / (1.0 - p);
      size_t idx = 0;
      while (idx + 1 < k && v >= plan.wrong_cum[idx]) ++idx;
      ans = static_cast<int>(idx) + 1;
    }
    ++counts_scratch[static_cast<size_t>(ans)];
    if (plan.needs_confidence) {
      CounterRng rng(seed, trial, b, kStreamConfidence);
      const BetaParams& bp =
          ans == 0 ? sc.confidence_correct : sc.confidence_wrong;
      outputs_scratch.push_back({ans, rng.beta(bp.alpha, bp.beta)});
    }
  }

  if (plan.needs_confidence) {
    return aggregate_confidence(outputs_scratch, sc.aggregation);
  }

  uint64_t max_count = 0;
  for (uint64_t c : counts_scratch) max_count = std::max(max_count, c);
  int leaders[2] = {-1, -1};  // smallest leader, smallest non-correct leader
  uint64_t n_tied = 0;
  for (size_t i = 0; i < counts_scratch.size(); ++i) {
    if (counts_scratch[i] == max_count) {
      ++n_tied;
      if (leaders[0] < 0) leaders[0] = static_cast<int>(i);
      if (leaders[1] < 0 && i > 0) leaders[1] = static_cast<int>(i);
    }
  }
  if (n_tied == 1) return leaders[0];
  switch (sc.tie_rule) {
    case TieRule::FavorCorrect:
      return counts_scratch[0] == max_count ? 0 : leaders[0];
    case TieRule::FavorWrong:
      return leaders[1] >= 0 ? leaders[1] : leaders[0];
    case TieRule::SplitCredit: {
      // uniform pick among the tied leaders: the sampling counterpart of the
      // expected-credit rule used by the analytic vote
      uint64_t tie_key = CounterRng::derive_key(seed, trial, 0, kStreamTie);
      uint64_t pick = static_cast<uint64_t>(
          CounterRng::unit_at(tie_key, 0) * static_cast<double>(n_tied));
      if (pick >= n_tied) pick = n_tied - 1;
      for (size_t i = 0; i < counts_scratch.size(); ++i) {
        if (counts_scratch[i] == max_count) {
          if (pick == 0) return static_cast<int>(i);
          --pick;
        }
      }
      return leaders[0];
    }
  }
  return leaders[0];
}

SimPlan make_plan(const Scenario& sc, const ConcurrencyConfig& config,
                  double T) {
  sc.validate();
  config.validate();
  SimPlan plan;
  plan.sc = &sc;
  plan.config = config;
  plan.B = config.branches;
  plan.sequences = config.sequences();
  plan.gamma = config.draft_len;
  plan.prefill = sc.prefill_offset;
  plan.budget = T - sc.prefill_offset;
  plan.cap = sc.max_tokens_per_branch;
  plan.needs_confidence = sc.aggregation != AggregationStrategy::PlainVote;

  if (plan.gamma > 0) {
    plan.accept_cdf.resize(plan.gamma);
    double alpha_pow = sc.pair.acceptance_rate;
    for (uint64_t i = 0; i < plan.gamma; ++i) {
      plan.accept_cdf[i] = 1.0 - alpha_pow;
      alpha_pow *= sc.pair.acceptance_rate;
    }
  }

  double wrong_sum = 0;
  for (double w : sc.answer_model.wrong_probs) wrong_sum += w;
  plan.wrong_cum.resize(sc.answer_model.wrong_probs.size());
  double acc = 0;
  for (size_t i = 0; i < plan.wrong_cum.size(); ++i) {
    double share = wrong_sum > 0
                       ? sc.answer_model.wrong_probs[i] / wrong_sum
                       : 1.0 / static_cast<double>(plan.wrong_cum.size());
    acc += share;
    plan.wrong_cum[i] = acc;
  }

  if (plan.gamma == 0) {
    std::vector<uint64_t> tokens(plan.B, 0);
    TimelineResult det = run_timeline(plan, 0, 0, tokens, nullptr);
    plan.det_tokens = tokens.empty() ? 0 : tokens[0];
    plan.det_cycles = det.cycles;
    plan.det_elapsed = det.elapsed;
    plan.det_bound = det.bound;
  }
  return plan;
}

struct TrialScratch {
  std::vector<uint64_t> tokens;
  std::vector<uint64_t> counts;
  std::vector<BranchOutput> outputs;
};

TrialRecord run_trial(const SimPlan& plan, uint64_t seed, uint64_t trial,
                      TrialScratch& scratch) {
  TrialRecord rec;
  rec.trial_id = trial;
  scratch.tokens.assign(plan.B, 0);

  if (plan.gamma == 0) {
    std::fill(scratch.tokens.begin(), scratch.tokens.end(), plan.det_tokens);
    rec.cycles = plan.det_cycles;
    rec.elapsed = plan.prefill + plan.det_elapsed;
  } else {
    TimelineResult t =
        run_timeline(plan, seed, trial, scratch.tokens, nullptr);
    rec.cycles = t.cycles;
    rec.elapsed = plan.prefill + t.elapsed;
  }

  rec.chosen_answer =
      choose_answer(plan, seed, trial, scratch.tokens, scratch.counts,
                    scratch.outputs);
  rec.correct = rec.chosen_answer == 0;
  rec.tokens_per_branch = scratch.tokens;
  return rec;
}

}  // namespace

SimulationSummary simulate(const Scenario& scenario,
                           const ConcurrencyConfig& config, double T,
                           uint64_t trials, uint64_t seed, unsigned workers) {
  if (trials < 1) {
    throw std::invalid_argument("simulate: trials must be >= 1");
  }
  SimPlan plan = make_plan(scenario, config, T);

  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(
      std::min<uint64_t>(workers, trials));

  struct Partial {
    uint64_t correct = 0;
    uint64_t tokens = 0;
    uint64_t cycles = 0;
  };
  std::vector<Partial> partials(workers);

  auto run_range = [&](unsigned w, uint64_t lo, uint64_t hi) {
    TrialScratch scratch;
    Partial p;
    for (uint64_t t = lo; t < hi; ++t) {
      scratch.tokens.assign(plan.B, 0);
      uint64_t cycles;
      if (plan.gamma == 0) {
        std::fill(scratch.tokens.begin(), scratch.tokens.end(),
                  plan.det_tokens);
        cycles = plan.det_cycles;
      } else {
        TimelineResult r = run_timeline(plan, seed, t, scratch.tokens, nullptr);
        cycles = r.cycles;
      }
      int chosen = choose_answer(plan, seed, t, scratch.tokens, scratch.counts,
                                 scratch.outputs);
      p.correct += chosen == 0 ? 1 : 0;
      p.cycles += cycles;
      for (uint64_t tok : scratch.tokens) p.tokens += tok;
    }
    partials[w] = p;
  };

  if (workers == 1) {
    run_range(0, 0, trials);
  } else {
    std::vector<std::thread> threads;
    uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      uint64_t lo = std::min<uint64_t>(static_cast<uint64_t>(w) * chunk, trials);
      uint64_t hi = std::min<uint64_t>(lo + chunk, trials);
      threads.emplace_back(run_range, w, lo, hi);
    }
    for (auto& th : threads) th.join();
  }

  uint64_t correct = 0, tokens = 0, cycles = 0;
  for (const auto& p : partials) {
    correct += p.correct;
    tokens += p.tokens;
    cycles += p.cycles;
  }

  SimulationSummary s;
  s.trials = trials;
  s.seed = seed;
  double n = static_cast<double>(trials);
  s.accuracy_estimate = static_cast<double>(correct) / n;
  s.std_error =
      std::sqrt(s.accuracy_estimate * (1.0 - s.accuracy_estimate) / n);
  s.mean_tokens =
      static_cast<double>(tokens) / (n * static_cast<double>(plan.B));
  s.mean_cycles = static_cast<double>(cycles) / n;
  return s;
}

TrialRecord simulate_trial(const Scenario& scenario,
                           const ConcurrencyConfig& config, double T,
                           uint64_t seed, uint64_t trial_id) {
  SimPlan plan = make_plan(scenario, config, T);
  TrialScratch scratch;
  return run_trial(plan, seed, trial_id, scratch);
}

std::vector<TraceEvent> simulate_trace(const Scenario& scenario,
                                       const ConcurrencyConfig& config,
                                       double T, uint64_t seed) {
  SimPlan plan = make_plan(scenario, config, T);
  std::vector<TraceEvent> events;
  std::vector<uint64_t> tokens(plan.B, 0);
  run_timeline(plan, seed, 0, tokens, &events);
  return events;
}

}  // namespace ttslat
