#include "ttslat/voting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ttslat/errors.hpp"
#include "ttslat/rng.hpp"

namespace ttslat {

AnswerModel AnswerModel::uniform(double p_correct, uint64_t distractors) {
  if (distractors < 1) {
    throw std::invalid_argument("AnswerModel: need at least 1 distractor");
  }
  AnswerModel m;
  m.p_correct = p_correct;
  m.wrong_probs.assign(distractors,
                       (1.0 - p_correct) / static_cast<double>(distractors));
  m.validate();
  return m;
}

AnswerModel AnswerModel::with_p_correct(double p) const {
  AnswerModel m;
  m.p_correct = p;
  double wrong_sum = 0;
  for (double w : wrong_probs) wrong_sum += w;
  m.wrong_probs.resize(wrong_probs.size());
  if (wrong_sum <= 0.0) {
    double k = static_cast<double>(wrong_probs.size());
    for (auto& w : m.wrong_probs) w = (1.0 - p) / k;
  } else {
    double scale = (1.0 - p) / wrong_sum;
    for (size_t i = 0; i < wrong_probs.size(); ++i) {
      m.wrong_probs[i] = wrong_probs[i] * scale;
    }
  }
  m.validate();
  return m;
}

void AnswerModel::validate() const {
  if (!(p_correct >= 0.0 && p_correct <= 1.0)) {
    throw ValidationError("answer_model.p_correct must lie in [0,1]");
  }
  if (wrong_probs.empty()) {
    throw ValidationError("answer_model.wrong_probs must have k >= 1 entries");
  }
  double sum = p_correct;
  for (double w : wrong_probs) {
    if (w < 0.0) {
      throw ValidationError("answer_model.wrong_probs entries must be >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError(
        "answer_model probabilities must sum to 1 within 1e-12");
  }
}

double vote_enumeration_outcomes(uint64_t branches, uint64_t distractors) {
  // C(B + k, k)
  double v = 1.0;
  for (uint64_t i = 1; i <= distractors; ++i) {
    v *= static_cast<double>(branches + i) / static_cast<double>(i);
    if (v > 1e18) return v;  // far beyond any guard; avoid overflow
  }
  return v;
}

namespace {

double leaf_credit(const std::vector<uint64_t>& counts, TieRule rule) {
  uint64_t max_count = 0;
  for (uint64_t c : counts) max_count = std::max(max_count, c);
  if (counts[0] < max_count) return 0.0;
  uint64_t tied = 0;
  for (uint64_t c : counts) tied += (c == max_count) ? 1 : 0;
  if (tied == 1) return 1.0;
  switch (rule) {
    case TieRule::SplitCredit:
      return 1.0 / static_cast<double>(tied);
    case TieRule::FavorCorrect:
      return 1.0;
    case TieRule::FavorWrong:
      return 0.0;
  }
  return 0.0;
}

struct Enumerator {
  const std::vector<double>& probs;  // size k + 1, index 0 = correct
  TieRule rule;
  std::vector<uint64_t> counts;
  double accuracy = 0;
  double total = 0;

  // Walks all count vectors summing to B. `weight` carries the partial
  // multinomial coefficient times the probability of the counts fixed so
  // far; each sibling is derived from the previous one in O(1).
  void walk(size_t category, uint64_t remaining, double weight) {
    if (category + 1 == probs.size()) {
      counts[category] = remaining;
      double w = weight * std::pow(probs[category],
                                   static_cast<double>(remaining));
      total += w;
      accuracy += w * leaf_credit(counts, rule);
      return;
    }
    double w = weight;  // count = 0 for this category
    for (uint64_t c = 0; c <= remaining; ++c) {
      counts[category] = c;
      walk(category + 1, remaining - c, w);
      // advance to count = c + 1: multiply by C(remaining, c+1)/C(remaining, c) * p
      w *= static_cast<double>(remaining - c) / static_cast<double>(c + 1) *
           probs[category];
    }
  }
};

}  // namespace

VoteExactDetail vote_accuracy_exact_detail(const AnswerModel& model,
                                           uint64_t branches,
                                           TieRule tie_rule) {
  model.validate();
  if (branches < 1) {
    throw std::invalid_argument("vote_accuracy_exact: branches must be >= 1");
  }
  uint64_t k = model.distractors();
  if (vote_enumeration_outcomes(branches, k) > kVoteEnumerationLimit ||
      branches > 1000) {
    throw EnumerationLimitError(
        "vote_accuracy_exact: enumeration guard exceeded, use vote_accuracy_mc");
  }
  std::vector<double> probs;
  probs.reserve(k + 1);
  probs.push_back(model.p_correct);
  probs.insert(probs.end(), model.wrong_probs.begin(), model.wrong_probs.end());

  Enumerator e{probs, tie_rule, std::vector<uint64_t>(k + 1, 0), 0, 0};
  e.walk(0, branches, 1.0);
  return {e.accuracy, e.total};
}

double vote_accuracy_exact(const AnswerModel& model, uint64_t branches,
                           TieRule tie_rule) {
  return vote_accuracy_exact_detail(model, branches, tie_rule).accuracy;
}

McEstimate vote_accuracy_mc(const AnswerModel& model, uint64_t branches,
                            TieRule tie_rule, uint64_t trials, uint64_t seed) {
  model.validate();
  if (branches < 1 || trials < 1) {
    throw std::invalid_argument("vote_accuracy_mc: branches and trials >= 1");
  }
  uint64_t k = model.distractors();
  std::vector<double> cum(k + 1);
  cum[0] = model.p_correct;
  for (uint64_t i = 0; i < k; ++i) cum[i + 1] = cum[i] + model.wrong_probs[i];

  std::vector<uint64_t> counts(k + 1);
  double sum = 0, sumsq = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t);
    std::fill(counts.begin(), counts.end(), 0);
    for (uint64_t b = 0; b < branches; ++b) {
      double u = rng.next_unit();
      size_t idx = 0;
      while (idx < k && u >= cum[idx]) ++idx;
      ++counts[idx];
    }
    // expected credit under the tie rule; keeps the estimator unbiased with
    // lower variance than sampling the tie-break
    double credit = leaf_credit(counts, tie_rule);
    sum += credit;
    sumsq += credit * credit;
  }
  double n = static_cast<double>(trials);
  double mean = sum / n;
  double se = 0;
  if (trials > 1) {
    double var = (sumsq - n * mean * mean) / (n - 1.0);
    se = std::sqrt(std::max(var, 0.0) / n);
  }
  return {mean, se};
}

int aggregate_confidence(const std::vector<BranchOutput>& outputs,
                         AggregationStrategy strategy) {
  if (outputs.empty()) {
    throw std::invalid_argument("aggregate_confidence: empty output list");
  }
  struct Group {
    uint64_t count = 0;
    double min_conf = 1.0;
    double sum_conf = 0;
  };
  std::map<int, Group> groups;
  for (const auto& o : outputs) {
    auto& g = groups[o.answer_id];
    ++g.count;
    g.min_conf = std::min(g.min_conf, o.confidence);
    g.sum_conf += o.confidence;
  }
  int best_id = groups.begin()->first;
  double best_score = -1.0;
  for (const auto& [id, g] : groups) {
    double n = static_cast<double>(g.count);
    double score = 0;
    switch (strategy) {
      case AggregationStrategy::PlainVote: score = n; break;
      case AggregationStrategy::MinMax:    score = g.min_conf; break;
      case AggregationStrategy::MinVote:   score = g.min_conf * n; break;
      case AggregationStrategy::AvgMax:    score = g.sum_conf / n; break;
      case AggregationStrategy::AvgVote:   score = (g.sum_conf / n) * n; break;
    }
    // strict > with ascending iteration ties toward the smaller id
    if (score > best_score) {
      best_score = score;
      best_id = id;
    }
  }
  return best_id;
}

const char* to_string(TieRule rule) {
  switch (rule) {
    case TieRule::SplitCredit: return "split_credit";
    case TieRule::FavorCorrect: return "favor_correct";
    case TieRule::FavorWrong: return "favor_wrong";
  }
  return "split_credit";
}

const char* to_string(AggregationStrategy strategy) {
  switch (strategy) {
    case AggregationStrategy::PlainVote: return "plain_vote";
    case AggregationStrategy::MinMax: return "min_max";
    case AggregationStrategy::MinVote: return "min_vote";
    case AggregationStrategy::AvgMax: return "avg_max";
    case AggregationStrategy::AvgVote: return "avg_vote";
  }
  return "plain_vote";
}

TieRule tie_rule_from_string(const std::string& name) {
  if (name == "split_credit") return TieRule::SplitCredit;
  if (name == "favor_correct") return TieRule::FavorCorrect;
  if (name == "favor_wrong") return TieRule::FavorWrong;
  throw ValidationError("unknown tie_rule: " + name);
}

AggregationStrategy aggregation_from_string(const std::string& name) {
  if (name == "plain_vote") return AggregationStrategy::PlainVote;
  if (name == "min_max") return AggregationStrategy::MinMax;
  if (name == "min_vote") return AggregationStrategy::MinVote;
  if (name == "avg_max") return AggregationStrategy::AvgMax;
  if (name == "avg_vote") return AggregationStrategy::AvgVote;
  throw ValidationError("unknown aggregation: " + name);
}

}  // namespace ttslat
