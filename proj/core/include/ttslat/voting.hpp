#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ttslat {

// Distribution of a single branch's final answer: index 0 is the correct
// answer, indices 1..k are distractors.
struct AnswerModel {
  double p_correct = 0.5;
  std::vector<double> wrong_probs;  // k >= 1 entries summing to 1 - p_correct

  static AnswerModel uniform(double p_correct, uint64_t distractors);

  uint64_t distractors() const { return wrong_probs.size(); }

  // Same distractor shape, rescaled so the correct answer has probability p.
  AnswerModel with_p_correct(double p) const;

  void validate() const;
  bool operator==(const AnswerModel&) const = default;
};

enum class TieRule {
  SplitCredit,   // 1/(#tied leaders) when the correct answer is among them
  FavorCorrect,  // ties resolve to the correct answer
  FavorWrong,    // ties resolve against the correct answer
};

enum class AggregationStrategy {
  PlainVote,  // majority vote on counts
  MinMax,     // weight groups by min confidence, pick the heaviest group
  MinVote,    // min confidence x group size
  AvgMax,     // mean confidence
  AvgVote,    // mean confidence x group size
};

struct BranchOutput {
  int answer_id = 0;       // 0 = correct, 1..k = distractors
  double confidence = 0;   // in [0, 1]
};

// Exact enumeration guard: number of multinomial outcome vectors C(B+k, k).
inline constexpr double kVoteEnumerationLimit = 1e7;
double vote_enumeration_outcomes(uint64_t branches, uint64_t distractors);

// Exact probability that the correct answer wins the plurality vote over
// `branches` i.i.d. draws from the model. Throws EnumerationLimitError when
// the outcome count exceeds kVoteEnumerationLimit.
double vote_accuracy_exact(const AnswerModel& model, uint64_t branches,
                           TieRule tie_rule = TieRule::SplitCredit);

// Exact accuracy plus the enumerated total probability mass (== 1 up to
// rounding); the second field exists so tests can check the enumeration.
struct VoteExactDetail {
  double accuracy = 0;
  double total_probability = 0;
};
VoteExactDetail vote_accuracy_exact_detail(const AnswerModel& model,
                                           uint64_t branches,
                                           TieRule tie_rule);

struct McEstimate {
  double estimate = 0;
  double std_error = 0;
};

// Monte Carlo estimate; deterministic for a fixed seed.
McEstimate vote_accuracy_mc(const AnswerModel& model, uint64_t branches,
                            TieRule tie_rule, uint64_t trials, uint64_t seed);

// Confidence-based aggregation over concrete branch outputs. Groups outputs
// by answer, weights each group per the strategy, and returns the winning
// answer id; ties break toward the smaller id.
int aggregate_confidence(const std::vector<BranchOutput>& outputs,
                         AggregationStrategy strategy);

const char* to_string(TieRule rule);
const char* to_string(AggregationStrategy strategy);
TieRule tie_rule_from_string(const std::string& name);
AggregationStrategy aggregation_from_string(const std::string& name);

}  // namespace ttslat
