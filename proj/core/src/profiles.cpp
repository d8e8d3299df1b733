#include "ttslat/profiles.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ttslat/errors.hpp"

namespace ttslat {

using nlohmann::json;

void HardwareProfile::validate() const {
  if (!(mem_bandwidth > 0)) {
    throw ValidationError("hardware.mem_bandwidth must be > 0");
  }
  if (!(peak_compute > 0)) {
    throw ValidationError("hardware.peak_compute must be > 0");
  }
  if (!(bandwidth_efficiency > 0 && bandwidth_efficiency <= 1)) {
    throw ValidationError("hardware.bandwidth_efficiency must lie in (0,1]");
  }
  if (!(compute_efficiency > 0 && compute_efficiency <= 1)) {
    throw ValidationError("hardware.compute_efficiency must lie in (0,1]");
  }
  if (!(mem_capacity > 0)) {
    throw ValidationError("hardware.mem_capacity must be > 0");
  }
}

void ModelProfile::validate() const {
  if (param_count < 1) {
    throw ValidationError("model.param_count must be >= 1 (" + name + ")");
  }
  if (!(bytes_per_param > 0)) {
    throw ValidationError("model.bytes_per_param must be > 0 (" + name + ")");
  }
  if (!(kv_bytes_per_token > 0)) {
    throw ValidationError("model.kv_bytes_per_token must be > 0 (" + name +
                          ")");
  }
  if (!(flops_per_token > 0)) {
    throw ValidationError("model.flops_per_token must be > 0 (" + name + ")");
  }
  if (!(weights_bytes() > 0)) {
    throw ValidationError("model.weights_bytes must be > 0 (" + name + ")");
  }
}

void SpecDecPair::validate() const {
  target.validate();
  draft.validate();
  if (!(acceptance_rate >= 0.0 && acceptance_rate < 1.0)) {
    throw ValidationError("pair.acceptance_rate must lie in [0,1)");
  }
}

std::vector<std::string> SpecDecPair::warnings() const {
  std::vector<std::string> out;
  if (draft.param_count > target.param_count) {
    out.push_back("pair.draft (" + draft.name +
                  ") has more parameters than pair.target (" + target.name +
                  ")");
  }
  return out;
}

void ConcurrencyConfig::validate() const {
  if (branches < 1) {
    throw ValidationError("config.branches must be >= 1");
  }
  if (requests < 1) {
    throw ValidationError("config.requests must be >= 1");
  }
}

void Scenario::validate() const {
  hardware.validate();
  pair.validate();
  curve.validate();
  answer_model.validate();
  if (!(budget > 0)) {
    throw ValidationError("scenario.budget must be > 0");
  }
  if (!(prefill_offset >= 0)) {
    throw ValidationError("scenario.prefill_offset must be >= 0");
  }
  if (!(confidence_correct.alpha > 0 && confidence_correct.beta > 0)) {
    throw ValidationError("scenario.confidence_correct parameters must be > 0");
  }
  if (!(confidence_wrong.alpha > 0 && confidence_wrong.beta > 0)) {
    throw ValidationError("scenario.confidence_wrong parameters must be > 0");
  }
  if (default_config) {
    default_config->validate();
  }
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!j.is_object()) {
    throw ParseError(context + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ParseError("unknown key '" + item.key() + "' in " + context);
    }
  }
}

const json& require(const json& j, const std::string& key,
                    const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError("missing key '" + key + "' in " + context);
  }
  return *it;
}

double get_num(const json& j, const std::string& key,
               const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number()) {
    throw ParseError("key '" + key + "' in " + context + " must be a number");
  }
  return v.get<double>();
}

double get_num_or(const json& j, const std::string& key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<double>();
}

uint64_t get_count(const json& j, const std::string& key,
                   const std::string& context) {
  const json& v = require(j, key, context);
  if (v.is_number_unsigned() || v.is_number_integer()) {
    auto s = v.get<int64_t>();
    if (s < 0) {
      throw ValidationError(context + "." + key + " must be >= 0");
    }
    return static_cast<uint64_t>(s);
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d < 0 || d != std::floor(d)) {
      throw ValidationError(context + "." + key +
                            " must be a nonnegative integer");
    }
    return static_cast<uint64_t>(d);
  }
  throw ParseError("key '" + key + "' in " + context + " must be a number");
}

ModelProfile parse_model(const json& j, const std::string& context) {
  check_keys(j,
             {"name", "param_count", "bytes_per_param", "kv_bytes_per_token",
              "flops_per_token"},
             context);
  ModelProfile m;
  m.name = require(j, "name", context).get<std::string>();
  m.param_count = get_count(j, "param_count", context);
  m.bytes_per_param = get_num_or(j, "bytes_per_param", 2.0);
  m.kv_bytes_per_token = get_num(j, "kv_bytes_per_token", context);
  m.flops_per_token =
      get_num_or(j, "flops_per_token", 2.0 * static_cast<double>(m.param_count));
  return m;
}

HardwareProfile parse_hardware(const json& j) {
  check_keys(j,
             {"name", "mem_bandwidth", "peak_compute", "bandwidth_efficiency",
              "compute_efficiency", "mem_capacity"},
             "hardware");
  HardwareProfile h;
  h.name = require(j, "name", "hardware").get<std::string>();
  h.mem_bandwidth = get_num(j, "mem_bandwidth", "hardware");
  h.peak_compute = get_num(j, "peak_compute", "hardware");
  h.bandwidth_efficiency = get_num(j, "bandwidth_efficiency", "hardware");
  h.compute_efficiency = get_num(j, "compute_efficiency", "hardware");
  h.mem_capacity = get_num(j, "mem_capacity", "hardware");
  return h;
}

ConcurrencyConfig parse_config(const json& j, const std::string& context) {
  check_keys(j, {"branches", "draft_len", "requests"}, context);
  ConcurrencyConfig c;
  c.branches = get_count(j, "branches", context);
  c.draft_len = get_count(j, "draft_len", context);
  c.requests = j.contains("requests") ? get_count(j, "requests", context) : 1;
  return c;
}

BetaParams parse_beta(const json& j, const std::string& context) {
  check_keys(j, {"alpha", "beta"}, context);
  return {get_num(j, "alpha", context), get_num(j, "beta", context)};
}

json model_to_json(const ModelProfile& m) {
  return json{{"name", m.name},
              {"param_count", m.param_count},
              {"bytes_per_param", m.bytes_per_param},
              {"kv_bytes_per_token", m.kv_bytes_per_token},
              {"flops_per_token", m.flops_per_token}};
}

ModelProfile make_model(std::string name, uint64_t params, double kv_bytes) {
  ModelProfile m;
  m.name = std::move(name);
  m.param_count = params;
  m.bytes_per_param = 2.0;
  m.kv_bytes_per_token = kv_bytes;
  m.flops_per_token = 2.0 * static_cast<double>(params);
  return m;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"hardware", "pair", "curve", "answer_model", "budget",
              "max_tokens_per_branch", "prefill_offset", "tie_rule",
              "aggregation", "confidence_correct", "confidence_wrong",
              "default_config"},
             "scenario");

  Scenario s;
  s.hardware = parse_hardware(require(j, "hardware", "scenario"));

  const json& pj = require(j, "pair", "scenario");
  check_keys(pj, {"target", "draft", "acceptance_rate"}, "pair");
  s.pair.target = parse_model(require(pj, "target", "pair"), "pair.target");
  s.pair.draft = parse_model(require(pj, "draft", "pair"), "pair.draft");
  s.pair.acceptance_rate = get_num(pj, "acceptance_rate", "pair");

  const json& cj = require(j, "curve", "scenario");
  check_keys(cj, {"a_min", "a_max", "midpoint", "slope"}, "curve");
  s.curve.a_min = get_num(cj, "a_min", "curve");
  s.curve.a_max = get_num(cj, "a_max", "curve");
  s.curve.midpoint = get_num(cj, "midpoint", "curve");
  s.curve.slope = get_num(cj, "slope", "curve");

  const json& aj = require(j, "answer_model", "scenario");
  check_keys(aj, {"p_correct", "distractors", "wrong_probs"}, "answer_model");
  double p = get_num(aj, "p_correct", "answer_model");
  if (aj.contains("wrong_probs")) {
    if (aj.contains("distractors")) {
      throw ParseError(
          "answer_model: give either distractors or wrong_probs, not both");
    }
    s.answer_model.p_correct = p;
    s.answer_model.wrong_probs =
        aj.at("wrong_probs").get<std::vector<double>>();
  } else {
    uint64_t k =
        aj.contains("distractors") ? get_count(aj, "distractors", "answer_model") : 4;
    if (k < 1) {
      throw ValidationError("answer_model.distractors must be >= 1");
    }
    s.answer_model = AnswerModel::uniform(p, k);
  }

  s.budget = get_num(j, "budget", "scenario");
  if (j.contains("max_tokens_per_branch")) {
    s.max_tokens_per_branch = get_count(j, "max_tokens_per_branch", "scenario");
  }
  s.prefill_offset = get_num_or(j, "prefill_offset", 0.0);
  if (j.contains("tie_rule")) {
    s.tie_rule = tie_rule_from_string(j.at("tie_rule").get<std::string>());
  }
  if (j.contains("aggregation")) {
    s.aggregation =
        aggregation_from_string(j.at("aggregation").get<std::string>());
  }
  if (j.contains("confidence_correct")) {
    s.confidence_correct =
        parse_beta(j.at("confidence_correct"), "confidence_correct");
  }
  if (j.contains("confidence_wrong")) {
    s.confidence_wrong = parse_beta(j.at("confidence_wrong"), "confidence_wrong");
  }
  if (j.contains("default_config")) {
    s.default_config = parse_config(j.at("default_config"), "default_config");
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open scenario file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["hardware"] = json{{"name", s.hardware.name},
                       {"mem_bandwidth", s.hardware.mem_bandwidth},
                       {"peak_compute", s.hardware.peak_compute},
                       {"bandwidth_efficiency", s.hardware.bandwidth_efficiency},
                       {"compute_efficiency", s.hardware.compute_efficiency},
                       {"mem_capacity", s.hardware.mem_capacity}};
  j["pair"] = json{{"target", model_to_json(s.pair.target)},
                   {"draft", model_to_json(s.pair.draft)},
                   {"acceptance_rate", s.pair.acceptance_rate}};
  j["curve"] = json{{"a_min", s.curve.a_min},
                    {"a_max", s.curve.a_max},
                    {"midpoint", s.curve.midpoint},
                    {"slope", s.curve.slope}};
  j["answer_model"] = json{{"p_correct", s.answer_model.p_correct},
                           {"wrong_probs", s.answer_model.wrong_probs}};
  j["budget"] = s.budget;
  j["max_tokens_per_branch"] = s.max_tokens_per_branch;
  j["prefill_offset"] = s.prefill_offset;
  j["tie_rule"] = to_string(s.tie_rule);
  j["aggregation"] = to_string(s.aggregation);
  j["confidence_correct"] = json{{"alpha", s.confidence_correct.alpha},
                                 {"beta", s.confidence_correct.beta}};
  j["confidence_wrong"] = json{{"alpha", s.confidence_wrong.alpha},
                               {"beta", s.confidence_wrong.beta}};
  if (s.default_config) {
    j["default_config"] = json{{"branches", s.default_config->branches},
                               {"draft_len", s.default_config->draft_len},
                               {"requests", s.default_config->requests}};
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  scenario.validate();
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot open scenario file for writing: " + path);
  }
  out << serialize_scenario(scenario);
}

const std::vector<SpecDecPair>& builtin_pairs() {
  static const std::vector<SpecDecPair> pairs = [] {
    std::vector<SpecDecPair> v;
    auto s1_32b = make_model("s1.1-32B", 32000000000ULL, 244140.625);
    auto s1_7b = make_model("s1.1-7B", 7000000000ULL, 57344.0);
    auto r1_32b =
        make_model("DeepSeek-R1-Distill-Qwen-32B", 32000000000ULL, 244140.625);
    auto r1_7b =
        make_model("DeepSeek-R1-Distill-Qwen-7B", 7000000000ULL, 57344.0);
    auto qwq = make_model("QwQ-32B", 32000000000ULL, 244140.625);
    auto llama = make_model("LLaMa-3.1-8B-Instruct", 8000000000ULL, 131072.0);
    auto eagle3 = make_model("Eagle3", 1000000000ULL, 8192.0);
    auto s1_3b = make_model("s1.1-3B", 3000000000ULL, 36864.0);
    auto qwen05b = make_model("Qwen2.5-0.5B-Instruct", 500000000ULL, 12288.0);

    v.push_back({s1_32b, s1_7b, 0.831});
    v.push_back({r1_32b, r1_7b, 0.897});
    v.push_back({qwq, r1_7b, 0.781});
    v.push_back({llama, eagle3, 0.904});
    v.push_back({s1_3b, qwen05b, 0.701});
    for (const auto& p : v) p.validate();
    return v;
  }();
  return pairs;
}

std::optional<SpecDecPair> find_builtin_pair(const std::string& target_name) {
  for (const auto& p : builtin_pairs()) {
    if (p.target.name == target_name) return p;
  }
  return std::nullopt;
}

double kv_bytes_from_anchor(double total_kv_bytes, uint64_t seq_len) {
  if (!(total_kv_bytes > 0)) {
    throw std::invalid_argument("kv_bytes_from_anchor: total_kv must be > 0");
  }
  if (seq_len < 1) {
    throw std::invalid_argument("kv_bytes_from_anchor: seq_len must be >= 1");
  }
  return total_kv_bytes / static_cast<double>(seq_len);
}

}  // namespace ttslat
