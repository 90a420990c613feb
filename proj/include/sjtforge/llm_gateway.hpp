#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "item_model.hpp"
#include "item_parser.hpp"
#include "prompt_forge.hpp"

namespace sjtforge {

struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AuthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GatewayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PartialGeneration : std::runtime_error {
  std::vector<SjtItem> items;
  PartialGeneration(std::string msg, std::vector<SjtItem> got)
      : std::runtime_error(std::move(msg)), items(std::move(got)) {}
};

struct GenParams {
  std::string model_id = "gpt-4-1106-preview";
  double temperature = 1.0;
  int max_attempts = 3;
  std::chrono::milliseconds request_timeout{30000};
  std::string endpoint_url;  // empty -> mock only
  std::chrono::milliseconds backoff_base{1000};

  void validate() const {
    if (temperature < 0.0 || temperature > 2.0)
      throw ParamError("temperature must lie in [0, 2]");
    if (max_attempts < 1) throw ParamError("max_attempts must be >= 1");
  }
};

struct CompletionRecord {
  std::string prompt_hash;
  std::string raw_text;
  GenParams params;
  std::string timestamp;  // empty in mock mode
  int attempts = 0;
};

/// FNV-1a 64-bit, hex-encoded; keys mock-script lookups and run manifests.
inline std::string prompt_hash(const std::string& prompt) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Mock script: {"responses": [{"prompt_hash": "..."| "prompt_contains": "...",
/// "completion": "..."}]}. First matching rule wins.
struct MockScript {
  struct Rule {
    std::string hash;      // exact prompt-hash match
    std::string contains;  // substring match on the prompt text
    std::string completion;
    int fail_first = 0;  // simulate this many transient failures first
  };
  std::vector<Rule> rules;

  static MockScript from_json(const nlohmann::json& j) {
    MockScript script;
    for (const auto& r : j.at("responses")) {
      Rule rule;
      rule.hash = r.value("prompt_hash", "");
      rule.contains = r.value("prompt_contains", "");
      rule.completion = r.at("completion").get<std::string>();
      rule.fail_first = r.value("fail_first", 0);
      script.rules.push_back(std::move(rule));
    }
    return script;
  }

  const Rule* match(const std::string& prompt) const {
    std::string hash = prompt_hash(prompt);
    for (const auto& r : rules) {
      if (!r.hash.empty() && r.hash == hash) return &r;
      if (!r.contains.empty() && prompt.find(r.contains) != std::string::npos)
        return &r;
    }
    return nullptr;
  }
};

/// Transport callback: returns (http_status, body). Tests and the CLI inject
/// either the HTTP client or a mock; the gateway owns retries and parsing.
using Transport =
    std::function<std::pair<int, std::string>(const std::string& prompt,
                                              const GenParams& params)>;

class Gateway {
 public:
  explicit Gateway(Transport transport, uint64_t retry_seed = 0)
      : transport_(std::move(transport)), rng_(retry_seed) {}

  /// One prompt -> one completion, retrying transient failures with
  /// exponential backoff (base from params, factor 2, jitter +/-20%).
  CompletionRecord complete(const std::string& prompt, const GenParams& params) {
    params.validate();
    CompletionRecord record;
    record.prompt_hash = prompt_hash(prompt);
    record.params = params;

    std::string last_error;
    for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
      record.attempts = attempt;
      int status = 0;
      std::string body;
      try {
        std::tie(status, body) = transport_(prompt, params);
      } catch (const std::exception& e) {
        last_error = e.what();
        backoff(attempt, params);
        continue;
      }
      if (status == 401 || status == 403)
        throw AuthError("endpoint rejected credential (HTTP " +
                        std::to_string(status) + ")");
      if (status == 200) {
        if (body.empty()) {
          last_error = "empty completion body";
          backoff(attempt, params);
          continue;
        }
        record.raw_text = body;
        return record;
      }
      last_error = "HTTP " + std::to_string(status);
      if (status == 429 || status >= 500) {
        backoff(attempt, params);
        continue;
      }
      throw GatewayError("non-retryable response: " + last_error);
    }
    throw GatewayError("retries exhausted: " + last_error);
  }

 private:
  void backoff(int attempt, const GenParams& params) {
    using namespace std::chrono;
    double base = double(params.backoff_base.count()) * std::pow(2.0, attempt - 1);
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    auto delay = milliseconds(int64_t(base * jitter(rng_)));
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
  }

  Transport transport_;
  std::mt19937_64 rng_;
};

inline Transport mock_transport(MockScript script) {
  auto failure_counts = std::make_shared<std::map<const void*, int>>();
  auto shared = std::make_shared<MockScript>(std::move(script));
  return [shared, failure_counts](const std::string& prompt,
                                  const GenParams&) -> std::pair<int, std::string> {
    const MockScript::Rule* rule = shared->match(prompt);
    if (!rule) return {404, ""};
    int& failed = (*failure_counts)[rule];
    if (failed < rule->fail_first) {
      ++failed;
      return {429, ""};
    }
    return {200, rule->completion};
  };
}

struct GenerationDiagnostics {
  int completions_requested = 0;
  int blocks_parsed = 0;
  int accepted = 0;
  int rejected = 0;
  std::vector<ParseIssue> issues;
  std::vector<std::string> warnings;
};

/// Loops complete -> parse until `want` valid items are collected or the
/// attempt budget (params.max_attempts completions) is spent.
inline std::pair<std::vector<SjtItem>, GenerationDiagnostics> generate_items(
    Gateway& gateway, const PromptSpec& spec, const GenParams& params, int want) {
  if (want < 1) throw ParamError("want must be >= 1");
  params.validate();

  GenerationDiagnostics diag;
  if (params.temperature >= 1.5)
    diag.warnings.push_back(
        "temperature " + std::to_string(params.temperature) +
        " is in the range where completions degrade into incoherent output");

  std::string prompt = build_prompt(spec);
  ParseOptions popts;
  popts.question_sentinels = {spec.question_sentinel, "你会怎么做？",
                              "你会怎么做?"};

  std::vector<SjtItem> items;
  for (int call = 0; call < params.max_attempts && int(items.size()) < want;
       ++call) {
    GenParams one_shot = params;
    one_shot.max_attempts = params.max_attempts;
    CompletionRecord record = gateway.complete(prompt, one_shot);
    ++diag.completions_requested;

    ParsedCompletion parsed = parse_items(record.raw_text, spec.trait, popts);
    diag.blocks_parsed += parsed.block_count;
    diag.issues.insert(diag.issues.end(), parsed.issues.begin(),
                       parsed.issues.end());

    for (auto& item : parsed.items) {
      if (int(items.size()) >= want) break;
      ValidationResult vr = validate_item(item, spec.question_sentinel);
      if (!vr.ok()) {
        ++diag.rejected;
        for (const auto& v : vr.violations)
          diag.issues.push_back({0, v.code, v.detail});
        continue;
      }
      item.item_id = std::string(facet_id(spec.trait)) + "-" +
                     std::to_string(items.size() + 1);
      item.provenance.source = ItemSource::llm_generated;
      item.provenance.prompt_version = prompt_version_id(spec.version);
      item.provenance.temperature = params.temperature;
      item.provenance.timestamp = record.timestamp;
      items.push_back(std::move(item));
      ++diag.accepted;
    }
    diag.rejected = diag.blocks_parsed - diag.accepted;
  }

  if (int(items.size()) < want)
    throw PartialGeneration("generation budget exhausted with " +
                                std::to_string(items.size()) + " of " +
                                std::to_string(want) + " items",
                            std::move(items));
  return {std::move(items), std::move(diag)};
}

}  // namespace sjtforge
