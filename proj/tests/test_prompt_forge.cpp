#include <doctest.h>

#include <sstream>

#include "sjtforge/prompt_forge.hpp"

using namespace sjtforge;

namespace {

std::pair<std::string, std::string> first_and_last_line(const std::string& s) {
  std::istringstream in(s);
  std::string line, first, last;
  while (std::getline(in, line)) {
    std::string t = parse_detail::trim(line);
    if (t.empty()) continue;
    if (first.empty()) first = t;
    last = t;
  }
  return {first, last};
}

}  // namespace

TEST_CASE("strategy catalogue and declared sets") {
  CHECK(strategy_catalogue().size() == 9);
  CHECK(declared_strategies(PromptVersion::v0) == std::set<int>{1, 5, 8});
  CHECK(declared_strategies(PromptVersion::v1) ==
        std::set<int>{1, 2, 4, 5, 7, 8, 9});
  CHECK(declared_strategies(PromptVersion::v2) ==
        std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("each version passes its own strategy audit") {
  for (auto version :
       {PromptVersion::v0, PromptVersion::v1, PromptVersion::v2}) {
    for (Facet facet : all_facets) {
      auto spec = default_prompt_spec(version, facet);
      std::string prompt = build_prompt(spec);
      auto report = strategy_audit(prompt, declared_strategies(version));
      INFO(prompt_version_id(version), " ", facet_id(facet));
      CHECK(report.pass);
      CHECK(report.missing.empty());
    }
  }
}

TEST_CASE("v0 lacks the richer strategies") {
  auto prompt = build_prompt(
      default_prompt_spec(PromptVersion::v0, Facet::gregariousness));
  auto report = strategy_audit(prompt, declared_strategies(PromptVersion::v2));
  CHECK(!report.pass);
  CHECK(report.missing.count(4));  // no chain-of-thought
  CHECK(report.missing.count(9));  // no emotional stimulus
}

TEST_CASE("v1 and v2 open and close with the task instruction") {
  for (auto version : {PromptVersion::v1, PromptVersion::v2}) {
    auto spec = default_prompt_spec(version, Facet::compliance);
    auto [first, last] = first_and_last_line(build_prompt(spec));
    CHECK(first.find("continue generating up to Scenario 9") !=
          std::string::npos);
    CHECK(last.find("continue generating up to Scenario 9") !=
          std::string::npos);
  }
  auto [first, last] = first_and_last_line(
      build_prompt(default_prompt_spec(PromptVersion::v0, Facet::compliance)));
  CHECK(first != last);
  CHECK(last.rfind("Scenario", 0) == 0);  // v0 ends in open scenario slots
}

TEST_CASE("prompt assembly is deterministic") {
  auto spec = default_prompt_spec(PromptVersion::v2, Facet::openness_to_ideas);
  CHECK(build_prompt(spec) == build_prompt(spec));
}

TEST_CASE("worked example renders inside delimiters") {
  auto spec = default_prompt_spec(PromptVersion::v1, Facet::self_consciousness);
  std::string prompt = build_prompt(spec);
  CHECK(prompt.find("###") != std::string::npos);
  CHECK(prompt.find("Scenario 1:") != std::string::npos);
  CHECK(prompt.find("wrong screening room") != std::string::npos);
  CHECK(prompt.find("Scoring:") != std::string::npos);
}

TEST_CASE("spec validation errors") {
  auto spec = default_prompt_spec(PromptVersion::v1, Facet::compliance);
  spec.examples.clear();
  CHECK_THROWS_AS(build_prompt(spec), SpecError);

  spec = default_prompt_spec(PromptVersion::v1, Facet::compliance);
  spec.behavior_descriptions.clear();
  CHECK_THROWS_AS(build_prompt(spec), SpecError);

  spec = default_prompt_spec(PromptVersion::v2, Facet::compliance);
  spec.trait_definition.clear();
  CHECK_THROWS_AS(build_prompt(spec), SpecError);

  spec = default_prompt_spec(PromptVersion::v0, Facet::compliance);
  spec.target_scenario_count = 0;
  CHECK_THROWS_AS(build_prompt(spec), SpecError);
}

TEST_CASE("prompt spec JSON round-trip") {
  auto spec = default_prompt_spec(PromptVersion::v2, Facet::self_discipline);
  spec.trait_label = "self-discipline";
  auto j = prompt_spec_to_json(spec);
  auto back = prompt_spec_from_json(j);
  CHECK(build_prompt(back) == build_prompt(spec));
  CHECK(back.trait == spec.trait);
  CHECK(back.trait_label == spec.trait_label);

  j["version"] = "v9";
  CHECK_THROWS_AS(prompt_spec_from_json(j), SpecError);
}

TEST_CASE("version ids round-trip") {
  for (auto v : {PromptVersion::v0, PromptVersion::v1, PromptVersion::v2}) {
    auto back = prompt_version_from_id(prompt_version_id(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
  CHECK(!prompt_version_from_id("v3").has_value());
}
