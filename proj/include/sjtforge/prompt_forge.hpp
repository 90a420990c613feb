#pragma once

#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "item_model.hpp"
#include "item_parser.hpp"

namespace sjtforge {

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PromptVersion { v0, v1, v2 };

inline const char* prompt_version_id(PromptVersion v) {
  switch (v) {
    case PromptVersion::v0: return "v0";
    case PromptVersion::v1: return "v1";
    case PromptVersion::v2: return "v2";
  }
  return "?";
}

inline std::optional<PromptVersion> prompt_version_from_id(const std::string& s) {
  if (s == "v0") return PromptVersion::v0;
  if (s == "v1") return PromptVersion::v1;
  if (s == "v2") return PromptVersion::v2;
  return std::nullopt;
}

/// The nine catalogued prompt construction strategies.
struct Strategy {
  int id;
  const char* description;
};

inline const std::vector<Strategy>& strategy_catalogue() {
  static const std::vector<Strategy> catalogue = {
      {1, "task instructions at the beginning, repeated at the end"},
      {2, "describe context, outcome, format and style in detail"},
      {3, "break complex tasks into simpler subtasks"},
      {4, "chain-of-thought: guide step-by-step reasoning"},
      {5, "provide learning examples"},
      {6, "state what to do, avoid vague negative instructions"},
      {7, "ask the model to adopt a persona"},
      {8, "clear formatting with separators such as ###"},
      {9, "emotional, psychology-based stimulus"},
  };
  return catalogue;
}

/// Strategy sets each prompt version is built from.
inline std::set<int> declared_strategies(PromptVersion v) {
  switch (v) {
    case PromptVersion::v0: return {1, 5, 8};
    case PromptVersion::v1: return {1, 2, 4, 5, 7, 8, 9};
    case PromptVersion::v2: return {1, 2, 3, 4, 5, 6, 7, 8, 9};
  }
  return {};
}

struct PromptSpec {
  PromptVersion version = PromptVersion::v1;
  Facet trait = Facet::self_consciousness;
  std::string trait_label;       // display name, e.g. "self-consciousness"
  std::string trait_definition;  // prose definition
  std::vector<std::string> behavior_descriptions;
  std::vector<SjtItem> examples;  // rendered as worked examples
  int target_scenario_count = 9;
  std::string delimiter = "###";
  std::string emotional_stimulus = "Your work is very important to my research!";
  std::string cot_instruction =
      "Let's think through this step by step. After generating the questions, "
      "please explain the basic principles behind the scenario design and "
      "scoring for each option.";
  std::string question_sentinel = default_question_sentinel;
};

namespace prompt_detail {

inline std::string trait_tag(const PromptSpec& spec) {
  if (!spec.trait_label.empty()) return spec.trait_label;
  std::string tag = facet_id(spec.trait);
  for (auto& c : tag)
    if (c == '_') c = '-';
  return tag + " (from " + parent_factor(spec.trait) + ")";
}

inline std::string task_instruction(const PromptSpec& spec) {
  if (spec.version == PromptVersion::v0)
    return "I need to generate a personality situational judgment test based "
           "on a given trait. Here is the example:";
  std::ostringstream s;
  s << "Please continue generating up to Scenario " << spec.target_scenario_count
    << " to measure the level of "
    << (spec.version == PromptVersion::v1 ? "the following trait"
                                          : trait_tag(spec))
    << ".";
  return s.str();
}

inline void render_examples(std::ostringstream& out, const PromptSpec& spec) {
  out << spec.delimiter << "\n";
  out << "Trait: " << trait_tag(spec) << "\n";
  int n = 1;
  for (const auto& ex : spec.examples) out << render_item(ex, n++);
  out << spec.delimiter << "\n";
}

}  // namespace prompt_detail

/// Deterministic prompt assembly from ordered named sections; section
/// presence per version mirrors a fixed table so audits stay structural.
inline std::string build_prompt(const PromptSpec& spec) {
  if (spec.examples.empty())
    throw SpecError("prompt spec needs at least one worked example");
  if (spec.target_scenario_count < 1)
    throw SpecError("target_scenario_count must be positive");
  if (spec.version != PromptVersion::v0 && spec.trait_definition.empty())
    throw SpecError("v1/v2 prompts require a trait definition");
  if (spec.version == PromptVersion::v1 && spec.behavior_descriptions.empty())
    throw SpecError("v1 prompts require behavior descriptions");

  std::ostringstream out;
  const std::string task = prompt_detail::task_instruction(spec);

  if (spec.version == PromptVersion::v0) {
    out << task << "\n";
    prompt_detail::render_examples(out, spec);
    out << "Trait: " << prompt_detail::trait_tag(spec) << "\n";
    for (int i = int(spec.examples.size()) + 1; i <= spec.target_scenario_count;
         ++i)
      out << "Scenario " << i << ":\n";
    return out.str();
  }

  out << task << "\n";

  if (spec.version == PromptVersion::v1) {
    out << "Specifically:\n";
    out << "1. Role Positioning: Please act as a psychometrics expert.\n";
    out << "2. Measurement Dimension: " << prompt_detail::trait_tag(spec)
        << " - " << spec.trait_definition << "\n";
    out << "3. Behavior Descriptions:\n";
    for (const auto& b : spec.behavior_descriptions) out << b << "\n";
    out << "4. Output Requirements:\n";
    out << "(1) Context Setting: The description should be specific, involving "
           "both life and work scenarios, and combined with behavior "
           "descriptions. The situational description should be rich and "
           "diverse, ending with \""
        << spec.question_sentinel << "\"\n";
    out << "(2) Options: option A and B represent high levels of this trait, "
           "scoring 1 point; option C and D represent low levels of this "
           "trait, scoring 0 points.\n";
    out << "(3) Style: The language should be fluent, conform to linguistic "
           "norms and grammar rules, and align with psychological paradigms.\n";
    out << "5. Examples:\n";
    prompt_detail::render_examples(out, spec);
    out << "6. " << spec.cot_instruction << "\n";
    out << spec.emotional_stimulus << "\n";
    out << "Based on the above, please continue generating up to Scenario "
        << spec.target_scenario_count
        << " to measure the level of the above trait.\n";
    return out.str();
  }

  // v2: persona integrated with the task objective, explicit constraints
  // block, behavior descriptions dropped
  out << spec.trait_definition << "\n";
  out << "The specific requirements are as follows:\n";
  out << "1. Role and Task Objective: Please act as a psychometrics expert, "
         "focusing on designing scenarios that reflect the level of "
      << prompt_detail::trait_tag(spec)
      << ", making them applicable to everyday life or common workplace "
         "environments.\n";
  out << "2. Constraints:\n";
  out << "(1) The scenario descriptions must be detailed, diverse, and "
         "closely related to "
      << prompt_detail::trait_tag(spec) << ".\n";
  out << "(2) The scenarios should end with the question \""
      << spec.question_sentinel << "\"\n";
  out << "(3) Each scenario should provide four options, which should be "
         "realistic and contextually relevant. Two options should reflect a "
         "high level of the trait (scoring 1), and two should reflect a low "
         "level of the trait (scoring 0).\n";
  out << "(4) The language should be fluent, conform to linguistic norms and "
         "grammar rules, and align with psychological paradigms.\n";
  out << "3. Examples:\n";
  prompt_detail::render_examples(out, spec);
  out << "4. " << spec.cot_instruction << "\n";
  out << spec.emotional_stimulus << "\n";
  out << task << "\n";
  return out.str();
}

struct AuditReport {
  std::map<int, bool> detected;
  std::set<int> expected;
  bool pass = false;
  std::set<int> missing;
};

/// Structural marker detection for each strategy in an assembled prompt.
inline AuditReport strategy_audit(const std::string& prompt,
                                  const std::set<int>& expected) {
  auto contains = [&](std::string_view needle) {
    return prompt.find(needle) != std::string::npos;
  };

  std::istringstream in(prompt);
  std::string line, first_line, last_line;
  while (std::getline(in, line)) {
    std::string t = parse_detail::trim(line);
    if (t.empty()) continue;
    if (first_line.empty()) first_line = t;
    last_line = t;
  }

  AuditReport report;
  report.expected = expected;
  report.detected[1] =
      first_line.find("generat") != std::string::npos ||
      first_line.find("generate") != std::string::npos;
  report.detected[2] = contains("Output Requirements") ||
                       contains("Measurement Dimension") ||
                       contains("Constraints");
  // numbered subtask breakdown: at least steps 1.-3. present
  report.detected[3] = contains("\n1.") && contains("\n2.") && contains("\n3.") &&
                       (contains("Specifically") ||
                        contains("specific requirements"));
  report.detected[4] = contains("Let's think");
  report.detected[5] = contains("Scenario 1") && contains("Scoring");
  report.detected[6] = contains("Constraints");
  report.detected[7] = contains("act as a");
  report.detected[8] = contains("###");
  report.detected[9] = contains("important to my research") ||
                       contains("important for my job");

  report.pass = true;
  for (int id : expected) {
    if (!report.detected[id]) {
      report.missing.insert(id);
      report.pass = false;
    }
  }
  return report;
}

/// Bundled English worked example (the movie-theater scenario layout every
/// prompt version demonstrates).
inline SjtItem example_item_movie_theater() {
  SjtItem item;
  item.item_id = "self_consciousness-example";
  item.facet = Facet::self_consciousness;
  item.scenario =
      "You are seated in the middle of one of the rows of a nearly full movie "
      "theater. Shortly after the movie starts, you realize you've entered "
      "the wrong screening room and are sitting in the wrong one. "
      "What would you do?";
  item.options = {
      {'A',
       "I wouldn't switch screening rooms because asking half the row to "
       "stand up during the movie would make me feel uncomfortable."},
      {'B',
       "I would stay until the movie ends because I'd feel embarrassed if "
       "others saw me leaving during the screening."},
      {'C', "I would get up and go to the correct screening room."},
      {'D',
       "I would watch the beginning of the movie and then decide whether to "
       "switch to the correct screening room."}};
  item.scoring_key = {{'A', 1}, {'B', 1}, {'C', 0}, {'D', 0}};
  item.provenance.source = ItemSource::fixture;
  return item;
}

/// Default trait definitions used when no spec file is supplied.
inline std::string default_trait_definition(Facet f) {
  switch (f) {
    case Facet::self_consciousness:
      return "This facet measures an individual's tendency to feel shy, "
             "embarrassed, and sensitive to others' viewpoints. Higher scores "
             "typically indicate greater self-awareness and potential "
             "sensitivity to negative emotions based on self-perception and "
             "how they believe others perceive them.";
    case Facet::gregariousness:
      return "This facet measures an individual's preference for the company "
             "of others and enjoyment of social gatherings. Higher scores "
             "indicate a stronger tendency to seek out and enjoy crowds and "
             "group activities.";
    case Facet::openness_to_ideas:
      return "This facet measures intellectual curiosity and willingness to "
             "consider new and unconventional ideas. Higher scores indicate "
             "enjoyment of philosophical discussion and novel perspectives.";
    case Facet::compliance:
      return "This facet measures an individual's characteristic response to "
             "interpersonal conflict. Higher scores indicate a tendency to "
             "defer to others, inhibit aggression, and forgive.";
    case Facet::self_discipline:
      return "This facet measures the ability to begin tasks and carry them "
             "through to completion despite boredom or distractions. Higher "
             "scores indicate persistence and self-motivation.";
  }
  return "";
}

inline PromptSpec default_prompt_spec(PromptVersion version, Facet facet) {
  PromptSpec spec;
  spec.version = version;
  spec.trait = facet;
  spec.trait_definition = default_trait_definition(facet);
  spec.behavior_descriptions = {
      "When interacting with others, I often worry about making mistakes.",
      "When I am with a group, I am always aware of my presence.",
      "When people make fun of me or joke about me, I feel embarrassed."};
  spec.examples = {example_item_movie_theater()};
  return spec;
}

// ---- spec file (JSON) ----

inline nlohmann::ordered_json prompt_spec_to_json(const PromptSpec& spec) {
  nlohmann::ordered_json j;
  j["version"] = prompt_version_id(spec.version);
  j["trait"] = facet_id(spec.trait);
  j["trait_label"] = spec.trait_label;
  j["trait_definition"] = spec.trait_definition;
  j["behavior_descriptions"] = spec.behavior_descriptions;
  auto& ex = j["examples"] = nlohmann::ordered_json::array();
  for (const auto& item : spec.examples) ex.push_back(item_to_json(item));
  j["target_scenario_count"] = spec.target_scenario_count;
  j["delimiter"] = spec.delimiter;
  j["emotional_stimulus"] = spec.emotional_stimulus;
  j["cot_instruction"] = spec.cot_instruction;
  j["question_sentinel"] = spec.question_sentinel;
  return j;
}

inline PromptSpec prompt_spec_from_json(const nlohmann::json& j) {
  PromptSpec spec;
  auto version = prompt_version_from_id(j.at("version").get<std::string>());
  if (!version) throw SpecError("unknown prompt version");
  spec.version = *version;
  auto facet = facet_from_id(j.at("trait").get<std::string>());
  if (!facet) throw SpecError("unknown trait facet");
  spec.trait = *facet;
  spec.trait_label = j.value("trait_label", "");
  spec.trait_definition = j.value("trait_definition", "");
  if (j.contains("behavior_descriptions"))
    spec.behavior_descriptions =
        j["behavior_descriptions"].get<std::vector<std::string>>();
  if (j.contains("examples"))
    for (const auto& e : j["examples"]) spec.examples.push_back(item_from_json(e));
  spec.target_scenario_count = j.value("target_scenario_count", 9);
  spec.delimiter = j.value("delimiter", "###");
  if (j.contains("emotional_stimulus"))
    spec.emotional_stimulus = j["emotional_stimulus"].get<std::string>();
  if (j.contains("cot_instruction"))
    spec.cot_instruction = j["cot_instruction"].get<std::string>();
  spec.question_sentinel = j.value("question_sentinel",
                                   std::string(default_question_sentinel));
  return spec;
}

}  // namespace sjtforge
