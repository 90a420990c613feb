#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace sjtforge {

struct InvalidChoice : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompleteResponse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BankFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct JoinError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The five measured facets, one per Big Five factor.
enum class Facet {
  self_consciousness,
  gregariousness,
  openness_to_ideas,
  compliance,
  self_discipline,
};

inline constexpr std::array<Facet, 5> all_facets = {
    Facet::self_consciousness, Facet::gregariousness, Facet::openness_to_ideas,
    Facet::compliance, Facet::self_discipline};

inline const char* facet_id(Facet f) {
  switch (f) {
    case Facet::self_consciousness: return "self_consciousness";
    case Facet::gregariousness: return "gregariousness";
    case Facet::openness_to_ideas: return "openness_to_ideas";
    case Facet::compliance: return "compliance";
    case Facet::self_discipline: return "self_discipline";
  }
  return "?";
}

inline const char* parent_factor(Facet f) {
  switch (f) {
    case Facet::self_consciousness: return "neuroticism";
    case Facet::gregariousness: return "extraversion";
    case Facet::openness_to_ideas: return "openness_to_experience";
    case Facet::compliance: return "agreeableness";
    case Facet::self_discipline: return "conscientiousness";
  }
  return "?";
}

inline std::optional<Facet> facet_from_id(const std::string& id) {
  for (Facet f : all_facets)
    if (id == facet_id(f)) return f;
  return std::nullopt;
}

inline constexpr const char* default_question_sentinel = "What would you do?";

struct Option {
  char label = '?';  // 'A'..'D'
  std::string text;

  bool operator==(const Option&) const = default;
};

enum class ItemSource { llm_generated, manual, fixture };

inline const char* item_source_id(ItemSource s) {
  switch (s) {
    case ItemSource::llm_generated: return "llm_generated";
    case ItemSource::manual: return "manual";
    case ItemSource::fixture: return "fixture";
  }
  return "?";
}

struct Provenance {
  ItemSource source = ItemSource::fixture;
  std::string prompt_version;  // empty unless llm_generated
  double temperature = 0.0;
  std::string timestamp;  // ISO-8601; empty for deterministic runs

  bool operator==(const Provenance&) const = default;
};

/// One scenario with four labelled options and a binary scoring key.
struct SjtItem {
  std::string item_id;
  Facet facet = Facet::self_consciousness;
  std::string scenario;
  std::vector<Option> options;          // ordered, labels A-D when valid
  std::map<char, int> scoring_key;      // label -> 0/1
  Provenance provenance;

  bool operator==(const SjtItem&) const = default;
};

struct Violation {
  std::string code;
  std::string detail;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Structural checks; never throws, reports every violated invariant.
inline ValidationResult validate_item(
    const SjtItem& item,
    const std::string& question_sentinel = default_question_sentinel) {
  ValidationResult r;
  auto add = [&r](const char* code, std::string detail) {
    r.violations.push_back({code, std::move(detail)});
  };

  if (item.options.size() != 4)
    add("OPTION_COUNT",
        "expected 4 options, got " + std::to_string(item.options.size()));

  std::map<char, int> label_count;
  for (const auto& opt : item.options) {
    if (opt.label < 'A' || opt.label > 'D')
      add("BAD_LABEL", std::string("option label '") + opt.label + "'");
    else
      ++label_count[opt.label];
    if (opt.text.empty())
      add("EMPTY_OPTION", std::string("option ") + opt.label + " has no text");
  }
  for (const auto& [label, n] : label_count)
    if (n > 1) add("DUPLICATE_LABEL", std::string(1, label));

  int ones = 0, covered = 0;
  for (const auto& [label, score] : item.scoring_key) {
    if (label < 'A' || label > 'D') {
      add("BAD_LABEL", std::string("scoring key label '") + label + "'");
      continue;
    }
    ++covered;
    if (score != 0 && score != 1)
      add("BAD_LABEL",
          std::string("score for ") + label + " outside {0,1}");
    else if (score == 1)
      ++ones;
  }
  if (covered != 4)
    add("SCORING_KEY_MISMATCH",
        "scoring key covers " + std::to_string(covered) + " labels");
  else if (ones != 2)
    add("SCORING_NOT_2_2", std::to_string(ones) + " options scored 1");

  if (item.scenario.empty())
    add("EMPTY_SCENARIO", "scenario text missing");
  else if (!question_sentinel.empty() &&
           !item.scenario.ends_with(question_sentinel))
    add("NO_QUESTION_SENTINEL",
        "scenario does not end with \"" + question_sentinel + "\"");

  return r;
}

/// Key lookup for one answered option.
inline int score_choice(const SjtItem& item, char choice) {
  auto it = item.scoring_key.find(choice);
  if (it == item.scoring_key.end())
    throw InvalidChoice(std::string("no option labelled '") + choice +
                        "' on item " + item.item_id);
  return it->second;
}

struct ItemBank {
  std::string bank_id;
  std::vector<SjtItem> items;
  std::map<Facet, std::vector<std::string>> facet_layout;

  bool operator==(const ItemBank&) const = default;

  const SjtItem* find(const std::string& item_id) const {
    for (const auto& it : items)
      if (it.item_id == item_id) return &it;
    return nullptr;
  }

  std::vector<const SjtItem*> facet_items(Facet f) const {
    std::vector<const SjtItem*> out;
    auto layout = facet_layout.find(f);
    if (layout != facet_layout.end()) {
      for (const auto& id : layout->second) {
        const SjtItem* item = find(id);
        if (!item) throw BankFormatError("layout id not in bank: " + id);
        out.push_back(item);
      }
      return out;
    }
    for (const auto& it : items)
      if (it.facet == f) out.push_back(&it);
    return out;
  }
};

/// Sum of per-item scores over one facet; requires a complete choice map.
inline int facet_score(const ItemBank& bank, Facet facet,
                       const std::map<std::string, char>& choices) {
  int total = 0;
  for (const SjtItem* item : bank.facet_items(facet)) {
    auto choice = choices.find(item->item_id);
    if (choice == choices.end())
      throw IncompleteResponse("no choice for item " + item->item_id);
    total += score_choice(*item, choice->second);
  }
  return total;
}

// ---- canonical JSON bank format (schema_version 1) ----

inline nlohmann::ordered_json item_to_json(const SjtItem& item) {
  nlohmann::ordered_json j;
  j["item_id"] = item.item_id;
  j["facet"] = facet_id(item.facet);
  j["scenario"] = item.scenario;
  auto& opts = j["options"] = nlohmann::ordered_json::array();
  for (const auto& o : item.options)
    opts.push_back({{"label", std::string(1, o.label)}, {"text", o.text}});
  auto& key = j["scoring_key"] = nlohmann::ordered_json::object();
  for (const auto& [label, score] : item.scoring_key)
    key[std::string(1, label)] = score;
  j["provenance"] = {{"source", item_source_id(item.provenance.source)},
                     {"prompt_version", item.provenance.prompt_version},
                     {"temperature", item.provenance.temperature},
                     {"timestamp", item.provenance.timestamp}};
  return j;
}

inline SjtItem item_from_json(const nlohmann::json& j) {
  SjtItem item;
  item.item_id = j.at("item_id").get<std::string>();
  auto facet = facet_from_id(j.at("facet").get<std::string>());
  if (!facet) throw BankFormatError("unknown facet: " + j.at("facet").dump());
  item.facet = *facet;
  item.scenario = j.at("scenario").get<std::string>();
  for (const auto& o : j.at("options")) {
    std::string label = o.at("label").get<std::string>();
    if (label.size() != 1) throw BankFormatError("bad option label " + label);
    item.options.push_back({label[0], o.at("text").get<std::string>()});
  }
  for (const auto& [label, score] : j.at("scoring_key").items()) {
    if (label.size() != 1) throw BankFormatError("bad key label " + label);
    item.scoring_key[label[0]] = score.get<int>();
  }
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    std::string src = p.value("source", "fixture");
    if (src == "llm_generated") item.provenance.source = ItemSource::llm_generated;
    else if (src == "manual") item.provenance.source = ItemSource::manual;
    else item.provenance.source = ItemSource::fixture;
    item.provenance.prompt_version = p.value("prompt_version", "");
    item.provenance.temperature = p.value("temperature", 0.0);
    item.provenance.timestamp = p.value("timestamp", "");
  }
  return item;
}

inline nlohmann::ordered_json bank_to_json(const ItemBank& bank) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["bank_id"] = bank.bank_id;
  auto& items = j["items"] = nlohmann::ordered_json::array();
  for (const auto& it : bank.items) items.push_back(item_to_json(it));
  auto& layout = j["facet_layout"] = nlohmann::ordered_json::object();
  for (const auto& [facet, ids] : bank.facet_layout) layout[facet_id(facet)] = ids;
  return j;
}

inline ItemBank bank_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1)
    throw BankFormatError("unsupported schema_version");
  ItemBank bank;
  bank.bank_id = j.at("bank_id").get<std::string>();
  for (const auto& it : j.at("items")) bank.items.push_back(item_from_json(it));

  std::vector<std::string> seen;
  for (const auto& it : bank.items) seen.push_back(it.item_id);
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw BankFormatError("duplicate item_id in bank");

  if (j.contains("facet_layout")) {
    for (const auto& [fid, ids] : j["facet_layout"].items()) {
      auto facet = facet_from_id(fid);
      if (!facet) throw BankFormatError("unknown facet in layout: " + fid);
      auto& slot = bank.facet_layout[*facet];
      for (const auto& id : ids) {
        std::string s = id.get<std::string>();
        if (!bank.find(s)) throw BankFormatError("layout id not in bank: " + s);
        slot.push_back(s);
      }
    }
  }
  return bank;
}

inline std::string serialize_bank(const ItemBank& bank) {
  return bank_to_json(bank).dump(2) + "\n";
}

inline ItemBank parse_bank(const std::string& text) {
  return bank_from_json(nlohmann::json::parse(text));
}

}  // namespace sjtforge
