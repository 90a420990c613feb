#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "item_model.hpp"

namespace sjtforge {

struct ParseIssue {
  int scenario_index = 0;  // 1-based block position
  std::string code;        // NO_SCENARIO_HEADER | OPTION_COUNT | MISSING_SCORING
                           // | SCORING_NOT_2_2 | BAD_LABEL | NO_QUESTION_SENTINEL
                           // | EMPTY_OPTION
  std::string excerpt;     // offending slice of the input
};

struct ParseOptions {
  // scenarios may end with any of these
  std::vector<std::string> question_sentinels = {"What would you do?",
                                                 "你会怎么做？", "你会怎么做?"};
};

namespace parse_detail {

// Full-width punctuation and digits normalized to ASCII before matching.
// GPT output mixes widths freely in bilingual prompts.
inline std::string normalize(std::string_view in) {
  static const std::vector<std::pair<std::string_view, std::string_view>> map = {
      {"：", ":"}, {"；", ";"}, {"，", ","}, {"。", "."}, {"．", "."},
      {"　", " "}, {"０", "0"}, {"１", "1"}, {"２", "2"}, {"３", "3"},
      {"４", "4"}, {"５", "5"}, {"６", "6"}, {"７", "7"}, {"８", "8"},
      {"９", "9"}, {"Ａ", "A"}, {"Ｂ", "B"}, {"Ｃ", "C"}, {"Ｄ", "D"},
  };
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    bool replaced = false;
    for (const auto& [from, to] : map) {
      if (in.compare(i, from.size(), from) == 0) {
        out += to;
        i += from.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out += in[i++];
  }
  return out;
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool chinese_numeral(std::string_view s, size_t& len) {
  static const std::vector<std::string_view> numerals = {
      "十一", "十二", "一", "二", "三", "四", "五",
      "六",   "七",   "八", "九", "十"};
  for (auto n : numerals) {
    if (s.compare(0, n.size(), n) == 0) {
      len = n.size();
      return true;
    }
  }
  return false;
}

/// "Scenario 3:" / "情境三：" (input already width-normalized)
inline bool is_scenario_header(const std::string& line, std::string* rest) {
  std::string t = trim(line);
  size_t pos = std::string::npos, skip = 0;
  if (t.rfind("Scenario", 0) == 0) {
    pos = 8;
  } else if (t.rfind("情境", 0) == 0) {
    pos = std::string_view("情境").size();
  } else {
    return false;
  }
  while (pos < t.size() && t[pos] == ' ') ++pos;
  size_t digits = 0;
  while (pos + digits < t.size() &&
         std::isdigit(static_cast<unsigned char>(t[pos + digits])))
    ++digits;
  if (digits == 0) {
    if (!chinese_numeral(std::string_view(t).substr(pos), skip)) return false;
    digits = skip;
  }
  pos += digits;
  while (pos < t.size() && t[pos] == ' ') ++pos;
  if (pos >= t.size() || t[pos] != ':') return false;
  if (rest) *rest = trim(std::string_view(t).substr(pos + 1));
  return true;
}

inline bool is_delimiter(const std::string& line) {
  std::string t = trim(line);
  return t.size() >= 3 && t.find_first_not_of('#') == std::string::npos;
}

inline std::optional<std::pair<char, std::string>> option_line(
    const std::string& line) {
  std::string t = trim(line);
  if (t.size() < 2) return std::nullopt;
  char label = t[0];
  if (label < 'A' || label > 'D') return std::nullopt;
  char sep = t[1];
  if (sep != '.' && sep != ':' && sep != ')') return std::nullopt;
  return std::make_pair(label, trim(std::string_view(t).substr(2)));
}

inline bool is_scoring_line(const std::string& line) {
  std::string t = trim(line);
  return t.rfind("Scoring", 0) == 0 || t.rfind("计分", 0) == 0 ||
         t.rfind("评分", 0) == 0;
}

}  // namespace parse_detail

struct ScoringLine {
  std::map<char, int> key;               // label -> 0/1
  std::vector<std::string> bad_tokens;   // unparseable or out-of-domain
};

/// Tolerant scoring-line reader: "Scoring: A: 1 point; B: 1 point; ..." or
/// "计分：A: 1 分；B: 1 分；...". Separators, "point(s)"/"分" suffixes and
/// full-width punctuation are all accepted.
inline ScoringLine parse_scoring_line(const std::string& raw_line) {
  std::string line = parse_detail::normalize(raw_line);
  // drop the prefix up to the first ':' following a scoring keyword
  if (parse_detail::is_scoring_line(line)) {
    size_t colon = line.find(':');
    if (colon != std::string::npos) line = line.substr(colon + 1);
  }

  ScoringLine out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == ';' ||
                               line[i] == ',' || line[i] == '.'))
      ++i;
    if (i >= line.size()) break;
    size_t token_start = i;
    char label = line[i];
    if (label < 'A' || label > 'D') {
      // skip to next separator, record the junk
      size_t end = line.find_first_of(";,", i);
      if (end == std::string::npos) end = line.size();
      std::string tok = parse_detail::trim(
          std::string_view(line).substr(token_start, end - token_start));
      if (!tok.empty()) out.bad_tokens.push_back(tok);
      i = end;
      continue;
    }
    ++i;
    while (i < line.size() && (line[i] == ' ' || line[i] == ':')) ++i;
    if (i >= line.size() || !std::isdigit(static_cast<unsigned char>(line[i]))) {
      out.bad_tokens.push_back(std::string(1, label));
      continue;
    }
    size_t dig_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
      ++i;
    int score = std::stoi(line.substr(dig_start, i - dig_start));
    // swallow "point"/"points"/"分"
    while (i < line.size() && line[i] == ' ') ++i;
    if (line.compare(i, 6, "points") == 0) i += 6;
    else if (line.compare(i, 5, "point") == 0) i += 5;
    else if (line.compare(i, std::string_view("分").size(), "分") == 0)
      i += std::string_view("分").size();

    if (score != 0 && score != 1) {
      out.bad_tokens.push_back(std::string(1, label) + ":" +
                               std::to_string(score));
      continue;
    }
    out.key[label] = score;
  }
  return out;
}

struct ParsedCompletion {
  std::vector<SjtItem> items;
  std::vector<ParseIssue> issues;
  int block_count = 0;
};

/// Splits a raw completion into scenario blocks and extracts one item per
/// block. Blocks open at "Scenario N:" / "情境N：" headers; "###" fences are
/// treated as block separators. Trailing rationale prose after the scoring
/// line is ignored.
inline ParsedCompletion parse_items(const std::string& raw, Facet facet,
                                    const ParseOptions& opts = {}) {
  ParsedCompletion result;
  if (parse_detail::trim(raw).empty()) return result;

  std::string text = parse_detail::normalize(raw);
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  struct Block {
    std::vector<std::string> lines;
    bool has_header = false;
  };
  std::vector<Block> blocks;
  Block current;
  bool any_content = false;
  for (const auto& line : lines) {
    if (parse_detail::is_delimiter(line)) {
      if (any_content) blocks.push_back(std::move(current));
      current = {};
      any_content = false;
      continue;
    }
    std::string rest;
    if (parse_detail::is_scenario_header(line, &rest)) {
      if (any_content) blocks.push_back(std::move(current));
      current = {};
      current.has_header = true;
      current.lines.push_back(line);
      any_content = true;
      continue;
    }
    if (!parse_detail::trim(line).empty() || any_content)
      current.lines.push_back(line);
    if (!parse_detail::trim(line).empty()) any_content = true;
  }
  if (any_content) blocks.push_back(std::move(current));

  // Drop preamble blocks that carry no scenario material at all
  std::erase_if(blocks, [](const Block& b) {
    if (b.has_header) return false;
    for (const auto& l : b.lines)
      if (parse_detail::option_line(l) || parse_detail::is_scoring_line(l))
        return false;
    return true;
  });

  result.block_count = int(blocks.size());

  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    const Block& block = blocks[bi];
    const int index = int(bi) + 1;
    std::vector<ParseIssue> issues;
    auto issue = [&](const char* code, std::string excerpt) {
      issues.push_back({index, code, std::move(excerpt)});
    };

    std::string scenario;
    std::vector<Option> options;
    std::optional<ScoringLine> scoring;
    bool saw_header = block.has_header;

    for (const auto& line : block.lines) {
      std::string rest;
      if (parse_detail::is_scenario_header(line, &rest)) {
        scenario = rest;
        continue;
      }
      if (scoring) continue;  // trailing rationale segment, ignored
      if (parse_detail::is_scoring_line(line)) {
        scoring = parse_scoring_line(line);
        continue;
      }
      if (auto opt = parse_detail::option_line(line)) {
        options.push_back({opt->first, opt->second});
        continue;
      }
      std::string t = parse_detail::trim(line);
      if (t.empty()) continue;
      if (options.empty()) {
        // scenario prose may wrap over several lines
        if (!scenario.empty()) scenario += " ";
        scenario += t;
      } else {
        // continuation of the last option's text
        options.back().text += " " + t;
      }
    }

    if (!saw_header) issue("NO_SCENARIO_HEADER", scenario.substr(0, 80));
    if (options.size() != 4)
      issue("OPTION_COUNT", std::to_string(options.size()) + " options");
    for (const auto& o : options)
      if (o.text.empty())
        issue("EMPTY_OPTION", std::string(1, o.label));
    if (!scoring) {
      issue("MISSING_SCORING", scenario.substr(0, 80));
    } else {
      for (const auto& bad : scoring->bad_tokens) issue("BAD_LABEL", bad);
      int ones = 0;
      for (const auto& [_, s] : scoring->key) ones += s;
      if (scoring->key.size() != 4 || ones != 2) {
        std::string summary;
        for (const auto& [l, s] : scoring->key)
          summary += std::string(1, l) + ":" + std::to_string(s) + " ";
        issue("SCORING_NOT_2_2", summary);
      }
    }
    bool sentinel_ok = false;
    for (const auto& s : opts.question_sentinels) {
      if (scenario.ends_with(parse_detail::normalize(s)) ||
          scenario.ends_with(s))
        sentinel_ok = true;
    }
    if (!scenario.empty() && !sentinel_ok)
      issue("NO_QUESTION_SENTINEL",
            scenario.substr(scenario.size() > 40 ? scenario.size() - 40 : 0));

    if (issues.empty()) {
      SjtItem item;
      item.item_id =
          std::string(facet_id(facet)) + "-" + std::to_string(index);
      item.facet = facet;
      item.scenario = scenario;
      item.options = options;
      item.scoring_key = scoring->key;
      item.provenance.source = ItemSource::llm_generated;
      result.items.push_back(std::move(item));
    } else {
      result.issues.insert(result.issues.end(), issues.begin(), issues.end());
    }
  }
  return result;
}

/// Renders an item back to the textual scenario layout parse_items accepts.
inline std::string render_item(const SjtItem& item, int scenario_number) {
  std::ostringstream out;
  out << "Scenario " << scenario_number << ": " << item.scenario << "\n";
  for (const auto& o : item.options) out << o.label << ". " << o.text << "\n";
  out << "Scoring: ";
  bool first = true;
  for (const auto& [label, score] : item.scoring_key) {
    if (!first) out << "; ";
    first = false;
    out << label << ": " << score << (score == 1 ? " point" : " points");
  }
  out << ".\n";
  return out.str();
}

}  // namespace sjtforge
