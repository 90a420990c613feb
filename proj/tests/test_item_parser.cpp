#include <doctest.h>

#include <random>

#include "sjtforge/item_parser.hpp"
#include "sjtforge/prompt_forge.hpp"

using namespace sjtforge;

namespace {

bool has_issue(const ParsedCompletion& p, const std::string& code) {
  for (const auto& i : p.issues)
    if (i.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("parses a clean English completion") {
  std::string text =
      "Scenario 1: Your neighbor plays loud music late at night. "
      "What would you do?\n"
      "A. I would knock on their door and ask them politely to lower it.\n"
      "B. I would mention it gently the next morning.\n"
      "C. I would call the police immediately.\n"
      "D. I would bang on the wall and shout.\n"
      "Scoring: A: 1 point; B: 1 point; C: 0 points; D: 0 points.\n";
  auto r = parse_items(text, Facet::compliance);
  REQUIRE(r.items.size() == 1);
  CHECK(r.issues.empty());
  const auto& item = r.items[0];
  CHECK(item.item_id == "compliance-1");
  CHECK(item.scenario.ends_with("What would you do?"));
  REQUIRE(item.options.size() == 4);
  CHECK(item.options[0].label == 'A');
  CHECK(item.scoring_key == std::map<char, int>{{'A', 1}, {'B', 1}, {'C', 0}, {'D', 0}});
  CHECK(validate_item(item).ok());
}

TEST_CASE("parses a Chinese completion with full-width punctuation") {
  std::string text =
      "情境一：你在一个几乎坐满的电影院里，发现自己走错了放映厅。你会怎么做？\n"
      "Ａ：我不会换放映厅，因为让半排人站起来会让我很不自在。\n"
      "Ｂ：我会一直坐到电影结束，因为中途离场会让我觉得尴尬。\n"
      "Ｃ：我会站起来去正确的放映厅。\n"
      "Ｄ：我会先看一会儿，再决定要不要换。\n"
      "计分：Ａ：１分；Ｂ：１分；Ｃ：０分；Ｄ：０分。\n";
  auto r = parse_items(text, Facet::self_consciousness);
  REQUIRE(r.items.size() == 1);
  CHECK(r.issues.empty());
  CHECK(r.items[0].scenario.ends_with("你会怎么做？"));
  CHECK(r.items[0].scoring_key ==
        std::map<char, int>{{'A', 1}, {'B', 1}, {'C', 0}, {'D', 0}});
}

TEST_CASE("chinese numeral headers up to twelve") {
  for (const auto& [numeral, _] :
       std::vector<std::pair<std::string, int>>{{"一", 1}, {"五", 5},
                                                {"十", 10}, {"十二", 12}}) {
    std::string text = "情境" + numeral +
                       "：某事发生。你会怎么做？\n"
                       "A. 甲\nB. 乙\nC. 丙\nD. 丁\n"
                       "评分：A: 1分; B: 1分; C: 0分; D: 0分\n";
    auto r = parse_items(text, Facet::gregariousness);
    REQUIRE(r.items.size() == 1);
  }
}

TEST_CASE("scoring line tolerance and bad tokens") {
  auto line = parse_scoring_line("Scoring: A: 1 point, B:1 point, C: 0 points, "
                                 "D: 0 points.");
  CHECK(line.key.size() == 4);
  CHECK(line.bad_tokens.empty());

  auto bad = parse_scoring_line("Scoring: A: 2 points; B: 1 point; C: 0; D: 0");
  CHECK(bad.key.size() == 3);
  REQUIRE(bad.bad_tokens.size() == 1);
  CHECK(bad.bad_tokens[0] == "A:2");
}

TEST_CASE("rejects 3-1 scoring splits") {
  std::string text =
      "Scenario 1: Something happens. What would you do?\n"
      "A. one\nB. two\nC. three\nD. four\n"
      "Scoring: A: 1 point; B: 1 point; C: 1 point; D: 0 points.\n";
  auto r = parse_items(text, Facet::compliance);
  CHECK(r.items.empty());
  CHECK(has_issue(r, "SCORING_NOT_2_2"));
}

TEST_CASE("flags missing pieces per block without aborting others") {
  std::string text =
      "Scenario 1: No options here. What would you do?\n"
      "Scoring: A: 1 point; B: 1 point; C: 0 points; D: 0 points.\n"
      "###\n"
      "Scenario 2: Fine block. What would you do?\n"
      "A. a\nB. b\nC. c\nD. d\n"
      "Scoring: A: 1 point; B: 1 point; C: 0 points; D: 0 points.\n"
      "###\n"
      "Scenario 3: Missing scoring. What would you do?\n"
      "A. a\nB. b\nC. c\nD. d\n";
  auto r = parse_items(text, Facet::self_discipline);
  CHECK(r.block_count == 3);
  REQUIRE(r.items.size() == 1);
  CHECK(r.items[0].scenario.rfind("Fine block", 0) == 0);
  CHECK(has_issue(r, "OPTION_COUNT"));
  CHECK(has_issue(r, "MISSING_SCORING"));
}

TEST_CASE("sentinel violations are reported") {
  std::string text =
      "Scenario 1: Something happens with no question.\n"
      "A. a\nB. b\nC. c\nD. d\n"
      "Scoring: A: 1 point; B: 1 point; C: 0 points; D: 0 points.\n";
  auto r = parse_items(text, Facet::compliance);
  CHECK(r.items.empty());
  CHECK(has_issue(r, "NO_QUESTION_SENTINEL"));
}

TEST_CASE("preamble and trailing rationale are ignored") {
  std::string text =
      "Sure! Here are the scenarios you asked for.\n\n"
      "Scenario 1: The block itself. What would you do?\n"
      "A. a\nB. b\nC. c\nD. d\n"
      "Scoring: A: 1 point; B: 1 point; C: 0 points; D: 0 points.\n"
      "Rationale: options A and B reflect the higher trait level.\n";
  auto r = parse_items(text, Facet::openness_to_ideas);
  CHECK(r.block_count == 1);
  REQUIRE(r.items.size() == 1);
  CHECK(r.items[0].options[3].text == "d");
}

TEST_CASE("multi-line scenario prose and option continuations") {
  std::string text =
      "Scenario 1: The first line of the scenario\n"
      "continues on a second line. What would you do?\n"
      "A. an option whose text\n"
      "   wraps onto the next line\n"
      "B. b\nC. c\nD. d\n"
      "Scoring: A: 1 point; B: 1 point; C: 0 points; D: 0 points.\n";
  auto r = parse_items(text, Facet::gregariousness);
  REQUIRE(r.items.size() == 1);
  CHECK(r.items[0].scenario ==
        "The first line of the scenario continues on a second line. "
        "What would you do?");
  CHECK(r.items[0].options[0].text ==
        "an option whose text wraps onto the next line");
}

TEST_CASE("empty input parses to nothing") {
  auto r = parse_items("", Facet::compliance);
  CHECK(r.items.empty());
  CHECK(r.block_count == 0);
}

TEST_CASE("render then parse round-trips item content") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> word(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    SjtItem item = example_item_movie_theater();
    item.facet = all_facets[size_t(trial) % all_facets.size()];
    item.item_id = std::string(facet_id(item.facet)) + "-1";
    item.scenario = "Trial " + std::to_string(trial) +
                    " scenario text with " + std::to_string(word(rng)) +
                    " twists. What would you do?";
    auto rendered = render_item(item, 1);
    auto parsed = parse_items(rendered, item.facet);
    REQUIRE(parsed.items.size() == 1);
    CHECK(parsed.items[0].scenario == item.scenario);
    CHECK(parsed.items[0].options == item.options);
    CHECK(parsed.items[0].scoring_key == item.scoring_key);
  }
}
