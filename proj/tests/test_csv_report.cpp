#include <doctest.h>

#include "sjtforge/csv.hpp"
#include "sjtforge/report.hpp"
#include "sjtforge/respondent_sim.hpp"

using namespace sjtforge;

TEST_CASE("csv parse and write round-trip with quoting") {
  csv::Table t;
  t.header = {"a", "b"};
  t.rows = {{"plain", "with,comma"}, {"with \"quote\"", "line"}};
  auto text = csv::write(t);
  auto back = csv::parse_string(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.at(0, "b") == "with,comma");
  CHECK_THROWS_AS(t.column("missing"), csv::CsvError);
  CHECK_THROWS_AS(csv::parse_string("a,b\n1,2,3\n"), csv::CsvError);
  CHECK_THROWS_AS(csv::read_file("/nonexistent/file.csv"), csv::CsvError);
}

TEST_CASE("fixed-point formatting") {
  CHECK(report::fixed(0.5255, 2) == "0.53");
  CHECK(report::fixed(12.4, 2) == "12.40");
  CHECK(report::fixed(0.0291, 3) == "0.029");
}

TEST_CASE("group comparison report carries the table skeleton") {
  auto fx = simulate_expert_ratings({{"G1", QualityProfile::high()},
                                     {"G2", QualityProfile::mid()},
                                     {"G3", QualityProfile::low()}},
                                    8, 10, 21);
  auto agg = aggregate_ratings(fx.ratings, fx.group_map);
  auto rep = compare_groups(agg.summaries);
  auto md = report::study1_markdown(rep);
  for (const char* needle :
       {"Chi-Square", "df", "Asymptotic significance value p", "Mean ranks",
        "Necessity of the situation", "Rationality of options",
        "Rationality of scoring", "Overall item quality", "Boxplot data",
        "G1", "G2", "G3"})
    CHECK(md.find(needle) != std::string::npos);

  auto table = report::study1_csv(rep);
  CHECK(table.header.size() == 5);
  CHECK(table.rows.size() == 6);  // 3 mean-rank rows + chi/df/p
  CHECK(table.rows[3][0] == "Chi-Square");
}

TEST_CASE("stability report mirrors the two-group layout") {
  auto fx = simulate_expert_ratings({{"R1", QualityProfile::high()},
                                     {"R2", QualityProfile::high()}},
                                    8, 7, 22);
  auto agg = aggregate_ratings(fx.ratings, fx.group_map);
  std::vector<ItemCvSummary> a, b;
  for (const auto& s : agg.summaries)
    (s.group_label == "R1" ? a : b).push_back(s);
  auto md = report::stability_markdown(compare_two(a, b));
  for (const char* needle :
       {"Mann-Whitney U", "Standardized test statistic z",
        "Exact significance value p", "R1", "R2"})
    CHECK(md.find(needle) != std::string::npos);
}

TEST_CASE("reliability and correlation reports render") {
  ReliabilityReport rel;
  FacetReliability fr;
  fr.cronbach_alpha = 0.75;
  fr.guttman_split_half = 0.7;
  fr.icc_2_1 = 0.8;
  fr.item_total["x-1"] = {0.4, 0.5, true};
  rel[Facet::gregariousness] = fr;
  auto md = report::reliability_markdown(rel);
  CHECK(md.find("Cronbach's alpha") != std::string::npos);
  CHECK(md.find("0.75") != std::string::npos);
  CHECK(md.find("ICC(2,1)") != std::string::npos);
  CHECK(md.find("gregariousness") != std::string::npos);

  auto t = correlation_table_from_lower_triangle({"v1", "v2", "v3", "v4"},
                                                 {0.5, 0.2, 0.3, 0.9, 0.1, 0.4},
                                                 2);
  auto mtmm_md = report::mtmm_markdown(t);
  CHECK(mtmm_md.find("**") != std::string::npos);  // convergent cells in bold
  CHECK(mtmm_md.find("p < .001") != std::string::npos);

  CriterionTable ct;
  ct.facet_names = {"gregariousness"};
  ct.criterion_names = {"SWB"};
  ct.cells = {{stats::Correlation{-0.23, -2.1, 0.004}}};
  auto crit_md = report::criterion_markdown(ct);
  CHECK(crit_md.find("-0.23**") != std::string::npos);
  CHECK(crit_md.find("SWB") != std::string::npos);
}
