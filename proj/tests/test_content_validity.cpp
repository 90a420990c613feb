#include <doctest.h>

#include "sjtforge/content_validity.hpp"
#include "sjtforge/respondent_sim.hpp"

using namespace sjtforge;

namespace {

std::vector<ExpertRating> grid_ratings(const std::string& item_id, int n_raters,
                                       int necessity, int opt, int sc, int ov) {
  std::vector<ExpertRating> out;
  for (int r = 0; r < n_raters; ++r)
    out.push_back({"rater" + std::to_string(r + 1), item_id, necessity, opt,
                   sc, ov});
  return out;
}

}  // namespace

TEST_CASE("cvr is exact on the eight-expert panel") {
  CHECK(cvr(8, 8) == 1.0);
  CHECK(cvr(7, 8) == 0.75);
  CHECK(cvr(6, 8) == 0.5);
  CHECK(cvr(4, 8) == 0.0);
  CHECK(cvr(0, 8) == -1.0);
  CHECK(cvr(5, 10) == 0.0);
  CHECK_THROWS_AS(cvr(9, 8), stats::ParamError);
  CHECK_THROWS_AS(cvr(-1, 8), stats::ParamError);
  CHECK_THROWS_AS(cvr(0, 0), stats::ParamError);
}

TEST_CASE("lawshe gate at the eight-expert critical value") {
  CHECK(lawshe_gate(0.75));
  CHECK(lawshe_gate(1.0));
  CHECK(!lawshe_gate(0.7499));
  CHECK(!lawshe_gate(0.5));
}

TEST_CASE("rating domain checks") {
  ExpertRating r{"r1", "i1", 1, 4, 4, 1};
  CHECK_NOTHROW(check_rating(r));
  r.necessity = 0;
  CHECK_THROWS_AS(check_rating(r), stats::DataError);
  r.necessity = 1;
  r.options_rationality = 5;
  CHECK_THROWS_AS(check_rating(r), stats::DataError);
  r.options_rationality = 4;
  r.overall = 2;
  CHECK_THROWS_AS(check_rating(r), stats::DataError);
}

TEST_CASE("aggregation computes per-item indicator values") {
  std::vector<ExpertRating> ratings;
  // 7 of 8 mark the situation necessary
  for (int r = 0; r < 8; ++r)
    ratings.push_back({"rater" + std::to_string(r + 1), "i1", r < 7 ? 1 : 2,
                       4, 3, r < 6 ? 1 : 0});
  auto out = aggregate_ratings(ratings, {{"i1", "G"}});
  REQUIRE(out.summaries.size() == 1);
  const auto& s = out.summaries[0];
  CHECK(s.cvr == 0.75);
  CHECK(s.mean_options_rationality == doctest::Approx(4.0));
  CHECK(s.mean_scoring_rationality == doctest::Approx(3.0));
  CHECK(s.overall_sum == 6);
  CHECK(s.rater_count == 8);
  CHECK(out.warnings.empty());
  CHECK(indicator_value(s, 0) == 0.75);
  CHECK(indicator_value(s, 3) == 6.0);
  CHECK_THROWS_AS(indicator_value(s, 4), stats::ParamError);
}

TEST_CASE("aggregation join and duplicate guards") {
  auto ratings = grid_ratings("i1", 8, 1, 4, 4, 1);
  CHECK_THROWS_AS(aggregate_ratings(ratings, {}), JoinError);
  CHECK_THROWS_AS(aggregate_ratings(ratings, {{"i1", "G"}, {"ghost", "G"}}),
                  JoinError);
  ratings.push_back(ratings.front());  // duplicate rater/item pair
  CHECK_THROWS_AS(aggregate_ratings(ratings, {{"i1", "G"}}), stats::DataError);
}

TEST_CASE("incomplete rater grid warns but still aggregates") {
  auto ratings = grid_ratings("i1", 8, 1, 4, 4, 1);
  auto partial = grid_ratings("i2", 5, 2, 2, 2, 0);
  ratings.insert(ratings.end(), partial.begin(), partial.end());
  auto out = aggregate_ratings(ratings, {{"i1", "G"}, {"i2", "G"}});
  CHECK(out.summaries.size() == 2);
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("i2") != std::string::npos);
}

TEST_CASE("compare_groups separates distinct quality profiles") {
  auto fx = simulate_expert_ratings({{"Strong", QualityProfile::high()},
                                     {"Middle", QualityProfile::mid()},
                                     {"Weak", QualityProfile::low()}},
                                    8, 12, 99);
  auto agg = aggregate_ratings(fx.ratings, fx.group_map);
  auto report = compare_groups(agg.summaries);
  REQUIRE(report.indicators.size() == 4);
  // summaries arrive in item-id order, so labels appear alphabetically
  CHECK(report.group_order ==
        std::vector<std::string>{"Middle", "Strong", "Weak"});
  for (const auto& ind : report.indicators) {
    CHECK(ind.omnibus.df == 2);
    CHECK(ind.boxplots.size() == 3);
    if (ind.omnibus.p_value < 0.05) {
      CHECK(ind.posthoc.size() == 3);
    } else {
      CHECK(ind.posthoc.empty());
    }
  }
  // profiles this far apart must separate on at least one indicator
  bool any_significant = false;
  for (const auto& ind : report.indicators)
    any_significant |= ind.omnibus.p_value < 0.05;
  CHECK(any_significant);
}

TEST_CASE("compare_groups needs two groups and two items per group") {
  auto fx = simulate_expert_ratings({{"Only", QualityProfile::mid()}}, 8, 5, 1);
  auto agg = aggregate_ratings(fx.ratings, fx.group_map);
  CHECK_THROWS_AS(compare_groups(agg.summaries), stats::DataError);
}

TEST_CASE("compare_two produces the two-group stability layout") {
  auto fx = simulate_expert_ratings({{"Round1", QualityProfile::high()},
                                     {"Round2", QualityProfile::high()}},
                                    8, 7, 5);
  auto agg = aggregate_ratings(fx.ratings, fx.group_map);
  std::vector<ItemCvSummary> a, b;
  for (const auto& s : agg.summaries)
    (s.group_label == "Round1" ? a : b).push_back(s);
  auto report = compare_two(a, b);
  CHECK(report.label_a == "Round1");
  CHECK(report.label_b == "Round2");
  REQUIRE(report.indicators.size() == 4);
  for (const auto& ind : report.indicators) {
    CHECK(ind.test.method_tag == "mann_whitney_u_exact");  // N = 14
    CHECK(ind.test.mean_ranks[0].first == "Round1");
    CHECK(ind.test.p_value >= 0.0);
    CHECK(ind.test.p_value <= 1.0);
    // identical profiles should not separate
    CHECK(ind.test.p_value > 0.01);
  }
  CHECK_THROWS_AS(compare_two({}, b), stats::DataError);
}

TEST_CASE("ratings CSV round-trip") {
  std::string csv_text =
      "rater_id,item_id,necessity,options_rationality,scoring_rationality,"
      "overall\n"
      "r1,i1,1,4,3,1\n"
      "r2,i1,2,3,2,0\n";
  auto ratings = ratings_from_csv(csv::parse_string(csv_text));
  REQUIRE(ratings.size() == 2);
  CHECK(ratings[0].rater_id == "r1");
  CHECK(ratings[1].necessity == 2);
  CHECK(ratings[1].overall == 0);

  auto groups = group_map_from_csv(
      csv::parse_string("item_id,group_label\ni1,MG2\ni2,Temp1.0\n"));
  CHECK(groups.at("i1") == "MG2");
  CHECK(groups.at("i2") == "Temp1.0");
}
