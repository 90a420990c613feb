#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csv.hpp"
#include "item_model.hpp"
#include "stats_core.hpp"

namespace sjtforge {

/// One rater's four-indicator judgment of one item.
/// necessity: 1 = necessary and useful, 2 = useful but not necessary,
/// 3 = neither; rationality scales count reasonable / accurately scored
/// options (0..4); overall is a binary suitability call.
struct ExpertRating {
  std::string rater_id;
  std::string item_id;
  int necessity = 1;
  int options_rationality = 0;
  int scoring_rationality = 0;
  int overall = 0;
};

struct ItemCvSummary {
  std::string item_id;
  std::string group_label;
  double cvr = 0.0;
  double mean_options_rationality = 0.0;
  double mean_scoring_rationality = 0.0;
  int overall_sum = 0;
  int rater_count = 0;
};

/// Lawshe's content validity ratio.
inline double cvr(int n_essential, int n_experts) {
  if (n_experts < 1) throw stats::ParamError("cvr: N must be >= 1");
  if (n_essential < 0 || n_essential > n_experts)
    throw stats::ParamError("cvr: n outside [0, N]");
  double half = double(n_experts) / 2.0;
  return (double(n_essential) - half) / half;
}

/// Lawshe criterion for an eight-expert panel.
inline bool lawshe_gate(double cvr_value) { return cvr_value >= 0.75; }

inline void check_rating(const ExpertRating& r) {
  if (r.necessity < 1 || r.necessity > 3)
    throw stats::DataError("necessity outside {1,2,3} for item " + r.item_id);
  if (r.options_rationality < 0 || r.options_rationality > 4)
    throw stats::DataError("options_rationality outside 0..4");
  if (r.scoring_rationality < 0 || r.scoring_rationality > 4)
    throw stats::DataError("scoring_rationality outside 0..4");
  if (r.overall != 0 && r.overall != 1)
    throw stats::DataError("overall outside {0,1}");
}

struct AggregateOutput {
  std::vector<ItemCvSummary> summaries;
  std::vector<std::string> warnings;
};

/// Per-item aggregation: CVR over necessity==1 counts, means over raters for
/// the two rationality indicators, sum for overall. An incomplete rater grid
/// degrades to per-item rater counts with a warning.
inline AggregateOutput aggregate_ratings(
    const std::vector<ExpertRating>& ratings,
    const std::map<std::string, std::string>& group_map) {
  std::map<std::string, std::vector<const ExpertRating*>> by_item;
  std::set<std::string> raters;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : ratings) {
    check_rating(r);
    if (!seen.insert({r.rater_id, r.item_id}).second)
      throw stats::DataError("duplicate rating: " + r.rater_id + "/" + r.item_id);
    by_item[r.item_id].push_back(&r);
    raters.insert(r.rater_id);
  }
  for (const auto& [item_id, _] : group_map)
    if (!by_item.count(item_id))
      throw JoinError("group map names unrated item: " + item_id);

  AggregateOutput out;
  for (const auto& [item_id, rs] : by_item) {
    auto group = group_map.find(item_id);
    if (group == group_map.end())
      throw JoinError("no group label for item: " + item_id);

    ItemCvSummary s;
    s.item_id = item_id;
    s.group_label = group->second;
    s.rater_count = int(rs.size());
    if (rs.size() != raters.size())
      out.warnings.push_back("item " + item_id + " rated by " +
                             std::to_string(rs.size()) + " of " +
                             std::to_string(raters.size()) + " raters");

    int essential = 0;
    double opt_sum = 0.0, sc_sum = 0.0;
    for (const ExpertRating* r : rs) {
      if (r->necessity == 1) ++essential;
      opt_sum += r->options_rationality;
      sc_sum += r->scoring_rationality;
      s.overall_sum += r->overall;
    }
    s.cvr = cvr(essential, int(rs.size()));
    s.mean_options_rationality = opt_sum / double(rs.size());
    s.mean_scoring_rationality = sc_sum / double(rs.size());
    out.summaries.push_back(std::move(s));
  }
  return out;
}

// ---- group comparisons (Study 1 shape) ----

inline constexpr std::array<const char*, 4> cv_indicator_names = {
    "Necessity of the situation", "Rationality of options",
    "Rationality of scoring", "Overall item quality"};

inline double indicator_value(const ItemCvSummary& s, int indicator) {
  switch (indicator) {
    case 0: return s.cvr;
    case 1: return s.mean_options_rationality;
    case 2: return s.mean_scoring_rationality;
    case 3: return double(s.overall_sum);
  }
  throw stats::ParamError("indicator index outside 0..3");
}

struct IndicatorBoxplot {
  std::string group_label;
  stats::BoxplotStats stats;
};

struct IndicatorComparison {
  std::string indicator;
  stats::TestResult omnibus;
  std::vector<stats::PairwiseResult> posthoc;  // only when omnibus p < .05
  std::vector<IndicatorBoxplot> boxplots;
};

struct Study1Report {
  std::vector<IndicatorComparison> indicators;
  std::vector<std::string> group_order;
};

inline stats::GroupedSample group_indicator(
    const std::vector<ItemCvSummary>& summaries,
    const std::vector<std::string>& group_order, int indicator) {
  stats::GroupedSample sample;
  for (const auto& label : group_order) {
    std::vector<double> values;
    for (const auto& s : summaries)
      if (s.group_label == label) values.push_back(indicator_value(s, indicator));
    sample.groups.emplace_back(label, std::move(values));
  }
  return sample;
}

inline std::vector<std::string> group_labels_in_order(
    const std::vector<ItemCvSummary>& summaries) {
  std::vector<std::string> order;
  for (const auto& s : summaries)
    if (std::find(order.begin(), order.end(), s.group_label) == order.end())
      order.push_back(s.group_label);
  return order;
}

/// Kruskal-Wallis per indicator over per-item summary scores; Dunn-Bonferroni
/// pairwise results attached only when the omnibus test is significant.
inline Study1Report compare_groups(const std::vector<ItemCvSummary>& summaries,
                                   double alpha = 0.05) {
  Study1Report report;
  report.group_order = group_labels_in_order(summaries);
  if (report.group_order.size() < 2)
    throw stats::DataError("compare_groups: need >= 2 groups");

  for (int ind = 0; ind < 4; ++ind) {
    IndicatorComparison cmp;
    cmp.indicator = cv_indicator_names[ind];
    stats::GroupedSample sample =
        group_indicator(summaries, report.group_order, ind);
    for (const auto& [label, values] : sample.groups) {
      if (values.size() < 2)
        throw stats::DataError("group " + label + " has < 2 items");
      cmp.boxplots.push_back({label, stats::boxplot_stats(values)});
    }
    cmp.omnibus = stats::kruskal_wallis(sample);
    if (!cmp.omnibus.degenerate && cmp.omnibus.p_value < alpha)
      cmp.posthoc = stats::dunn_posthoc(sample, stats::Adjust::bonferroni);
    report.indicators.push_back(std::move(cmp));
  }
  return report;
}

struct StabilityIndicator {
  std::string indicator;
  stats::TestResult test;  // exact Mann-Whitney (auto mode)
  std::vector<IndicatorBoxplot> boxplots;
};

struct Study1StabilityReport {
  std::string label_a, label_b;
  std::vector<StabilityIndicator> indicators;
};

/// Two-group stability comparison per indicator (Table 4 shape).
inline Study1StabilityReport compare_two(const std::vector<ItemCvSummary>& a,
                                         const std::vector<ItemCvSummary>& b) {
  if (a.empty() || b.empty())
    throw stats::DataError("compare_two: both groups must be non-empty");
  Study1StabilityReport report;
  report.label_a = a.front().group_label;
  report.label_b = b.front().group_label;

  for (int ind = 0; ind < 4; ++ind) {
    StabilityIndicator si;
    si.indicator = cv_indicator_names[ind];
    std::vector<double> va, vb;
    for (const auto& s : a) va.push_back(indicator_value(s, ind));
    for (const auto& s : b) vb.push_back(indicator_value(s, ind));
    si.test = stats::mann_whitney(va, vb, stats::MwMode::auto_select);
    si.test.mean_ranks[0].first = report.label_a;
    si.test.mean_ranks[1].first = report.label_b;
    si.boxplots.push_back({report.label_a, stats::boxplot_stats(va)});
    si.boxplots.push_back({report.label_b, stats::boxplot_stats(vb)});
    report.indicators.push_back(std::move(si));
  }
  return report;
}

// ---- CSV ingestion ----

/// rater_id,item_id,necessity,options_rationality,scoring_rationality,overall
inline std::vector<ExpertRating> ratings_from_csv(const csv::Table& t) {
  std::vector<ExpertRating> out;
  size_t rater = t.column("rater_id"), item = t.column("item_id"),
         nec = t.column("necessity"), opt = t.column("options_rationality"),
         sc = t.column("scoring_rationality"), ov = t.column("overall");
  for (const auto& row : t.rows) {
    ExpertRating r;
    r.rater_id = row[rater];
    r.item_id = row[item];
    r.necessity = std::stoi(row[nec]);
    r.options_rationality = std::stoi(row[opt]);
    r.scoring_rationality = std::stoi(row[sc]);
    r.overall = std::stoi(row[ov]);
    out.push_back(std::move(r));
  }
  return out;
}

/// item_id,group_label
inline std::map<std::string, std::string> group_map_from_csv(const csv::Table& t) {
  std::map<std::string, std::string> out;
  size_t item = t.column("item_id"), group = t.column("group_label");
  for (const auto& row : t.rows) out[row[item]] = row[group];
  return out;
}

}  // namespace sjtforge
