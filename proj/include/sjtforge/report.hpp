#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "content_validity.hpp"
#include "psychometrics.hpp"

namespace sjtforge::report {

struct RenderOptions {
  int stat_decimals = 2;
  int p_decimals = 3;
};

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

inline std::string md_separator(size_t n) {
  std::string out = "|";
  for (size_t i = 0; i < n; ++i) out += " --- |";
  return out + "\n";
}

/// Tables 2/3 shape: mean ranks per group, then Chi-Square / df / p rows,
/// one column per indicator; post hoc and boxplot sections follow.
inline std::string study1_markdown(const Study1Report& r,
                                   const RenderOptions& opts = {}) {
  std::ostringstream out;
  out << "# Content validity group comparison\n\n";

  std::vector<std::string> header = {""};
  for (const auto& ind : r.indicators) header.push_back(ind.indicator);
  out << md_row(header) << md_separator(header.size());

  out << md_row({"*Mean ranks*", "", "", "", ""});
  for (size_t g = 0; g < r.group_order.size(); ++g) {
    std::vector<std::string> row = {r.group_order[g]};
    for (const auto& ind : r.indicators)
      row.push_back(fixed(ind.omnibus.mean_ranks[g].second, opts.stat_decimals));
    out << md_row(row);
  }
  out << md_row({"*Kruskal-Wallis test statistics*", "", "", "", ""});
  std::vector<std::string> chi = {"Chi-Square"}, df = {"df"},
                           p = {"Asymptotic significance value p"};
  for (const auto& ind : r.indicators) {
    chi.push_back(fixed(ind.omnibus.statistic, opts.stat_decimals));
    df.push_back(std::to_string(ind.omnibus.df));
    p.push_back(fixed(ind.omnibus.p_value, opts.p_decimals));
  }
  out << md_row(chi) << md_row(df) << md_row(p);

  for (const auto& ind : r.indicators) {
    if (ind.posthoc.empty()) continue;
    out << "\n## Dunn's post hoc (Bonferroni): " << ind.indicator << "\n\n";
    out << md_row({"Comparison", "z", "p raw", "p adj"}) << md_separator(4);
    for (const auto& pw : ind.posthoc)
      out << md_row({pw.group_a + " vs " + pw.group_b,
                     fixed(pw.z, opts.stat_decimals),
                     fixed(pw.p_raw, opts.p_decimals),
                     fixed(pw.p_adj, opts.p_decimals)});
  }

  out << "\n## Boxplot data\n\n";
  out << md_row({"Indicator", "Group", "Min", "Q1", "Median", "Q3", "Max"})
      << md_separator(7);
  for (const auto& ind : r.indicators)
    for (const auto& bp : ind.boxplots)
      out << md_row({ind.indicator, bp.group_label,
                     fixed(bp.stats.min, opts.stat_decimals),
                     fixed(bp.stats.q1, opts.stat_decimals),
                     fixed(bp.stats.median, opts.stat_decimals),
                     fixed(bp.stats.q3, opts.stat_decimals),
                     fixed(bp.stats.max, opts.stat_decimals)});
  return out.str();
}

inline csv::Table study1_csv(const Study1Report& r, const RenderOptions& opts = {}) {
  csv::Table t;
  t.header = {"row"};
  for (const auto& ind : r.indicators) t.header.push_back(ind.indicator);
  for (size_t g = 0; g < r.group_order.size(); ++g) {
    std::vector<std::string> row = {"mean_rank:" + r.group_order[g]};
    for (const auto& ind : r.indicators)
      row.push_back(fixed(ind.omnibus.mean_ranks[g].second, opts.stat_decimals));
    t.rows.push_back(row);
  }
  std::vector<std::string> chi = {"Chi-Square"}, df = {"df"},
                           p = {"Asymptotic significance value p"};
  for (const auto& ind : r.indicators) {
    chi.push_back(fixed(ind.omnibus.statistic, opts.stat_decimals));
    df.push_back(std::to_string(ind.omnibus.df));
    p.push_back(fixed(ind.omnibus.p_value, opts.p_decimals));
  }
  t.rows.push_back(chi);
  t.rows.push_back(df);
  t.rows.push_back(p);
  return t;
}

/// Table 4 shape.
inline std::string stability_markdown(const Study1StabilityReport& r,
                                      const RenderOptions& opts = {}) {
  std::ostringstream out;
  out << "# Content validity stability comparison\n\n";
  std::vector<std::string> header = {""};
  for (const auto& ind : r.indicators) header.push_back(ind.indicator);
  out << md_row(header) << md_separator(header.size());

  out << md_row({"*Mean ranks*", "", "", "", ""});
  for (int g = 0; g < 2; ++g) {
    std::vector<std::string> row = {g == 0 ? r.label_a : r.label_b};
    for (const auto& ind : r.indicators)
      row.push_back(fixed(ind.test.mean_ranks[g].second, opts.stat_decimals));
    out << md_row(row);
  }
  out << md_row({"*Mann-Whitney test statistics*", "", "", "", ""});
  std::vector<std::string> u = {"Mann-Whitney U"},
                           z = {"Standardized test statistic z"},
                           p = {"Exact significance value p"};
  for (const auto& ind : r.indicators) {
    u.push_back(fixed(ind.test.statistic, opts.stat_decimals));
    z.push_back(fixed(ind.test.z, opts.stat_decimals));
    p.push_back(fixed(ind.test.p_value, opts.p_decimals));
  }
  out << md_row(u) << md_row(z) << md_row(p);
  return out.str();
}

/// Table 5 shape.
inline std::string reliability_markdown(const ReliabilityReport& r,
                                        const RenderOptions& opts = {}) {
  std::ostringstream out;
  out << "# Reliability\n\n";
  out << md_row({"Facet", "Cronbach's alpha", "Guttman's coefficient",
                 "ICC(2,1)", "ICC(3,1)"})
      << md_separator(5);
  for (const auto& [facet, rel] : r) {
    out << md_row(
        {facet_id(facet), fixed(rel.cronbach_alpha, opts.stat_decimals),
         fixed(rel.guttman_split_half, opts.stat_decimals),
         rel.icc_2_1 ? fixed(*rel.icc_2_1, opts.stat_decimals) : "-",
         rel.icc_3_1 ? fixed(*rel.icc_3_1, opts.stat_decimals) : "-"});
  }
  out << "\n## Item-total correlations\n\n";
  out << md_row({"Facet", "Item", "Corrected r", "Uncorrected r"})
      << md_separator(4);
  for (const auto& [facet, rel] : r)
    for (const auto& [item, it] : rel.item_total)
      out << md_row({facet_id(facet), item,
                     it.defined ? fixed(it.corrected_r, opts.stat_decimals)
                                : "undefined",
                     it.defined ? fixed(it.uncorrected_r, opts.stat_decimals)
                                : "undefined"});
  return out.str();
}

/// Table 7 shape: lower-triangular with significance stars, convergent
/// diagonal marked in bold.
inline std::string mtmm_markdown(const CorrelationTable& t,
                                 const RenderOptions& opts = {}) {
  std::ostringstream out;
  out << "# Multitrait-multimethod correlation matrix\n\n";
  std::vector<std::string> header = {"Facet"};
  for (size_t i = 0; i + 1 < t.variables.size(); ++i)
    header.push_back(std::to_string(i + 1));
  out << md_row(header) << md_separator(header.size());
  for (size_t i = 0; i < t.variables.size(); ++i) {
    std::vector<std::string> row = {std::to_string(i + 1) + " " + t.variables[i]};
    for (size_t j = 0; j + 1 < t.variables.size(); ++j) {
      if (j >= i) {
        row.push_back("");
        continue;
      }
      bool convergent = i >= t.method_boundary && j == i - t.method_boundary;
      std::string cell = fixed(t.r[i][j], opts.stat_decimals) +
                         CorrelationTable::stars(t.p[i][j]);
      row.push_back(convergent ? "**" + cell + "**" : cell);
    }
    out << md_row(row);
  }
  out << "\nNote. Bold entries mark same-facet cross-method correlations "
         "(convergent validity). * p < .05. ** p < .01. *** p < .001.\n";
  return out.str();
}

/// Table 8 shape.
inline std::string criterion_markdown(const CriterionTable& t,
                                      const RenderOptions& opts = {}) {
  std::ostringstream out;
  out << "# Criterion correlations\n\n";
  std::vector<std::string> header = {"Facet"};
  for (const auto& c : t.criterion_names) header.push_back(c);
  out << md_row(header) << md_separator(header.size());
  for (size_t i = 0; i < t.facet_names.size(); ++i) {
    std::vector<std::string> row = {t.facet_names[i]};
    for (const auto& cell : t.cells[i])
      row.push_back(fixed(cell.r, opts.stat_decimals) +
                    CorrelationTable::stars(cell.p_value));
    out << md_row(row);
  }
  out << "\nNote. * p < .05. ** p < .01. *** p < .001.\n";
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace sjtforge::report
