#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csv.hpp"
#include "item_model.hpp"
#include "stats_core.hpp"

namespace sjtforge {

struct MetaMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Session { test, retest };

inline const char* session_id(Session s) {
  return s == Session::test ? "test" : "retest";
}

struct ResponseRecord {
  std::string participant_id;
  std::string item_id;
  char choice = '?';
  long response_time_ms = 0;
  Session session = Session::test;
};

struct ParticipantMeta {
  std::string participant_id;
  int age = 0;
  bool attention_checks_passed = true;
  std::map<std::string, int> likert_responses;     // instrument item -> 1..5
  std::map<std::string, int> criterion_responses;  // instrument item -> 1..5
};

// ---- inclusion filters ----

struct InclusionCriteria {
  int age_min = 18;
  int age_max = 60;
  bool require_attention = true;
  double min_mean_rt_ms = 2000.0;  // strictly greater than
};

struct Exclusion {
  std::string participant_id;
  std::string reason;  // AGE | ATTENTION | RT
};

struct FilterResult {
  std::vector<std::string> retained;
  std::vector<Exclusion> excluded;
};

/// Partition participants by the three inclusion criteria; every excluded
/// participant carries the first matching reason code.
inline FilterResult apply_inclusion_filters(
    const std::vector<ResponseRecord>& records,
    const std::map<std::string, ParticipantMeta>& meta,
    const InclusionCriteria& criteria = {}) {
  std::map<std::string, std::pair<double, int>> rt;  // sum, count
  std::vector<std::string> order;
  for (const auto& r : records) {
    auto [it, inserted] = rt.try_emplace(r.participant_id, 0.0, 0);
    if (inserted) order.push_back(r.participant_id);
    it->second.first += double(r.response_time_ms);
    it->second.second += 1;
  }

  FilterResult out;
  for (const auto& pid : order) {
    auto m = meta.find(pid);
    if (m == meta.end())
      throw MetaMissing("participant has responses but no meta: " + pid);
    const ParticipantMeta& p = m->second;
    if (p.age < criteria.age_min || p.age > criteria.age_max) {
      out.excluded.push_back({pid, "AGE"});
      continue;
    }
    if (criteria.require_attention && !p.attention_checks_passed) {
      out.excluded.push_back({pid, "ATTENTION"});
      continue;
    }
    auto [sum, count] = rt.at(pid);
    if (!(sum / double(count) > criteria.min_mean_rt_ms)) {
      out.excluded.push_back({pid, "RT"});
      continue;
    }
    out.retained.push_back(pid);
  }
  return out;
}

// ---- score matrices ----

struct ScoreMatrix {
  Facet facet = Facet::self_consciousness;
  std::vector<std::string> persons;
  std::vector<std::string> items;
  std::vector<std::vector<int>> cells;  // persons x items, binary

  std::vector<double> item_column(size_t j) const {
    std::vector<double> col(persons.size());
    for (size_t i = 0; i < persons.size(); ++i) col[i] = cells[i][j];
    return col;
  }
  std::vector<double> person_totals() const {
    std::vector<double> totals(persons.size(), 0.0);
    for (size_t i = 0; i < persons.size(); ++i)
      for (size_t j = 0; j < items.size(); ++j) totals[i] += cells[i][j];
    return totals;
  }
};

struct MatrixBuild {
  std::map<Facet, ScoreMatrix> matrices;
  std::vector<std::string> warnings;
};

/// Per-facet persons x items binary matrices; participants missing any facet
/// item in the session are dropped from that facet with a warning.
inline MatrixBuild build_score_matrix(const std::vector<ResponseRecord>& records,
                                      const ItemBank& bank, Session session,
                                      const std::vector<std::string>& participants) {
  std::map<std::string, std::map<std::string, char>> choices;
  for (const auto& r : records) {
    if (r.session != session) continue;
    if (!bank.find(r.item_id))
      throw JoinError("response references unknown item: " + r.item_id);
    choices[r.participant_id][r.item_id] = r.choice;
  }

  MatrixBuild out;
  if (choices.empty()) {
    out.warnings.push_back(std::string("no responses in session ") +
                           session_id(session));
    return out;
  }

  for (Facet facet : all_facets) {
    auto items = bank.facet_items(facet);
    if (items.empty()) continue;
    ScoreMatrix m;
    m.facet = facet;
    for (const SjtItem* it : items) m.items.push_back(it->item_id);

    for (const auto& pid : participants) {
      auto c = choices.find(pid);
      if (c == choices.end()) continue;
      std::vector<int> row;
      bool complete = true;
      for (const SjtItem* it : items) {
        auto choice = c->second.find(it->item_id);
        if (choice == c->second.end()) {
          complete = false;
          break;
        }
        row.push_back(score_choice(*it, choice->second));
      }
      if (!complete) {
        out.warnings.push_back("participant " + pid + " incomplete on facet " +
                               facet_id(facet) + ", dropped from that facet");
        continue;
      }
      m.persons.push_back(pid);
      m.cells.push_back(std::move(row));
    }
    out.matrices[facet] = std::move(m);
  }
  return out;
}

// ---- item analysis ----

struct ItemTotal {
  double corrected_r = 0.0;
  double uncorrected_r = 0.0;
  bool defined = true;
};

inline std::map<std::string, ItemTotal> item_total_correlations(
    const ScoreMatrix& m) {
  if (m.persons.size() < 3)
    throw stats::DataError("item_total_correlations: need >= 3 persons");
  std::vector<double> totals = m.person_totals();
  std::map<std::string, ItemTotal> out;
  for (size_t j = 0; j < m.items.size(); ++j) {
    std::vector<double> col = m.item_column(j);
    std::vector<double> rest(totals);
    for (size_t i = 0; i < rest.size(); ++i) rest[i] -= col[i];
    ItemTotal it;
    try {
      it.uncorrected_r = stats::pearson(col, totals).r;
      it.corrected_r = stats::pearson(col, rest).r;
    } catch (const stats::DegenerateData&) {
      it.defined = false;
    }
    out[m.items[j]] = it;
  }
  return out;
}

// ---- reliability ----

/// alpha = k/(k-1) * (1 - sum(item variances)/total variance); on binary
/// items this reduces to KR-20. Sample variances, n-1 denominator.
inline double cronbach_alpha(const ScoreMatrix& m) {
  const size_t k = m.items.size();
  if (k < 2) throw stats::DataError("cronbach_alpha: need >= 2 items");
  if (m.persons.size() < 2)
    throw stats::DataError("cronbach_alpha: need >= 2 persons");
  double item_var_sum = 0.0;
  for (size_t j = 0; j < k; ++j)
    item_var_sum += stats::sample_variance(m.item_column(j));
  double total_var = stats::sample_variance(m.person_totals());
  if (total_var == 0.0)
    throw stats::DegenerateData("cronbach_alpha: zero total variance");
  return double(k) / double(k - 1) * (1.0 - item_var_sum / total_var);
}

enum class SplitMode { odd_even, explicit_split };

/// Guttman coefficient 2*(1 - (var_A + var_B)/var_T) over two test halves.
/// odd_even uses 1-based positions in the matrix's item order.
inline double guttman_split_half(const ScoreMatrix& m,
                                 SplitMode mode = SplitMode::odd_even,
                                 const std::vector<size_t>* half_a = nullptr) {
  const size_t k = m.items.size();
  if (k < 2) throw stats::DataError("guttman_split_half: need >= 2 items");

  std::set<size_t> in_a;
  if (mode == SplitMode::odd_even) {
    for (size_t j = 0; j < k; j += 2) in_a.insert(j);  // positions 1,3,5,...
  } else {
    if (!half_a) throw stats::ParamError("explicit split requires indices");
    in_a.insert(half_a->begin(), half_a->end());
  }

  std::vector<double> a(m.persons.size(), 0.0), b(m.persons.size(), 0.0);
  for (size_t i = 0; i < m.persons.size(); ++i)
    for (size_t j = 0; j < k; ++j)
      (in_a.count(j) ? a[i] : b[i]) += m.cells[i][j];

  std::vector<double> total(m.persons.size());
  for (size_t i = 0; i < total.size(); ++i) total[i] = a[i] + b[i];
  double var_t = stats::sample_variance(total);
  if (var_t == 0.0)
    throw stats::DegenerateData("guttman_split_half: zero total variance");
  return 2.0 * (1.0 - (stats::sample_variance(a) + stats::sample_variance(b)) / var_t);
}

enum class IccModel { two_way_random_agreement, two_way_mixed_consistency };

/// Single-measure ICC from two-way ANOVA mean squares over paired session
/// totals. agreement = ICC(2,1), consistency = ICC(3,1).
inline double icc(const std::vector<double>& test,
                  const std::vector<double>& retest, IccModel model) {
  const size_t n = test.size();
  if (n != retest.size()) throw stats::DataError("icc: length mismatch");
  if (n < 3) throw stats::DataError("icc: need >= 3 paired totals");
  const double k = 2.0;

  double grand = 0.0;
  for (size_t i = 0; i < n; ++i) grand += test[i] + retest[i];
  grand /= double(2 * n);
  double mean_test = 0.0, mean_retest = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_test += test[i];
    mean_retest += retest[i];
  }
  mean_test /= double(n);
  mean_retest /= double(n);

  double ss_rows = 0.0, ss_cols = 0.0, ss_total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double row_mean = (test[i] + retest[i]) / 2.0;
    ss_rows += k * (row_mean - grand) * (row_mean - grand);
    ss_total += (test[i] - grand) * (test[i] - grand) +
                (retest[i] - grand) * (retest[i] - grand);
  }
  ss_cols = double(n) * ((mean_test - grand) * (mean_test - grand) +
                         (mean_retest - grand) * (mean_retest - grand));
  double ss_err = ss_total - ss_rows - ss_cols;

  double msr = ss_rows / double(n - 1);
  double msc = ss_cols / (k - 1.0);
  double mse = ss_err / (double(n - 1) * (k - 1.0));
  if (msr == 0.0)
    throw stats::DegenerateData("icc: zero between-person variance");

  if (model == IccModel::two_way_mixed_consistency)
    return (msr - mse) / (msr + (k - 1.0) * mse);
  return (msr - mse) /
         (msr + (k - 1.0) * mse + k * (msc - mse) / double(n));
}

struct FacetReliability {
  double cronbach_alpha = 0.0;
  double guttman_split_half = 0.0;
  std::optional<double> icc_2_1;  // absent when no retest data
  std::optional<double> icc_3_1;
  std::map<std::string, ItemTotal> item_total;
};

using ReliabilityReport = std::map<Facet, FacetReliability>;

// ---- MTMM and criterion tables ----

struct CorrelationTable {
  std::vector<std::string> variables;
  std::vector<std::vector<double>> r;        // full symmetric matrix
  std::vector<std::vector<double>> p;        // two-sided p per cell
  size_t method_boundary = 0;  // first `method_boundary` variables = method A

  static std::string stars(double p_value) {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
  }
};

/// Full 10-variable MTMM correlation table: five facet totals per method,
/// method A (SJT) first. Inputs must be person-aligned.
inline CorrelationTable mtmm_matrix(
    const std::map<Facet, std::vector<double>>& facet_scores_sjt,
    const std::map<Facet, std::vector<double>>& facet_scores_likert) {
  CorrelationTable t;
  std::vector<const std::vector<double>*> cols;
  for (Facet f : all_facets) {
    auto it = facet_scores_sjt.find(f);
    if (it == facet_scores_sjt.end())
      throw stats::DataError(std::string("missing SJT scores for ") + facet_id(f));
    t.variables.push_back(std::string("SJT ") + facet_id(f));
    cols.push_back(&it->second);
  }
  for (Facet f : all_facets) {
    auto it = facet_scores_likert.find(f);
    if (it == facet_scores_likert.end())
      throw stats::DataError(std::string("missing Likert scores for ") + facet_id(f));
    t.variables.push_back(std::string("Likert ") + facet_id(f));
    cols.push_back(&it->second);
  }
  t.method_boundary = all_facets.size();

  const size_t n = cols.size();
  t.r.assign(n, std::vector<double>(n, 1.0));
  t.p.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      stats::Correlation c = stats::pearson(*cols[i], *cols[j]);
      t.r[i][j] = t.r[j][i] = c.r;
      t.p[i][j] = t.p[j][i] = c.p_value;
    }
  }
  return t;
}

/// Builds a CorrelationTable directly from lower-triangular values (row-major,
/// row i has i entries), for feeding published matrices through the summary.
inline CorrelationTable correlation_table_from_lower_triangle(
    const std::vector<std::string>& variables,
    const std::vector<double>& lower, size_t method_boundary) {
  const size_t n = variables.size();
  if (lower.size() != n * (n - 1) / 2)
    throw stats::DataError("lower triangle size mismatch");
  CorrelationTable t;
  t.variables = variables;
  t.method_boundary = method_boundary;
  t.r.assign(n, std::vector<double>(n, 1.0));
  t.p.assign(n, std::vector<double>(n, 0.0));
  size_t idx = 0;
  for (size_t i = 1; i < n; ++i)
    for (size_t j = 0; j < i; ++j) {
      t.r[i][j] = t.r[j][i] = lower[idx];
      ++idx;
    }
  return t;
}

struct MtmmSummary {
  double convergent_mean = 0.0;
  double convergent_sd = 0.0;
  double discriminant_mean_abs_method_a = 0.0;  // within-method A pairs
  double discriminant_mean_abs_method_b = 0.0;
};

/// Convergent stats over same-facet cross-method correlations; discriminant
/// = mean |r| over within-method off-diagonal pairs, per method.
inline MtmmSummary mtmm_summary(const CorrelationTable& t) {
  const size_t m = t.method_boundary;
  if (m == 0 || t.variables.size() != 2 * m)
    throw stats::DataError("mtmm_summary: table is not a two-method layout");

  MtmmSummary s;
  std::vector<double> convergent;
  for (size_t i = 0; i < m; ++i) convergent.push_back(t.r[i][m + i]);
  double mean = 0.0;
  for (double r : convergent) mean += r;
  mean /= double(convergent.size());
  s.convergent_mean = mean;
  double ss = 0.0;
  for (double r : convergent) ss += (r - mean) * (r - mean);
  s.convergent_sd = std::sqrt(ss / double(convergent.size() - 1));

  auto within = [&](size_t base) {
    double sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j) {
        sum += std::fabs(t.r[base + i][base + j]);
        ++count;
      }
    return sum / double(count);
  };
  s.discriminant_mean_abs_method_a = within(0);
  s.discriminant_mean_abs_method_b = within(m);
  return s;
}

/// Facets x criteria Pearson table (Table 8 shape).
struct CriterionTable {
  std::vector<std::string> facet_names;
  std::vector<std::string> criterion_names;
  std::vector<std::vector<stats::Correlation>> cells;  // facets x criteria
};

inline CriterionTable criterion_correlations(
    const std::map<Facet, std::vector<double>>& facet_scores,
    const std::vector<std::pair<std::string, std::vector<double>>>& criteria) {
  CriterionTable t;
  for (const auto& [name, _] : criteria) t.criterion_names.push_back(name);
  for (Facet f : all_facets) {
    auto it = facet_scores.find(f);
    if (it == facet_scores.end()) continue;
    t.facet_names.push_back(facet_id(f));
    std::vector<stats::Correlation> row;
    for (const auto& [_, values] : criteria)
      row.push_back(stats::pearson(it->second, values));
    t.cells.push_back(std::move(row));
  }
  return t;
}

// ---- CSV ingestion ----

/// participant_id,item_id,choice,response_time_ms,session
inline std::vector<ResponseRecord> responses_from_csv(const csv::Table& t) {
  std::vector<ResponseRecord> out;
  size_t pid = t.column("participant_id"), item = t.column("item_id"),
         choice = t.column("choice"), rt = t.column("response_time_ms"),
         session = t.column("session");
  for (const auto& row : t.rows) {
    ResponseRecord r;
    r.participant_id = row[pid];
    r.item_id = row[item];
    if (row[choice].size() != 1)
      throw csv::CsvError("bad choice: " + row[choice]);
    r.choice = row[choice][0];
    r.response_time_ms = std::stol(row[rt]);
    if (row[session] == "test") r.session = Session::test;
    else if (row[session] == "retest") r.session = Session::retest;
    else throw csv::CsvError("bad session: " + row[session]);
    out.push_back(std::move(r));
  }
  return out;
}

/// participant_id,age,attention_passed[,likert:<id>...,criterion:<id>...]
inline std::map<std::string, ParticipantMeta> meta_from_csv(const csv::Table& t) {
  std::map<std::string, ParticipantMeta> out;
  size_t pid = t.column("participant_id"), age = t.column("age"),
         att = t.column("attention_passed");
  for (const auto& row : t.rows) {
    ParticipantMeta m;
    m.participant_id = row[pid];
    m.age = std::stoi(row[age]);
    m.attention_checks_passed = row[att] == "1" || row[att] == "true";
    for (size_t c = 0; c < t.header.size(); ++c) {
      const std::string& h = t.header[c];
      if (row[c].empty()) continue;
      if (h.rfind("likert:", 0) == 0)
        m.likert_responses[h.substr(7)] = std::stoi(row[c]);
      else if (h.rfind("criterion:", 0) == 0)
        m.criterion_responses[h.substr(10)] = std::stoi(row[c]);
    }
    out[m.participant_id] = std::move(m);
  }
  return out;
}

}  // namespace sjtforge
