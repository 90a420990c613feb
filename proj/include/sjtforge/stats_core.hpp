#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sjtforge::stats {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- distribution tails ----
// Regularized incomplete gamma/beta, series + continued fraction, targeting
// 1e-10 absolute accuracy over the ranges the tests exercise.

namespace detail {

inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (a <= 0.0) throw ParamError("gamma_p: a must be positive");
  if (x < 0.0) throw ParamError("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw ParamError("beta_inc: parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

/// Chi-square upper tail.
inline double chi_square_sf(double x, int df) {
  if (df < 1) throw ParamError("chi_square_sf: df >= 1 required");
  if (!(x >= 0.0)) throw ParamError("chi_square_sf: x must be nonnegative");
  return 1.0 - gamma_p(df / 2.0, x / 2.0);
}

/// Standard normal upper tail.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Student-t upper tail.
inline double t_sf(double t, int df) {
  if (df < 1) throw ParamError("t_sf: df >= 1 required");
  double x = df / (df + t * t);
  double p = 0.5 * beta_inc(df / 2.0, 0.5, x);
  return t >= 0.0 ? p : 1.0 - p;
}

// ---- ranking ----

inline void check_finite(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v)) throw DataError("non-finite value in sample");
}

/// Midranks: tied values share the mean of their rank span; ranks sum to N(N+1)/2.
inline std::vector<double> rank_with_ties(const std::vector<double>& values) {
  if (values.empty()) throw DataError("rank_with_ties: empty sample");
  check_finite(values);
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double midrank = (double(i + 1) + double(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
    i = j + 1;
  }
  return ranks;
}

/// Sum of t^3 - t over tie groups of the pooled sample.
inline double tie_term(const std::vector<double>& pooled) {
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    double t = double(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

// ---- test result containers ----

struct GroupedSample {
  std::vector<std::pair<std::string, std::vector<double>>> groups;

  size_t total_n() const {
    size_t n = 0;
    for (const auto& [_, v] : groups) n += v.size();
    return n;
  }
  void check() const {
    if (groups.size() < 2) throw DataError("need at least 2 groups");
    for (const auto& [label, v] : groups) {
      if (v.empty()) throw DataError("empty group: " + label);
      check_finite(v);
    }
  }
};

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::string method_tag;
  std::vector<std::pair<std::string, double>> mean_ranks;
  bool degenerate = false;
  double z = 0.0;  // mann_whitney only
};

// ---- Kruskal-Wallis ----

inline TestResult kruskal_wallis(const GroupedSample& sample) {
  sample.check();
  const size_t n = sample.total_n();
  if (n < 3) throw DataError("kruskal_wallis: total N >= 3 required");

  std::vector<double> pooled;
  pooled.reserve(n);
  for (const auto& [_, v] : sample.groups)
    pooled.insert(pooled.end(), v.begin(), v.end());
  std::vector<double> ranks = rank_with_ties(pooled);

  TestResult r;
  r.method_tag = "kruskal_wallis_h";
  r.df = int(sample.groups.size()) - 1;

  double h = 0.0;
  size_t offset = 0;
  for (const auto& [label, v] : sample.groups) {
    double rank_sum = 0.0;
    for (size_t i = 0; i < v.size(); ++i) rank_sum += ranks[offset + i];
    offset += v.size();
    r.mean_ranks.emplace_back(label, rank_sum / double(v.size()));
    h += rank_sum * rank_sum / double(v.size());
  }
  double nd = double(n);
  h = 12.0 / (nd * (nd + 1.0)) * h - 3.0 * (nd + 1.0);

  double correction = 1.0 - tie_term(pooled) / (nd * nd * nd - nd);
  if (correction <= 0.0) {
    // all pooled values identical
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.degenerate = true;
    return r;
  }
  r.statistic = h / correction;
  r.p_value = chi_square_sf(std::max(0.0, r.statistic), r.df);
  return r;
}

// ---- Dunn's post hoc ----

enum class Adjust { none, bonferroni };

struct PairwiseResult {
  std::string group_a, group_b;
  double z = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
};

inline std::vector<PairwiseResult> dunn_posthoc(const GroupedSample& sample,
                                                Adjust adjust) {
  sample.check();
  const size_t n = sample.total_n();

  std::vector<double> pooled;
  pooled.reserve(n);
  for (const auto& [_, v] : sample.groups)
    pooled.insert(pooled.end(), v.begin(), v.end());
  std::vector<double> ranks = rank_with_ties(pooled);

  std::vector<double> mean_rank;
  std::vector<size_t> sizes;
  size_t offset = 0;
  for (const auto& [_, v] : sample.groups) {
    double rank_sum = 0.0;
    for (size_t i = 0; i < v.size(); ++i) rank_sum += ranks[offset + i];
    offset += v.size();
    mean_rank.push_back(rank_sum / double(v.size()));
    sizes.push_back(v.size());
  }

  double nd = double(n);
  double var_base =
      nd * (nd + 1.0) / 12.0 - tie_term(pooled) / (12.0 * (nd - 1.0));

  const size_t k = sample.groups.size();
  const double m = double(k * (k - 1) / 2);
  std::vector<PairwiseResult> out;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      PairwiseResult pr;
      pr.group_a = sample.groups[i].first;
      pr.group_b = sample.groups[j].first;
      double se = std::sqrt(var_base * (1.0 / double(sizes[i]) + 1.0 / double(sizes[j])));
      if (se == 0.0) {
        pr.z = 0.0;
        pr.p_raw = 1.0;
      } else {
        pr.z = (mean_rank[i] - mean_rank[j]) / se;
        pr.p_raw = 2.0 * normal_sf(std::fabs(pr.z));
      }
      pr.p_adj = adjust == Adjust::bonferroni ? std::min(1.0, m * pr.p_raw)
                                              : pr.p_raw;
      out.push_back(pr);
    }
  }
  return out;
}

// ---- Mann-Whitney U ----

enum class MwMode { exact, asymptotic, auto_select };

/// Exact two-sided p for the observed U, enumerating all C(n1+n2, n1)
/// assignments of the pooled midranks. Doubled ranks keep the DP integral.
struct ExactUDistribution {
  // probability mass over doubled-U values (index = 2*U)
  std::vector<double> pmf;

  double p_leq(double u) const {
    long iu = std::lround(2.0 * u);
    double p = 0.0;
    for (size_t i = 0; i < pmf.size() && long(i) <= iu; ++i) p += pmf[i];
    return p;
  }
  double p_geq(double u) const {
    long iu = std::lround(2.0 * u);
    double p = 0.0;
    for (size_t i = 0; i < pmf.size(); ++i)
      if (long(i) >= iu) p += pmf[i];
    return p;
  }
  double total() const {
    double s = 0.0;
    for (double p : pmf) s += p;
    return s;
  }
};

inline ExactUDistribution exact_u_distribution(const std::vector<double>& ranks,
                                               size_t n1) {
  const size_t n = ranks.size();
  std::vector<long> doubled(n);
  for (size_t i = 0; i < n; ++i) doubled[i] = std::lround(2.0 * ranks[i]);
  long max_sum = std::accumulate(doubled.begin(), doubled.end(), 0L);

  // dp[j][s] = number of size-j subsets with doubled rank sum s
  std::vector<std::vector<double>> dp(n1 + 1,
                                      std::vector<double>(max_sum + 1, 0.0));
  dp[0][0] = 1.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = std::min(n1, i + 1); j >= 1; --j) {
      for (long s = max_sum; s >= doubled[i]; --s) {
        if (dp[j - 1][s - doubled[i]] != 0.0)
          dp[j][s] += dp[j - 1][s - doubled[i]];
      }
    }
  }

  double total = 0.0;
  for (double c : dp[n1]) total += c;

  // U = R1 - n1(n1+1)/2, so doubled U = doubled R1 - n1(n1+1)
  long shift = long(n1) * long(n1 + 1);
  ExactUDistribution dist;
  dist.pmf.assign(max_sum + 1, 0.0);
  for (long s = 0; s <= max_sum; ++s) {
    if (dp[n1][s] == 0.0) continue;
    long du = s - shift;
    if (du < 0) throw DataError("exact U enumeration underflow");
    if (du >= long(dist.pmf.size())) dist.pmf.resize(du + 1, 0.0);
    dist.pmf[du] += dp[n1][s] / total;
  }
  return dist;
}

inline double tie_corrected_var(const std::vector<double>& pooled, size_t n1,
                                size_t n2) {
  double nd = double(n1 + n2);
  return double(n1) * double(n2) / 12.0 *
         ((nd + 1.0) - tie_term(pooled) / (nd * (nd - 1.0)));
}

inline TestResult mann_whitney(const std::vector<double>& a,
                               const std::vector<double>& b,
                               MwMode mode = MwMode::auto_select) {
  if (a.empty() || b.empty()) throw DataError("mann_whitney: empty sample");
  check_finite(a);
  check_finite(b);
  const size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> ranks = rank_with_ties(pooled);

  double r1 = 0.0;
  for (size_t i = 0; i < n1; ++i) r1 += ranks[i];
  double u = r1 - double(n1) * double(n1 + 1) / 2.0;
  double mean_u = double(n1) * double(n2) / 2.0;

  TestResult r;
  r.statistic = u;
  r.mean_ranks.emplace_back("a", r1 / double(n1));
  r.mean_ranks.emplace_back("b", (double(n) * (n + 1) / 2.0 - r1) / double(n2));

  bool exact = mode == MwMode::exact ||
               (mode == MwMode::auto_select && n <= 20);
  if (exact) {
    r.method_tag = "mann_whitney_u_exact";
    ExactUDistribution dist = exact_u_distribution(ranks, n1);
    double p = 2.0 * std::min(dist.p_leq(u), dist.p_geq(u));
    r.p_value = std::min(1.0, p);
    double var_u = tie_corrected_var(pooled, n1, n2);
    r.z = var_u > 0.0 ? (u - mean_u) / std::sqrt(var_u) : 0.0;
  } else {
    r.method_tag = "mann_whitney_u_asymptotic";
    double var_u = tie_corrected_var(pooled, n1, n2);
    if (var_u <= 0.0) {
      r.z = 0.0;
      r.p_value = 1.0;
      r.degenerate = true;
    } else {
      r.z = (u - mean_u) / std::sqrt(var_u);
      r.p_value = 2.0 * normal_sf(std::fabs(r.z));
    }
  }
  return r;
}

// ---- Pearson correlation ----

struct Correlation {
  double r = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

inline Correlation pearson(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  const size_t n = x.size();
  if (n < 3) throw DataError("pearson: need n >= 3");
  check_finite(x);
  check_finite(y);

  double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateData("pearson: zero variance");

  Correlation c;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::fabs(c.r) >= 1.0) {
    c.t_stat = std::numeric_limits<double>::infinity();
    c.p_value = 0.0;
  } else {
    c.t_stat = c.r * std::sqrt(double(n - 2) / (1.0 - c.r * c.r));
    c.p_value = 2.0 * t_sf(std::fabs(c.t_stat), int(n) - 2);
  }
  return c;
}

// ---- descriptive helpers ----

inline double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw DataError("sample_variance: need n >= 2");
  double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

struct BoxplotStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Quartiles by linear interpolation over sorted order statistics.
inline BoxplotStats boxplot_stats(std::vector<double> v) {
  if (v.empty()) throw DataError("boxplot_stats: empty sample");
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    double pos = q * double(v.size() - 1);
    size_t lo = size_t(std::floor(pos));
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - double(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };
  return {v.front(), quantile(0.25), quantile(0.5), quantile(0.75), v.back()};
}

}  // namespace sjtforge::stats
