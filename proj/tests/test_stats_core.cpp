#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "sjtforge/stats_core.hpp"

using namespace sjtforge::stats;

namespace {

// independent brute-force oracle for the exact U distribution: enumerate
// every size-n1 subset of the pooled ranks
void enumerate_subsets(const std::vector<double>& ranks, size_t n1,
                       std::vector<std::pair<double, long>>& out) {
  const size_t n = ranks.size();
  std::vector<size_t> idx(n1);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::map<double, long> counts;
  while (true) {
    double r1 = 0.0;
    for (size_t i : idx) r1 += ranks[i];
    counts[r1 - double(n1) * double(n1 + 1) / 2.0] += 1;
    // next combination
    size_t k = n1;
    while (k > 0 && idx[k - 1] == n - n1 + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (size_t j = k; j < n1; ++j) idx[j] = idx[j - 1] + 1;
  }
  out.assign(counts.begin(), counts.end());
}

}  // namespace

TEST_CASE("midranks sum to N(N+1)/2 and ties share ranks") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> len(1, 40), val(0, 9);
    size_t n = size_t(len(rng));
    std::vector<double> v(n);
    for (auto& x : v) x = val(rng);
    auto ranks = rank_with_ties(v);
    double sum = std::accumulate(ranks.begin(), ranks.end(), 0.0);
    CHECK(sum == doctest::Approx(double(n) * double(n + 1) / 2.0).epsilon(1e-12));
  }
  auto r = rank_with_ties({3.0, 1.0, 3.0, 2.0});
  CHECK(r[0] == doctest::Approx(3.5));
  CHECK(r[1] == doctest::Approx(1.0));
  CHECK(r[2] == doctest::Approx(3.5));
  CHECK(r[3] == doctest::Approx(2.0));
  CHECK_THROWS_AS(rank_with_ties({}), DataError);
  CHECK_THROWS_AS(rank_with_ties({1.0, std::nan("")}), DataError);
}

TEST_CASE("tie_term counts t^3 - t over tie groups") {
  CHECK(tie_term({1, 2, 3}) == 0.0);
  CHECK(tie_term({1, 1, 2}) == 6.0);          // 2^3 - 2
  CHECK(tie_term({1, 1, 1, 2, 2}) == 30.0);   // 24 + 6
}

TEST_CASE("distribution tails match reference values") {
  // chi-square critical values
  CHECK(chi_square_sf(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_sf(5.991, 2) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_sf(11.070, 5) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_sf(15.086, 5) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
  // normal
  CHECK(normal_sf(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
  CHECK(normal_sf(0.0) == doctest::Approx(0.5));
  // student t critical values
  CHECK(t_sf(2.7764451051977987, 4) == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(t_sf(1.8124611228107335, 10) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(t_sf(-2.7764451051977987, 4) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), ParamError);
  CHECK_THROWS_AS(chi_square_sf(-1.0, 1), ParamError);
}

TEST_CASE("incomplete beta identities") {
  CHECK(beta_inc(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(beta_inc(2.0, 1.0, 0.4) == doctest::Approx(0.16).epsilon(1e-12));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95), ab(0.5, 8.0);
  for (int i = 0; i < 200; ++i) {
    double a = ab(rng), b = ab(rng), x = u(rng);
    CHECK(beta_inc(a, b, x) ==
          doctest::Approx(1.0 - beta_inc(b, a, 1.0 - x)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(beta_inc(0.0, 1.0, 0.5), ParamError);
}

TEST_CASE("kruskal-wallis hand-computed example") {
  GroupedSample s;
  s.groups = {{"g1", {1, 2, 3}}, {"g2", {4, 5, 6}}, {"g3", {7, 8, 9}}};
  auto r = kruskal_wallis(s);
  // rank sums 6, 15, 24 -> H = 12/90 * (12 + 75 + 192) - 30 = 7.2
  CHECK(r.statistic == doctest::Approx(7.2).epsilon(1e-12));
  CHECK(r.df == 2);
  CHECK(r.p_value == doctest::Approx(chi_square_sf(7.2, 2)).epsilon(1e-12));
  CHECK(r.mean_ranks[0].second == doctest::Approx(2.0));
  CHECK(r.mean_ranks[2].second == doctest::Approx(8.0));
}

TEST_CASE("kruskal-wallis is invariant under monotone transforms") {
  std::mt19937 rng(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    GroupedSample s, s2;
    for (int g = 0; g < 3; ++g) {
      std::vector<double> v(5 + g), v2;
      for (auto& x : v) x = normal(rng) + g;
      for (double x : v) v2.push_back(std::exp(x));  // strictly increasing map
      s.groups.emplace_back("g" + std::to_string(g), v);
      s2.groups.emplace_back("g" + std::to_string(g), v2);
    }
    auto a = kruskal_wallis(s), b = kruskal_wallis(s2);
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
  }
}

TEST_CASE("kruskal-wallis degenerates on constant data") {
  GroupedSample s;
  s.groups = {{"a", {2, 2, 2}}, {"b", {2, 2}}};
  auto r = kruskal_wallis(s);
  CHECK(r.degenerate);
  CHECK(r.p_value == 1.0);
  CHECK_THROWS_AS(kruskal_wallis(GroupedSample{{{"a", {1.0}}}}), DataError);
}

TEST_CASE("dunn post hoc bonferroni caps at 1 and orders pairs") {
  GroupedSample s;
  s.groups = {{"a", {1, 2, 3, 4}}, {"b", {2, 3, 4, 5}}, {"c", {10, 11, 12, 13}}};
  auto raw = dunn_posthoc(s, Adjust::none);
  auto adj = dunn_posthoc(s, Adjust::bonferroni);
  REQUIRE(raw.size() == 3);
  for (size_t i = 0; i < raw.size(); ++i) {
    CHECK(adj[i].p_adj == doctest::Approx(std::min(1.0, 3.0 * raw[i].p_raw)));
    CHECK(raw[i].p_adj == doctest::Approx(raw[i].p_raw));
  }
  CHECK(raw[0].group_a == "a");
  CHECK(raw[0].group_b == "b");
  // a vs b heavily overlapping, a vs c separated
  CHECK(std::fabs(raw[0].z) < std::fabs(raw[1].z));
}

TEST_CASE("mann-whitney exact matches brute-force enumeration") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> val(0, 5);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> len(2, 6);
    size_t n1 = size_t(len(rng)), n2 = size_t(len(rng));
    std::vector<double> a(n1), b(n2);
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = rank_with_ties(pooled);
    std::vector<std::pair<double, long>> oracle;
    enumerate_subsets(ranks, n1, oracle);
    long total = 0;
    for (const auto& [_, c] : oracle) total += c;

    auto dist = exact_u_distribution(ranks, n1);
    CHECK(dist.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [u, count] : oracle) {
      long iu = std::lround(2.0 * u);
      REQUIRE(iu >= 0);
      REQUIRE(size_t(iu) < dist.pmf.size());
      CHECK(dist.pmf[iu] ==
            doctest::Approx(double(count) / double(total)).epsilon(1e-12));
    }

    // p-value equals the oracle's two-sided tail probability
    auto r = mann_whitney(a, b, MwMode::exact);
    double p_le = 0.0, p_ge = 0.0;
    for (const auto& [u, c] : oracle) {
      if (u <= r.statistic + 1e-9) p_le += double(c) / double(total);
      if (u >= r.statistic - 1e-9) p_ge += double(c) / double(total);
    }
    CHECK(r.p_value ==
          doctest::Approx(std::min(1.0, 2.0 * std::min(p_le, p_ge)))
              .epsilon(1e-12));
  }
}

TEST_CASE("mann-whitney reference cases") {
  auto sep = mann_whitney({1, 2, 3}, {4, 5, 6}, MwMode::exact);
  CHECK(sep.statistic == doctest::Approx(0.0));
  CHECK(sep.p_value == doctest::Approx(0.1).epsilon(1e-12));

  std::vector<double> same(7, 3.0);
  auto tied = mann_whitney(same, same, MwMode::exact);
  CHECK(tied.statistic == doctest::Approx(24.5));
  CHECK(tied.p_value == doctest::Approx(1.0));
  CHECK(tied.z == doctest::Approx(0.0));

  auto asym = mann_whitney({1, 2, 3, 4}, {3, 4, 5, 6}, MwMode::asymptotic);
  CHECK(asym.method_tag == "mann_whitney_u_asymptotic");
  CHECK(asym.p_value == doctest::Approx(2.0 * normal_sf(std::fabs(asym.z))));

  CHECK_THROWS_AS(mann_whitney({}, {1.0}), DataError);
}

TEST_CASE("auto mode switches to exact at small N") {
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> b = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  CHECK(mann_whitney(a, b, MwMode::auto_select).method_tag ==
        "mann_whitney_u_exact");
  a.push_back(12);
  CHECK(mann_whitney(a, b, MwMode::auto_select).method_tag ==
        "mann_whitney_u_asymptotic");
}

TEST_CASE("pearson correlation with t-based p") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y = {2, 1, 4, 3, 5};
  auto c = pearson(x, y);
  // deviations x: -2,-1,0,1,2 and y: -1,-2,1,0,2 -> sxy 8, sxx 10, syy 10
  CHECK(c.r == doctest::Approx(0.8).epsilon(1e-12));
  double t = 0.8 * std::sqrt(3.0 / (1.0 - 0.64));
  CHECK(c.t_stat == doctest::Approx(t).epsilon(1e-12));
  CHECK(c.p_value == doctest::Approx(2.0 * t_sf(t, 3)).epsilon(1e-12));

  auto perfect = pearson({1, 2, 3}, {2, 4, 6});
  CHECK(perfect.r == doctest::Approx(1.0));
  CHECK(perfect.p_value == 0.0);

  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), DegenerateData);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), DataError);
}

TEST_CASE("descriptive helpers") {
  CHECK(sample_variance({2, 4, 6}) == doctest::Approx(4.0));
  auto bp = boxplot_stats({1, 2, 3, 4, 5});
  CHECK(bp.min == 1);
  CHECK(bp.q1 == doctest::Approx(2.0));
  CHECK(bp.median == doctest::Approx(3.0));
  CHECK(bp.q3 == doctest::Approx(4.0));
  CHECK(bp.max == 5);
  auto bp2 = boxplot_stats({1, 2, 3, 4});
  CHECK(bp2.q1 == doctest::Approx(1.75));
  CHECK(bp2.median == doctest::Approx(2.5));
  CHECK(bp2.q3 == doctest::Approx(3.25));
}
