#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "content_validity.hpp"
#include "item_model.hpp"
#include "psychometrics.hpp"

namespace sjtforge {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two-parameter-logistic response model per item: the simplest standard
/// model producing binary item scores with tunable reliability.
struct SimItemParams {
  double discrimination = 1.0;  // a > 0
  double difficulty = 0.0;      // b
};

struct CriterionSpec {
  std::array<double, 5> weights{};  // facet order = all_facets
  double noise_sd = 1.0;
  int n_items = 5;
};

struct SimConfig {
  int n_participants = 443;
  int n_retest = 80;
  std::array<std::array<double, 5>, 5> facet_covariance{};  // unit-diag PSD
  std::map<Facet, std::vector<SimItemParams>> item_params;  // per facet, by layout order
  double default_discrimination = 1.0;
  double difficulty_spread = 1.0;  // b_i evenly spaced in [-spread, spread]
  int likert_items_per_facet = 8;
  double likert_loading = 1.0;
  std::array<double, 4> likert_thresholds = {-1.5, -0.5, 0.5, 1.5};
  std::map<std::string, CriterionSpec> criteria;
  std::array<double, 5> retest_stability = {0.7, 0.7, 0.7, 0.7, 0.7};
  // rule-violation injection, to exercise the inclusion filters
  double underage_rate = 0.0;
  double overage_rate = 0.0;
  double attention_fail_rate = 0.0;
  double fast_responder_rate = 0.0;
  double mean_rt_ms = 3500.0;
  double rt_sd_ms = 600.0;
  uint64_t seed = 1;

  SimConfig() {
    for (size_t i = 0; i < 5; ++i)
      for (size_t j = 0; j < 5; ++j) facet_covariance[i][j] = i == j ? 1.0 : 0.0;
  }
};

struct SimOutput {
  std::vector<ResponseRecord> records;  // test + retest sessions
  std::map<std::string, ParticipantMeta> meta;
  // hidden latents for oracle checks: persons x 5, test and retest
  std::vector<std::array<double, 5>> latents_test;
  std::vector<std::array<double, 5>> latents_retest;
  std::vector<std::string> participant_order;
};

namespace sim_detail {

inline std::array<std::array<double, 5>, 5> cholesky(
    const std::array<std::array<double, 5>, 5>& cov) {
  std::array<std::array<double, 5>, 5> chol{};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = cov[i][j];
      for (int k = 0; k < j; ++k) sum -= chol[i][k] * chol[j][k];
      if (i == j) {
        if (sum < -1e-10) throw ConfigError("facet covariance is not PSD");
        chol[i][j] = std::sqrt(std::max(sum, 0.0));
      } else {
        chol[i][j] = chol[j][j] > 0.0 ? sum / chol[j][j] : 0.0;
      }
    }
  }
  return chol;
}

inline std::array<double, 5> correlated_normals(
    std::mt19937_64& rng, const std::array<std::array<double, 5>, 5>& chol) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<double, 5> z{};
  for (auto& v : z) v = normal(rng);
  std::array<double, 5> out{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j <= i; ++j) out[i] += chol[i][j] * z[j];
  return out;
}

inline int likert_category(double latent, const std::array<double, 4>& cuts) {
  int cat = 1;
  for (double c : cuts)
    if (latent > c) ++cat;
  return cat;
}

inline uint64_t substream_seed(uint64_t seed, uint64_t index) {
  // splitmix64 step keeps per-participant streams independent of ordering
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace sim_detail

inline std::vector<SimItemParams> resolved_item_params(const SimConfig& config,
                                                       Facet facet,
                                                       size_t n_items) {
  auto it = config.item_params.find(facet);
  if (it != config.item_params.end()) {
    if (it->second.size() != n_items)
      throw ConfigError(std::string("item_params size mismatch for ") +
                        facet_id(facet));
    return it->second;
  }
  std::vector<SimItemParams> params(n_items);
  for (size_t i = 0; i < n_items; ++i) {
    params[i].discrimination = config.default_discrimination;
    params[i].difficulty =
        n_items > 1 ? -config.difficulty_spread +
                          2.0 * config.difficulty_spread * double(i) /
                              double(n_items - 1)
                    : 0.0;
  }
  return params;
}

inline void check_config(const SimConfig& config, const ItemBank& bank) {
  if (config.n_participants < 1) throw ConfigError("n_participants must be >= 1");
  for (int i = 0; i < 5; ++i) {
    if (std::fabs(config.facet_covariance[i][i] - 1.0) > 1e-9)
      throw ConfigError("facet covariance diagonal must be 1");
    for (int j = 0; j < 5; ++j)
      if (std::fabs(config.facet_covariance[i][j] -
                    config.facet_covariance[j][i]) > 1e-12)
        throw ConfigError("facet covariance must be symmetric");
  }
  for (size_t i = 1; i < config.likert_thresholds.size(); ++i)
    if (!(config.likert_thresholds[i] > config.likert_thresholds[i - 1]))
      throw ConfigError("likert thresholds must be strictly increasing");
  for (double rho : config.retest_stability)
    if (rho < 0.0 || rho > 1.0)
      throw ConfigError("retest stability must lie in [0, 1]");
  for (Facet f : all_facets)
    if (bank.facet_items(f).empty())
      throw ConfigError(std::string("bank has no items for ") + facet_id(f));
  sim_detail::cholesky(config.facet_covariance);  // PSD check
}

/// Deterministic given seed + config; per-participant substreams make the
/// output independent of any parallel scheduling.
inline SimOutput simulate(const SimConfig& config, const ItemBank& bank) {
  check_config(config, bank);
  auto chol = sim_detail::cholesky(config.facet_covariance);

  std::map<Facet, std::vector<const SjtItem*>> items;
  std::map<Facet, std::vector<SimItemParams>> params;
  for (Facet f : all_facets) {
    items[f] = bank.facet_items(f);
    params[f] = resolved_item_params(config, f, items[f].size());
  }

  SimOutput out;
  for (int p = 0; p < config.n_participants; ++p) {
    std::mt19937_64 rng(sim_detail::substream_seed(config.seed, uint64_t(p)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::string pid = "p" + std::to_string(p + 1);
    out.participant_order.push_back(pid);

    std::array<double, 5> theta = sim_detail::correlated_normals(rng, chol);
    std::array<double, 5> eps = sim_detail::correlated_normals(rng, chol);
    std::array<double, 5> theta_retest{};
    for (int f = 0; f < 5; ++f) {
      double rho = config.retest_stability[f];
      theta_retest[f] = rho * theta[f] + std::sqrt(1.0 - rho * rho) * eps[f];
    }
    out.latents_test.push_back(theta);
    out.latents_retest.push_back(theta_retest);

    ParticipantMeta meta;
    meta.participant_id = pid;
    meta.age = 18 + int(unif(rng) * 41.0);  // 18..58
    if (unif(rng) < config.underage_rate) meta.age = 16 + int(unif(rng) * 2.0);
    else if (unif(rng) < config.overage_rate) meta.age = 61 + int(unif(rng) * 10.0);
    meta.attention_checks_passed = unif(rng) >= config.attention_fail_rate;
    bool fast = unif(rng) < config.fast_responder_rate;
    double rt_mean = fast ? 1200.0 : config.mean_rt_ms;

    auto answer = [&](Session session, const std::array<double, 5>& latents) {
      int fi = 0;
      for (Facet f : all_facets) {
        const auto& facet_items = items[f];
        const auto& facet_params = params[f];
        for (size_t j = 0; j < facet_items.size(); ++j) {
          const SjtItem* item = facet_items[j];
          double a = facet_params[j].discrimination;
          double b = facet_params[j].difficulty;
          double prob = 1.0 / (1.0 + std::exp(-a * (latents[fi] - b)));
          int score = unif(rng) < prob ? 1 : 0;
          // uniformly pick one of the two labels carrying the drawn score
          std::vector<char> labels;
          for (const auto& [label, key] : item->scoring_key)
            if (key == score) labels.push_back(label);
          char choice = labels[size_t(unif(rng) * double(labels.size())) %
                               labels.size()];
          ResponseRecord rec;
          rec.participant_id = pid;
          rec.item_id = item->item_id;
          rec.choice = choice;
          rec.response_time_ms =
              std::max(300L, long(rt_mean + config.rt_sd_ms * normal(rng)));
          rec.session = session;
          out.records.push_back(std::move(rec));
        }
        ++fi;
      }
    };
    answer(Session::test, theta);
    if (p < config.n_retest) answer(Session::retest, theta_retest);

    // Likert instrument, same facets, graded by fixed thresholds
    int fi = 0;
    for (Facet f : all_facets) {
      for (int j = 0; j < config.likert_items_per_facet; ++j) {
        double latent = config.likert_loading * theta[fi] + 0.8 * normal(rng);
        std::string id = std::string(facet_id(f)) + "-L" + std::to_string(j + 1);
        meta.likert_responses[id] =
            sim_detail::likert_category(latent, config.likert_thresholds);
      }
      ++fi;
    }
    for (const auto& [name, crit] : config.criteria) {
      double construct = crit.noise_sd * normal(rng);
      for (int f = 0; f < 5; ++f) construct += crit.weights[f] * theta[f];
      for (int j = 0; j < crit.n_items; ++j) {
        double latent = construct + 0.8 * normal(rng);
        meta.criterion_responses[name + "-" + std::to_string(j + 1)] =
            sim_detail::likert_category(latent, config.likert_thresholds);
      }
    }
    out.meta[pid] = std::move(meta);
  }
  return out;
}

struct AlphaEstimate {
  double alpha = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo oracle for the internal consistency the config implies on one
/// facet, at large n. Batched to attach a standard error.
inline AlphaEstimate expected_alpha(const SimConfig& config, Facet facet,
                                    const ItemBank& bank, int n_persons = 100000,
                                    int n_batches = 10) {
  auto facet_items = bank.facet_items(facet);
  auto params = resolved_item_params(config, facet, facet_items.size());
  int facet_index = 0;
  for (size_t i = 0; i < all_facets.size(); ++i)
    if (all_facets[i] == facet) facet_index = int(i);

  int per_batch = n_persons / n_batches;
  std::vector<double> alphas;
  std::mt19937_64 rng(config.seed ^ 0xa1fa0001ull);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int batch = 0; batch < n_batches; ++batch) {
    ScoreMatrix m;
    m.facet = facet;
    for (const SjtItem* it : facet_items) m.items.push_back(it->item_id);
    for (int p = 0; p < per_batch; ++p) {
      double theta = normal(rng);
      (void)facet_index;
      std::vector<int> row;
      for (size_t j = 0; j < params.size(); ++j) {
        double prob = 1.0 / (1.0 + std::exp(-params[j].discrimination *
                                            (theta - params[j].difficulty)));
        row.push_back(unif(rng) < prob ? 1 : 0);
      }
      m.persons.push_back("p");
      m.cells.push_back(std::move(row));
    }
    alphas.push_back(cronbach_alpha(m));
  }

  AlphaEstimate est;
  for (double a : alphas) est.alpha += a;
  est.alpha /= double(alphas.size());
  double ss = 0.0;
  for (double a : alphas) ss += (a - est.alpha) * (a - est.alpha);
  est.standard_error =
      std::sqrt(ss / double(alphas.size() - 1) / double(alphas.size()));
  return est;
}

// ---- synthetic expert-rating fixtures (Study 1 drivers) ----

/// Categorical quality profile per indicator; drives seeded rating draws.
struct QualityProfile {
  std::array<double, 3> necessity_probs = {0.8, 0.15, 0.05};  // 1,2,3
  std::array<double, 5> options_probs = {0.0, 0.05, 0.1, 0.25, 0.6};  // 0..4
  std::array<double, 5> scoring_probs = {0.0, 0.05, 0.1, 0.25, 0.6};
  double overall_yes = 0.8;

  static QualityProfile ceiling() {
    return {{1.0, 0.0, 0.0}, {0, 0, 0, 0, 1.0}, {0, 0, 0, 0, 1.0}, 1.0};
  }
  static QualityProfile low() {
    return {{0.2, 0.4, 0.4}, {0.2, 0.3, 0.3, 0.15, 0.05},
            {0.2, 0.3, 0.3, 0.15, 0.05}, 0.25};
  }
  static QualityProfile mid() {
    return {{0.5, 0.3, 0.2}, {0.05, 0.1, 0.3, 0.35, 0.2},
            {0.05, 0.1, 0.3, 0.35, 0.2}, 0.55};
  }
  static QualityProfile high() {
    return {{0.85, 0.1, 0.05}, {0.0, 0.0, 0.1, 0.3, 0.6},
            {0.0, 0.0, 0.1, 0.3, 0.6}, 0.9};
  }
};

struct RatingFixture {
  std::vector<ExpertRating> ratings;
  std::map<std::string, std::string> group_map;  // item_id -> group_label
};

template <typename Rng>
inline int draw_categorical(Rng& rng, const double* probs, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng), cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return n - 1;
}

inline RatingFixture simulate_expert_ratings(
    const std::vector<std::pair<std::string, QualityProfile>>& groups,
    int n_raters = 8, int n_items = 7, uint64_t seed = 1) {
  RatingFixture fx;
  std::mt19937_64 rng(seed);
  for (const auto& [label, profile] : groups) {
    for (int i = 0; i < n_items; ++i) {
      std::string item_id = label + "-" + std::to_string(i + 1);
      fx.group_map[item_id] = label;
      for (int r = 0; r < n_raters; ++r) {
        ExpertRating rating;
        rating.rater_id = "rater" + std::to_string(r + 1);
        rating.item_id = item_id;
        rating.necessity =
            1 + draw_categorical(rng, profile.necessity_probs.data(), 3);
        rating.options_rationality =
            draw_categorical(rng, profile.options_probs.data(), 5);
        rating.scoring_rationality =
            draw_categorical(rng, profile.scoring_probs.data(), 5);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        rating.overall = unif(rng) < profile.overall_yes ? 1 : 0;
        fx.ratings.push_back(std::move(rating));
      }
    }
  }
  return fx;
}

// ---- config file (JSON) ----

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig c;
  c.n_participants = j.value("n_participants", 443);
  c.n_retest = j.value("n_retest", 80);
  if (j.contains("facet_covariance")) {
    const auto& cov = j["facet_covariance"];
    if (cov.size() != 5) throw ConfigError("facet_covariance must be 5x5");
    for (size_t i = 0; i < 5; ++i) {
      if (cov[i].size() != 5) throw ConfigError("facet_covariance must be 5x5");
      for (size_t k = 0; k < 5; ++k) c.facet_covariance[i][k] = cov[i][k];
    }
  }
  if (j.contains("item_params")) {
    for (const auto& [fid, list] : j["item_params"].items()) {
      auto facet = facet_from_id(fid);
      if (!facet) throw ConfigError("unknown facet in item_params: " + fid);
      auto& slot = c.item_params[*facet];
      for (const auto& e : list)
        slot.push_back({e.at("a").get<double>(), e.at("b").get<double>()});
    }
  }
  c.default_discrimination = j.value("default_discrimination", 1.0);
  c.difficulty_spread = j.value("difficulty_spread", 1.0);
  c.likert_items_per_facet = j.value("likert_items_per_facet", 8);
  c.likert_loading = j.value("likert_loading", 1.0);
  if (j.contains("likert_thresholds"))
    for (size_t i = 0; i < 4; ++i) c.likert_thresholds[i] = j["likert_thresholds"][i];
  if (j.contains("criteria")) {
    for (const auto& [name, spec] : j["criteria"].items()) {
      CriterionSpec cs;
      for (size_t i = 0; i < 5; ++i) cs.weights[i] = spec.at("weights")[i];
      cs.noise_sd = spec.value("noise_sd", 1.0);
      cs.n_items = spec.value("n_items", 5);
      c.criteria[name] = cs;
    }
  }
  if (j.contains("retest_stability"))
    for (size_t i = 0; i < 5; ++i) c.retest_stability[i] = j["retest_stability"][i];
  c.underage_rate = j.value("underage_rate", 0.0);
  c.overage_rate = j.value("overage_rate", 0.0);
  c.attention_fail_rate = j.value("attention_fail_rate", 0.0);
  c.fast_responder_rate = j.value("fast_responder_rate", 0.0);
  c.mean_rt_ms = j.value("mean_rt_ms", 3500.0);
  c.rt_sd_ms = j.value("rt_sd_ms", 600.0);
  c.seed = j.value("seed", uint64_t{1});
  return c;
}

}  // namespace sjtforge
