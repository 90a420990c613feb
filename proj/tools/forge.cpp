// forge: command-line pipeline for SJT item generation, content-validity
// analysis, psychometric analysis and synthetic data simulation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sjtforge/content_validity.hpp"
#include "sjtforge/csv.hpp"
#include "sjtforge/item_model.hpp"
#include "sjtforge/item_parser.hpp"
#include "sjtforge/llm_gateway.hpp"
#include "sjtforge/llm_http.hpp"
#include "sjtforge/prompt_forge.hpp"
#include "sjtforge/psychometrics.hpp"
#include "sjtforge/report.hpp"
#include "sjtforge/respondent_sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sjtforge::Facet parse_facet(const std::string& id) {
  auto f = sjtforge::facet_from_id(id);
  if (!f) throw CLI::ValidationError("--facet", "unknown facet: " + id);
  return *f;
}

// Advisory lock: one forge run per workspace directory at a time.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const fs::path& dir) : path_(dir / ".forge.lock") {
    fs::create_directories(dir);
    if (fs::exists(path_))
      throw std::runtime_error("workspace locked: " + path_.string() +
                               " exists (stale lock? remove it)");
    std::ofstream(path_) << "locked\n";
  }
  ~WorkspaceLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }

 private:
  fs::path path_;
};

void write_manifest(const fs::path& dir, const std::string& command,
                    const ordered_json& inputs) {
  ordered_json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["schema_version"] = 1;
  sjtforge::report::write_file((dir / "run_manifest.json").string(),
                               m.dump(2) + "\n");
}

std::string hash_of_file(const std::string& path) {
  return sjtforge::prompt_hash(read_file(path));
}

// Likert facet totals from participant meta, using the
// "<facet_id>-L<k>" instrument item id convention.
std::map<sjtforge::Facet, std::vector<double>> likert_totals(
    const std::map<std::string, sjtforge::ParticipantMeta>& meta,
    const std::vector<std::string>& participants) {
  std::map<sjtforge::Facet, std::vector<double>> out;
  for (sjtforge::Facet f : sjtforge::all_facets) {
    std::string prefix = std::string(sjtforge::facet_id(f)) + "-L";
    std::vector<double> totals;
    for (const auto& pid : participants) {
      double sum = 0.0;
      for (const auto& [id, v] : meta.at(pid).likert_responses)
        if (id.rfind(prefix, 0) == 0) sum += v;
      totals.push_back(sum);
    }
    out[f] = std::move(totals);
  }
  return out;
}

// Criterion totals keyed by the "<name>-<k>" convention.
std::vector<std::pair<std::string, std::vector<double>>> criterion_totals(
    const std::map<std::string, sjtforge::ParticipantMeta>& meta,
    const std::vector<std::string>& participants) {
  std::set<std::string> names;
  for (const auto& pid : participants)
    for (const auto& [id, _] : meta.at(pid).criterion_responses) {
      auto dash = id.rfind('-');
      if (dash != std::string::npos) names.insert(id.substr(0, dash));
    }
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (const auto& name : names) {
    std::vector<double> totals;
    for (const auto& pid : participants) {
      double sum = 0.0;
      for (const auto& [id, v] : meta.at(pid).criterion_responses)
        if (id.rfind(name + "-", 0) == 0) sum += v;
      totals.push_back(sum);
    }
    out.emplace_back(name, std::move(totals));
  }
  return out;
}

int cmd_prompt(const std::string& version, const std::string& facet,
               const std::string& spec_file) {
  sjtforge::PromptSpec spec;
  if (!spec_file.empty()) {
    spec = sjtforge::prompt_spec_from_json(json::parse(read_file(spec_file)));
  } else {
    auto v = sjtforge::prompt_version_from_id(version);
    if (!v) throw CLI::ValidationError("--version", "expected v0|v1|v2");
    spec = sjtforge::default_prompt_spec(*v, parse_facet(facet));
  }
  std::cout << sjtforge::build_prompt(spec);
  return 0;
}

int cmd_generate(const std::string& mock_file, const std::string& endpoint,
                 const std::string& version, double temperature, int per_facet,
                 const std::string& bank_id, const std::string& out_path,
                 uint64_t seed) {
  auto v = sjtforge::prompt_version_from_id(version);
  if (!v) throw CLI::ValidationError("--version", "expected v0|v1|v2");

  sjtforge::GenParams params;
  params.temperature = temperature;
  if (!endpoint.empty()) params.endpoint_url = endpoint;

  sjtforge::Transport transport;
  if (!mock_file.empty()) {
    transport = sjtforge::mock_transport(
        sjtforge::MockScript::from_json(json::parse(read_file(mock_file))));
    params.backoff_base = std::chrono::milliseconds(1);
  } else if (!endpoint.empty()) {
    transport = sjtforge::http_transport(endpoint);
  } else {
    throw CLI::ValidationError("--mock/--endpoint",
                               "either a mock script or an endpoint is required");
  }
  sjtforge::Gateway gateway(transport, seed);

  sjtforge::ItemBank bank;
  bank.bank_id = bank_id;
  for (sjtforge::Facet f : sjtforge::all_facets) {
    sjtforge::PromptSpec spec = sjtforge::default_prompt_spec(*v, f);
    auto [items, diag] = sjtforge::generate_items(gateway, spec, params, per_facet);
    for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& issue : diag.issues)
      std::cerr << "rejected scenario " << issue.scenario_index << " ["
                << issue.code << "] " << issue.excerpt << "\n";
    auto& layout = bank.facet_layout[f];
    for (auto& item : items) {
      layout.push_back(item.item_id);
      bank.items.push_back(std::move(item));
    }
  }

  sjtforge::report::write_file(out_path, sjtforge::serialize_bank(bank));
  std::cout << "wrote " << bank.items.size() << " items to " << out_path << "\n";
  return 0;
}

int cmd_parse(const std::string& in_path, const std::string& facet,
              const std::string& out_path) {
  sjtforge::ParsedCompletion parsed =
      sjtforge::parse_items(read_file(in_path), parse_facet(facet));

  sjtforge::ItemBank bank;
  bank.bank_id = fs::path(in_path).stem().string();
  for (auto& item : parsed.items) bank.items.push_back(std::move(item));
  sjtforge::report::write_file(out_path, sjtforge::serialize_bank(bank));

  ordered_json issues = ordered_json::array();
  for (const auto& i : parsed.issues)
    issues.push_back({{"scenario_index", i.scenario_index},
                      {"code", i.code},
                      {"excerpt", i.excerpt}});
  sjtforge::report::write_file(out_path + ".issues.json", issues.dump(2) + "\n");

  std::cout << "accepted " << bank.items.size() << " of " << parsed.block_count
            << " blocks; " << parsed.issues.size() << " issues\n";
  return 0;
}

int cmd_cv(const std::string& ratings_path, const std::string& groups_path,
           const std::string& out_dir) {
  WorkspaceLock lock{fs::path(out_dir)};

  auto ratings = sjtforge::ratings_from_csv(sjtforge::csv::read_file(ratings_path));
  auto groups = sjtforge::group_map_from_csv(sjtforge::csv::read_file(groups_path));
  auto agg = sjtforge::aggregate_ratings(ratings, groups);
  for (const auto& w : agg.warnings) std::cerr << "warning: " << w << "\n";

  auto labels = sjtforge::group_labels_in_order(agg.summaries);
  fs::path dir(out_dir);

  if (labels.size() == 2) {
    std::vector<sjtforge::ItemCvSummary> a, b;
    for (const auto& s : agg.summaries)
      (s.group_label == labels[0] ? a : b).push_back(s);
    auto stability = sjtforge::compare_two(a, b);
    sjtforge::report::write_file((dir / "stability.md").string(),
                                 sjtforge::report::stability_markdown(stability));
  } else {
    auto report = sjtforge::compare_groups(agg.summaries);
    sjtforge::report::write_file((dir / "study1_comparison.md").string(),
                                 sjtforge::report::study1_markdown(report));
    sjtforge::report::write_file(
        (dir / "study1_comparison.csv").string(),
        sjtforge::csv::write(sjtforge::report::study1_csv(report)));
  }

  write_manifest(dir, "cv",
                 {{"ratings", hash_of_file(ratings_path)},
                  {"groups", hash_of_file(groups_path)}});
  std::cout << "content-validity reports written to " << out_dir << "\n";
  return 0;
}

int cmd_psych(const std::string& bank_path, const std::string& responses_path,
              const std::string& meta_path, const std::string& out_dir) {
  WorkspaceLock lock{fs::path(out_dir)};

  auto bank = sjtforge::parse_bank(read_file(bank_path));
  auto records =
      sjtforge::responses_from_csv(sjtforge::csv::read_file(responses_path));
  auto meta = sjtforge::meta_from_csv(sjtforge::csv::read_file(meta_path));

  auto filter = sjtforge::apply_inclusion_filters(records, meta);
  std::cerr << "retained " << filter.retained.size() << ", excluded "
            << filter.excluded.size() << " participants\n";

  auto test = sjtforge::build_score_matrix(records, bank, sjtforge::Session::test,
                                           filter.retained);
  auto retest = sjtforge::build_score_matrix(records, bank,
                                             sjtforge::Session::retest,
                                             filter.retained);
  for (const auto& w : test.warnings) std::cerr << "warning: " << w << "\n";

  sjtforge::ReliabilityReport reliability;
  std::map<sjtforge::Facet, std::vector<double>> sjt_totals;
  std::vector<std::string> aligned;  // participants present in every facet
  for (sjtforge::Facet f : sjtforge::all_facets) {
    const auto& m = test.matrices.at(f);
    if (aligned.empty()) aligned = m.persons;
    sjtforge::FacetReliability rel;
    rel.cronbach_alpha = sjtforge::cronbach_alpha(m);
    rel.guttman_split_half = sjtforge::guttman_split_half(m);
    rel.item_total = sjtforge::item_total_correlations(m);

    auto rm = retest.matrices.find(f);
    if (rm != retest.matrices.end() && rm->second.persons.size() >= 3) {
      // pair totals on the participants present in both sessions
      std::map<std::string, double> test_by_pid;
      auto totals = m.person_totals();
      for (size_t i = 0; i < m.persons.size(); ++i)
        test_by_pid[m.persons[i]] = totals[i];
      std::vector<double> t2, r2;
      auto retotals = rm->second.person_totals();
      for (size_t i = 0; i < rm->second.persons.size(); ++i) {
        auto it = test_by_pid.find(rm->second.persons[i]);
        if (it == test_by_pid.end()) continue;
        t2.push_back(it->second);
        r2.push_back(retotals[i]);
      }
      if (t2.size() >= 3) {
        rel.icc_2_1 = sjtforge::icc(t2, r2,
                                    sjtforge::IccModel::two_way_random_agreement);
        rel.icc_3_1 = sjtforge::icc(t2, r2,
                                    sjtforge::IccModel::two_way_mixed_consistency);
      }
    }
    reliability[f] = std::move(rel);

    std::map<std::string, double> by_pid;
    auto totals = m.person_totals();
    for (size_t i = 0; i < m.persons.size(); ++i) by_pid[m.persons[i]] = totals[i];
    std::vector<double> ordered;
    for (const auto& pid : aligned) ordered.push_back(by_pid.at(pid));
    sjt_totals[f] = std::move(ordered);
  }

  fs::path dir(out_dir);
  sjtforge::report::write_file((dir / "reliability.md").string(),
                               sjtforge::report::reliability_markdown(reliability));

  auto likert = likert_totals(meta, aligned);
  auto mtmm = sjtforge::mtmm_matrix(sjt_totals, likert);
  sjtforge::report::write_file((dir / "mtmm.md").string(),
                               sjtforge::report::mtmm_markdown(mtmm));
  auto summary = sjtforge::mtmm_summary(mtmm);
  std::cerr << "convergent mean " << summary.convergent_mean << " (sd "
            << summary.convergent_sd << "); discriminant |r| "
            << summary.discriminant_mean_abs_method_a << " (SJT) / "
            << summary.discriminant_mean_abs_method_b << " (Likert)\n";

  auto criteria = criterion_totals(meta, aligned);
  if (!criteria.empty()) {
    auto table = sjtforge::criterion_correlations(sjt_totals, criteria);
    sjtforge::report::write_file((dir / "criterion.md").string(),
                                 sjtforge::report::criterion_markdown(table));
  }

  write_manifest(dir, "psych",
                 {{"bank", hash_of_file(bank_path)},
                  {"responses", hash_of_file(responses_path)},
                  {"meta", hash_of_file(meta_path)}});
  std::cout << "psychometric reports written to " << out_dir << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& bank_path,
                 const std::string& out_dir, uint64_t seed_override,
                 bool has_seed) {
  WorkspaceLock lock{fs::path(out_dir)};

  auto config = sjtforge::sim_config_from_json(json::parse(read_file(config_path)));
  if (has_seed) config.seed = seed_override;
  auto bank = sjtforge::parse_bank(read_file(bank_path));
  auto out = sjtforge::simulate(config, bank);

  sjtforge::csv::Table responses;
  responses.header = {"participant_id", "item_id", "choice", "response_time_ms",
                      "session"};
  for (const auto& r : out.records)
    responses.rows.push_back({r.participant_id, r.item_id,
                              std::string(1, r.choice),
                              std::to_string(r.response_time_ms),
                              sjtforge::session_id(r.session)});

  // meta columns: fixed prefix + every instrument item id seen
  std::set<std::string> likert_ids, criterion_ids;
  for (const auto& [_, m] : out.meta) {
    for (const auto& [id, __] : m.likert_responses) likert_ids.insert(id);
    for (const auto& [id, __] : m.criterion_responses) criterion_ids.insert(id);
  }
  sjtforge::csv::Table meta;
  meta.header = {"participant_id", "age", "attention_passed"};
  for (const auto& id : likert_ids) meta.header.push_back("likert:" + id);
  for (const auto& id : criterion_ids) meta.header.push_back("criterion:" + id);
  for (const auto& pid : out.participant_order) {
    const auto& m = out.meta.at(pid);
    std::vector<std::string> row = {pid, std::to_string(m.age),
                                    m.attention_checks_passed ? "1" : "0"};
    for (const auto& id : likert_ids) {
      auto it = m.likert_responses.find(id);
      row.push_back(it == m.likert_responses.end() ? ""
                                                   : std::to_string(it->second));
    }
    for (const auto& id : criterion_ids) {
      auto it = m.criterion_responses.find(id);
      row.push_back(it == m.criterion_responses.end()
                        ? ""
                        : std::to_string(it->second));
    }
    meta.rows.push_back(std::move(row));
  }

  fs::path dir(out_dir);
  sjtforge::report::write_file((dir / "responses.csv").string(),
                               sjtforge::csv::write(responses));
  sjtforge::report::write_file((dir / "meta.csv").string(),
                               sjtforge::csv::write(meta));

  write_manifest(dir, "simulate",
                 {{"config", hash_of_file(config_path)},
                  {"bank", hash_of_file(bank_path)},
                  {"seed", config.seed}});
  std::cout << "simulated " << out.participant_order.size()
            << " participants into " << out_dir << "\n";
  return 0;
}

int cmd_simulate_ratings(const std::string& groups_spec, int n_raters,
                         int n_items, uint64_t seed,
                         const std::string& ratings_out,
                         const std::string& groups_out) {
  std::vector<std::pair<std::string, sjtforge::QualityProfile>> groups;
  std::stringstream ss(groups_spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--groups-spec", "expected label:profile pairs");
    std::string label = part.substr(0, colon), profile = part.substr(colon + 1);
    sjtforge::QualityProfile qp;
    if (profile == "ceiling") qp = sjtforge::QualityProfile::ceiling();
    else if (profile == "low") qp = sjtforge::QualityProfile::low();
    else if (profile == "mid") qp = sjtforge::QualityProfile::mid();
    else if (profile == "high") qp = sjtforge::QualityProfile::high();
    else throw CLI::ValidationError("--groups-spec",
                                    "unknown profile: " + profile);
    groups.emplace_back(label, qp);
  }

  auto fx = sjtforge::simulate_expert_ratings(groups, n_raters, n_items, seed);

  sjtforge::csv::Table ratings;
  ratings.header = {"rater_id", "item_id", "necessity", "options_rationality",
                    "scoring_rationality", "overall"};
  for (const auto& r : fx.ratings)
    ratings.rows.push_back({r.rater_id, r.item_id, std::to_string(r.necessity),
                            std::to_string(r.options_rationality),
                            std::to_string(r.scoring_rationality),
                            std::to_string(r.overall)});
  sjtforge::csv::Table group_map;
  group_map.header = {"item_id", "group_label"};
  for (const auto& [item, label] : fx.group_map)
    group_map.rows.push_back({item, label});

  sjtforge::report::write_file(ratings_out, sjtforge::csv::write(ratings));
  sjtforge::report::write_file(groups_out, sjtforge::csv::write(group_map));
  std::cout << "wrote " << fx.ratings.size() << " ratings\n";
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_path) {
  std::ostringstream out;
  out << "# Analysis report\n\n";
  std::vector<fs::path> parts;
  for (const auto& entry : fs::directory_iterator(in_dir))
    if (entry.path().extension() == ".md") parts.push_back(entry.path());
  std::sort(parts.begin(), parts.end());
  for (const auto& p : parts) out << read_file(p.string()) << "\n";
  fs::path manifest = fs::path(in_dir) / "run_manifest.json";
  if (fs::exists(manifest))
    out << "## Run manifest\n\n```json\n" << read_file(manifest.string())
        << "```\n";
  sjtforge::report::write_file(out_path, out.str());
  std::cout << "merged report written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SJT item generation and validation pipeline"};
  app.require_subcommand(1);

  std::string version = "v2", facet = "self_consciousness", spec_file;
  auto* prompt = app.add_subcommand("prompt", "print an assembled prompt");
  prompt->add_option("--version", version, "prompt version v0|v1|v2");
  prompt->add_option("--facet", facet, "target facet");
  prompt->add_option("--spec", spec_file, "prompt spec JSON file");

  std::string mock_file, endpoint, bank_id = "bank", out_path = "bank.json";
  double temperature = 1.0;
  int per_facet = 8;
  uint64_t seed = 1;
  auto* generate = app.add_subcommand("generate", "generate an item bank");
  generate->add_option("--mock", mock_file, "mock completion script");
  generate->add_option("--endpoint", endpoint, "chat-completions endpoint URL");
  generate->add_option("--version", version, "prompt version");
  generate->add_option("--temperature", temperature, "sampling temperature");
  generate->add_option("--per-facet", per_facet, "items per facet");
  generate->add_option("--bank-id", bank_id, "bank identifier");
  generate->add_option("--out", out_path, "output bank file");
  generate->add_option("--seed", seed, "retry-jitter seed");

  std::string in_path;
  auto* parse = app.add_subcommand("parse", "parse a raw completion file");
  parse->add_option("--in", in_path, "completion text file")->required();
  parse->add_option("--facet", facet, "target facet");
  parse->add_option("--out", out_path, "output bank file");

  std::string ratings_path, groups_path, out_dir = "report";
  auto* cv = app.add_subcommand("cv", "content-validity analysis");
  cv->add_option("--ratings", ratings_path, "expert ratings CSV")->required();
  cv->add_option("--groups", groups_path, "item group map CSV")->required();
  cv->add_option("--out", out_dir, "report directory");

  std::string bank_path, responses_path, meta_path;
  auto* psych = app.add_subcommand("psych", "psychometric analysis");
  psych->add_option("--bank", bank_path, "item bank JSON")->required();
  psych->add_option("--responses", responses_path, "responses CSV")->required();
  psych->add_option("--meta", meta_path, "participant meta CSV")->required();
  psych->add_option("--out", out_dir, "report directory");

  std::string config_path, groups_spec, groups_out = "groups.csv";
  int n_raters = 8, n_items = 7;
  auto* simulate = app.add_subcommand("simulate", "simulate respondent data");
  simulate->add_option("--config", config_path, "simulator config JSON");
  simulate->add_option("--bank", bank_path, "item bank JSON");
  simulate->add_option("--out", out_dir, "data directory");
  auto* seed_opt = simulate->add_option("--seed", seed, "override config seed");
  simulate->add_option("--groups-spec", groups_spec,
                       "expert-rating fixture spec label:profile,...");
  simulate->add_option("--ratings-out", ratings_path,
                       "expert-rating CSV output");
  simulate->add_option("--groups-out", groups_out, "group map CSV output");
  simulate->add_option("--raters", n_raters, "raters per item");
  simulate->add_option("--items", n_items, "items per group");

  std::string in_dir;
  auto* report_cmd = app.add_subcommand("report", "merge reports into one file");
  report_cmd->add_option("--in", in_dir, "report directory")->required();
  report_cmd->add_option("--out", out_path, "merged markdown file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prompt->parsed()) return cmd_prompt(version, facet, spec_file);
    if (generate->parsed())
      return cmd_generate(mock_file, endpoint, version, temperature, per_facet,
                          bank_id, out_path, seed);
    if (parse->parsed()) return cmd_parse(in_path, facet, out_path);
    if (cv->parsed()) return cmd_cv(ratings_path, groups_path, out_dir);
    if (psych->parsed())
      return cmd_psych(bank_path, responses_path, meta_path, out_dir);
    if (simulate->parsed()) {
      if (!groups_spec.empty())
        return cmd_simulate_ratings(groups_spec, n_raters, n_items, seed,
                                    ratings_path, groups_out);
      return cmd_simulate(config_path, bank_path, out_dir, seed,
                          seed_opt->count() > 0);
    }
    if (report_cmd->parsed()) return cmd_report(in_dir, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
