// Copyright 2026 The Nomina Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nomina/nomina.hpp"

namespace {

namespace fs = std::filesystem;
using namespace nomina;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitConfig = 3;

void require_readable(const std::string& path, const std::string& flag) {
  if (path.empty()) {
    throw ConfigError(flag + ": no file given");
  }
  if (!fs::exists(path) || fs::is_directory(path)) {
    throw ConfigError(flag + ": file not found: " + path);
  }
  std::ifstream probe(path);
  if (!probe) {
    throw ConfigError(flag + ": cannot read: " + path);
  }
}

struct RunOptions {
  std::string publications;
  std::string registry;
  std::string vocabulary;
  std::string category_map;
  std::string out_dir = ".";
  int edit_threshold = 0;
  int join_offset = -1;
  int max_authors = 50;
  std::vector<std::string> doc_types = {"article", "review"};
  bool no_force_resolution = false;
  bool drop_unresolved_address = false;
  bool strict_unknown_category = false;
  bool error_on_missing_snapshot = false;
  int threads = 1;
  int verbosity = 0;
};

std::string hash_run_config(const RunOptions& opt) {
  std::string dump;
  dump += "edit_threshold=" + std::to_string(opt.edit_threshold) + "\n";
  dump += "join_offset=" + std::to_string(opt.join_offset) + "\n";
  dump += "max_authors=" + std::to_string(opt.max_authors) + "\n";
  dump += "doc_types=";
  for (const auto& t : opt.doc_types) dump += t + ";";
  dump += "\n";
  dump += "force_resolution=" + std::to_string(!opt.no_force_resolution) + "\n";
  dump += "keep_on_unresolved_address=" + std::to_string(!opt.drop_unresolved_address) + "\n";
  dump += "lenient_unknown_category=" + std::to_string(!opt.strict_unknown_category) + "\n";
  dump += "on_missing_snapshot=" + std::string(opt.error_on_missing_snapshot ? "error" : "empty") + "\n";
  return to_hex(fnv1a64(dump));
}

int cmd_run(const RunOptions& opt) {
  require_readable(opt.publications, "--publications");
  require_readable(opt.registry, "--registry");
  require_readable(opt.vocabulary, "--vocabulary");
  require_readable(opt.category_map, "--category-map");
  if (opt.threads < 1) throw ConfigError("--threads: must be >= 1");
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw ConfigError("--out-dir: cannot create " + opt.out_dir + ": " + ec.message());

  IngestConfig ingest_cfg;
  ingest_cfg.max_authors = opt.max_authors;
  ingest_cfg.doc_type_allowlist = opt.doc_types;
  MatchConfig match_cfg;
  match_cfg.surname_edit_threshold = opt.edit_threshold;
  match_cfg.registry_join_offset = opt.join_offset;
  match_cfg.on_missing_snapshot = opt.error_on_missing_snapshot
                                      ? MatchConfig::MissingSnapshot::raise
                                      : MatchConfig::MissingSnapshot::treat_empty;
  match_cfg.validate();
  PipelineConfig pipe_cfg;
  pipe_cfg.force_resolution = !opt.no_force_resolution;
  pipe_cfg.keep_on_unresolved_address = !opt.drop_unresolved_address;
  pipe_cfg.lenient_unknown_category = !opt.strict_unknown_category;

  auto corpus = parse_publications_file(opt.publications, ingest_cfg);
  auto registry = Registry::parse_file(opt.registry, ingest_cfg.normalization);
  auto rules = load_address_vocabulary_file(opt.vocabulary, ingest_cfg.normalization);
  auto compat = CategoryCompatibility::parse_file(opt.category_map, ingest_cfg.normalization);
  if (opt.verbosity > 0) {
    std::cerr << "loaded " << corpus.publications.size() << " publications ("
              << corpus.exclusions.excluded_total() << " excluded), " << registry.size()
              << " identities, " << rules.size() << " address rules\n";
    for (const auto& flag : registry.load_stats().amalgamations) {
      std::cerr << "amalgamated perfect homonyms into " << flag.primary_id << " (+"
                << flag.merged_ids.size() << ")\n";
    }
  }

  auto result = run_pipeline(corpus.publications, registry, rules, compat, match_cfg,
                             pipe_cfg, opt.threads);

  AuditInfo audit;
  audit.config_hash = hash_run_config(opt);
  audit.input_checksums = {{"publications", checksum_file(opt.publications)},
                           {"registry", checksum_file(opt.registry)},
                           {"vocabulary", checksum_file(opt.vocabulary)},
                           {"category_map", checksum_file(opt.category_map)}};

  fs::path out_dir(opt.out_dir);
  auto open_out = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
  };
  {
    auto out = open_out(out_dir / "mapping.csv");
    write_mapping_csv(out, mapping_rows(result.mapping), &audit);
  }
  {
    auto out = open_out(out_dir / "stage_stats.json");
    write_stage_stats_json(out, result.stats);
  }
  {
    std::size_t address_unresolved = 0;
    for (const auto& state : result.states) {
      if (state.address_unresolved) ++address_unresolved;
    }
    nlohmann::json summary;
    summary["_audit"] = audit.to_json();
    summary["exclusions"] = exclusion_report_json(corpus.exclusions);
    summary["registry"] = {
        {"identities", registry.size()},
        {"amalgamated_groups", registry.load_stats().amalgamations.size()}};
    summary["mapping"] = {{"accepted", result.mapping.accepted.size()},
                          {"orphans", result.mapping.orphans.size()},
                          {"unresolved_clusters", result.mapping.unresolved_clusters.size()},
                          {"eliminated", result.mapping.eliminated.size()},
                          {"address_unresolved_papers", address_unresolved}};
    auto out = open_out(out_dir / "run_summary.json");
    out << summary.dump(2) << '\n';
  }
  std::cerr << "wrote " << (out_dir / "mapping.csv").string() << " ("
            << result.mapping.accepted.size() << " accepted, "
            << result.mapping.orphans.size() << " orphans)\n";
  std::cerr << format_stats_table(result.stats);
  return kExitOk;
}

int cmd_eval(const std::string& mapping_path, const std::string& truth_path,
             const std::string& out_path, const std::string& ledger_path) {
  require_readable(mapping_path, "--mapping");
  require_readable(truth_path, "--truth");
  std::ifstream mapping_in(mapping_path);
  auto rows = read_mapping_csv(mapping_in, mapping_path);
  std::ifstream truth_in(truth_path);
  auto truth = read_truth_csv(truth_in, truth_path);
  auto detail = compare_rows_to_truth(rows, truth);
  auto report = evaluate(detail);
  if (!ledger_path.empty()) {
    require_readable(ledger_path, "--ledger");
    std::ifstream ledger_in(ledger_path);
    nlohmann::json ledger_json;
    TruthLedger ledger;
    try {
      ledger_in >> ledger_json;
      ledger = TruthLedger::from_json(ledger_json);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(ledger_path, 0, std::string("bad ledger JSON: ") + e.what());
    }
    report.fn_causes = tag_fn_causes(detail, ledger.cause_map());
  }
  AuditInfo audit;
  audit.input_checksums = {{"mapping", checksum_file(mapping_path)},
                           {"truth", checksum_file(truth_path)}};
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("--out: cannot write: " + out_path);
  out << evaluation_report_json(report, &audit).dump(2) << '\n';
  std::cerr << format_evaluation(report) << '\n';
  std::cerr << "wrote " << out_path << '\n';
  return kExitOk;
}

int cmd_sample_size(double population, std::optional<double> confidence,
                    std::optional<double> z, double error, double heterogeneity) {
  double z_value;
  if (z) {
    z_value = *z;
  } else if (confidence) {
    z_value = z_for_confidence(*confidence);
  } else {
    throw ConfigError("pass either --confidence or --z");
  }
  SamplingParameters params{population, z_value, error, heterogeneity};
  auto n = sample_size(params);
  std::cout << n << '\n';
  std::cerr << "n=" << n << " (N=" << population << " Z=" << z_value << " e=" << error
            << " p=" << heterogeneity << ")\n";
  return kExitOk;
}

int cmd_synth(const SyntheticConfig& cfg, const std::string& out_dir) {
  auto bundle = generate_synthetic_corpus(cfg);
  bundle.write_to_dir(out_dir);
  std::cerr << "wrote synthetic bundle to " << out_dir << ": "
            << bundle.publications.size() << " publications, "
            << bundle.registry_rows.size() << " registry rows, "
            << bundle.ledger.truth.size() << " truth pairs\n";
  return kExitOk;
}

int cmd_stats(const std::string& input) {
  require_readable(input, "--input");
  std::ifstream in(input);
  auto stats = parse_stage_stats_json(in, input);
  std::cout << format_stats_table(stats);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nomina: deterministic author-name disambiguation engine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file; flags override")
      ->envname("NOMINA_CONFIG");

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "run the full disambiguation pipeline");
  run->add_option("--publications", run_opt.publications, "publication corpus (CSV or JSONL)");
  run->add_option("--registry", run_opt.registry, "identity registry CSV");
  run->add_option("--vocabulary", run_opt.vocabulary, "address controlled-vocabulary CSV");
  run->add_option("--category-map", run_opt.category_map, "category-SDS compatibility CSV");
  run->add_option("--out-dir", run_opt.out_dir, "output directory");
  run->add_option("--edit-threshold", run_opt.edit_threshold,
                  "surname edit-distance budget (0-2)");
  run->add_option("--join-offset", run_opt.join_offset,
                  "registry snapshot year = publication year + offset");
  run->add_option("--max-authors", run_opt.max_authors, "exclude records with more authors");
  run->add_option("--doc-types", run_opt.doc_types, "doc types to keep")->delimiter(',');
  run->add_flag("--no-force-resolution", run_opt.no_force_resolution,
                "report undecidable clusters instead of tie-breaking");
  run->add_flag("--drop-unresolved-address", run_opt.drop_unresolved_address,
                "eliminate pairs when no address resolves");
  run->add_flag("--strict-unknown-category", run_opt.strict_unknown_category,
                "treat unmapped categories as incompatible");
  run->add_flag("--error-on-missing-snapshot", run_opt.error_on_missing_snapshot,
                "fail when the joined registry year is absent");
  run->add_option("--threads", run_opt.threads, "worker threads");
  run->add_flag("-v,--verbose", run_opt.verbosity, "verbose diagnostics");

  std::string eval_mapping, eval_truth, eval_ledger;
  std::string eval_out = "evaluation.json";
  auto* eval_cmd = app.add_subcommand("eval", "score a mapping against ground truth");
  eval_cmd->add_option("--mapping", eval_mapping, "mapping CSV from a run");
  eval_cmd->add_option("--truth", eval_truth, "ground-truth CSV (or another mapping)");
  eval_cmd->add_option("--out", eval_out, "evaluation report JSON path");
  eval_cmd->add_option("--ledger", eval_ledger,
                       "synthetic ledger JSON for false-negative cause tagging");

  double ss_population = 0;
  std::optional<double> ss_confidence, ss_z;
  double ss_error = 0, ss_heterogeneity = 0;
  auto* ss = app.add_subcommand("sample-size", "sample size for error quantification");
  ss->add_option("--population", ss_population, "population size N")->required();
  ss->add_option("--confidence", ss_confidence, "confidence level (0.90/0.95/0.98/0.99)");
  ss->add_option("--z", ss_z, "standard-normal quantile, overrides --confidence");
  ss->add_option("--error", ss_error, "sampling error e")->required();
  ss->add_option("--heterogeneity", ss_heterogeneity, "population heterogeneity p")
      ->required();

  SyntheticConfig synth_cfg;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  synth->add_option("--out-dir", synth_out, "bundle output directory");
  synth->add_option("--identities", synth_cfg.n_identities, "base identity count");
  synth->add_option("--publications", synth_cfg.n_publications, "publication count");
  synth->add_option("--seed", synth_cfg.rng_seed, "generator seed (default 1)");
  synth->add_option("--year", synth_cfg.publication_year, "publication year");
  synth->add_option("--external-homonym-rate", synth_cfg.external_homonym_rate, "");
  synth->add_option("--inter-address-homonym-rate", synth_cfg.inter_address_homonym_rate, "");
  synth->add_option("--intra-address-homonym-rate", synth_cfg.intra_address_homonym_rate, "");
  synth->add_option("--perfect-homonym-rate", synth_cfg.perfect_homonym_rate, "");
  synth->add_option("--compound-surname-rate", synth_cfg.compound_surname_rate, "");
  synth->add_option("--multi-first-name-rate", synth_cfg.multi_first_name_rate, "");
  synth->add_option("--wrong-affiliation-rate", synth_cfg.wrong_affiliation_rate, "");
  synth->add_option("--cross-category-rate", synth_cfg.cross_category_publish_rate, "");
  synth->add_option("--address-garble-rate", synth_cfg.address_garble_rate, "");
  synth->add_option("--source-address-error-rate", synth_cfg.source_address_error_rate, "");
  synth->add_option("--source-name-error-rate", synth_cfg.source_name_error_rate, "");
  synth->add_option("--name-match-error-rate", synth_cfg.name_match_error_rate, "");

  std::string stats_input;
  auto* stats = app.add_subcommand("stats", "pretty-print a stage-stats JSON file");
  stats->add_option("--input", stats_input, "stage_stats.json from a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (eval_cmd->parsed()) return cmd_eval(eval_mapping, eval_truth, eval_out, eval_ledger);
    if (ss->parsed()) {
      return cmd_sample_size(ss_population, ss_confidence, ss_z, ss_error, ss_heterogeneity);
    }
    if (synth->parsed()) return cmd_synth(synth_cfg, synth_out);
    if (stats->parsed()) return cmd_stats(stats_input);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
