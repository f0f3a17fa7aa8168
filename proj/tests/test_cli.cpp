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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "nomina/nomina.hpp"
#include "test_util.hpp"

namespace nomina {
namespace {

using testutil::golden_dir;
using testutil::run_cli;
using testutil::slurp;
using testutil::TempDir;

std::string golden_run_args(const std::filesystem::path& out_dir) {
  return "run --publications " + (golden_dir() / "publications.csv").string() +
         " --registry " + (golden_dir() / "registry.csv").string() + " --vocabulary " +
         (golden_dir() / "vocabulary.csv").string() + " --category-map " +
         (golden_dir() / "category_map.csv").string() + " --out-dir " + out_dir.string();
}

TEST(CliRun, GoldenFixtureProducesFourAcceptedRows) {
  TempDir dir("cli_run");
  auto result = run_cli(golden_run_args(dir.path), "golden_run");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  std::ifstream mapping_in(dir.path / "mapping.csv");
  auto rows = read_mapping_csv(mapping_in);
  int accepted = 0;
  for (const auto& row : rows) {
    if (row.pub_id == "PRB-69-045412" && row.status == "accepted") ++accepted;
  }
  EXPECT_EQ(accepted, 4);
  ASSERT_TRUE(std::filesystem::exists(dir.path / "stage_stats.json"));
  std::ifstream stats_in(dir.path / "stage_stats.json");
  auto stats = parse_stage_stats_json(stats_in);
  ASSERT_EQ(stats.size(), 5u);
  std::ifstream summary_in(dir.path / "run_summary.json");
  nlohmann::json summary;
  summary_in >> summary;
  EXPECT_EQ(summary["mapping"]["accepted"], 5);
  EXPECT_TRUE(summary.contains("_audit"));
}

TEST(CliRun, MissingRegistryIsConfigError) {
  TempDir dir("cli_missing");
  std::string args = "run --publications " + (golden_dir() / "publications.csv").string() +
                     " --registry /nonexistent/registry.csv --vocabulary " +
                     (golden_dir() / "vocabulary.csv").string() + " --category-map " +
                     (golden_dir() / "category_map.csv").string() + " --out-dir " +
                     dir.path.string();
  auto result = run_cli(args, "missing_registry");
  EXPECT_EQ(result.exit_code, 3);
  EXPECT_NE(result.err.find("--registry"), std::string::npos);
}

TEST(CliRun, MalformedInputIsFormatError) {
  TempDir dir("cli_badfile");
  auto bad_pubs = dir.path / "bad.csv";
  std::ofstream(bad_pubs) << "pub_id,year,doc_type,authors,addresses,subject_categories\n"
                          << "P1,borked,article,A B,addr,Physics\n";
  std::string args = "run --publications " + bad_pubs.string() + " --registry " +
                     (golden_dir() / "registry.csv").string() + " --vocabulary " +
                     (golden_dir() / "vocabulary.csv").string() + " --category-map " +
                     (golden_dir() / "category_map.csv").string() + " --out-dir " +
                     dir.path.string();
  auto result = run_cli(args, "bad_pubs");
  EXPECT_EQ(result.exit_code, 2);
}

TEST(CliRun, ApiAndCliProduceIdenticalMapping) {
  TempDir dir("cli_golden_eq");
  auto result = run_cli(golden_run_args(dir.path), "golden_eq");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  auto fx = testutil::load_golden();
  auto api_result = run_pipeline(fx.corpus.publications, fx.registry, fx.rules, fx.compat);
  std::ostringstream api_csv;
  write_mapping_csv(api_csv, mapping_rows(api_result.mapping));
  // The CLI file carries audit comment lines; the records must be identical.
  std::string cli_text = slurp(dir.path / "mapping.csv");
  std::string stripped;
  std::istringstream cli_in(cli_text);
  std::string line;
  while (std::getline(cli_in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    stripped += line;
    stripped += '\n';
  }
  EXPECT_EQ(stripped, api_csv.str());
}

TEST(CliRun, ThreadCountDoesNotChangeOutput) {
  TempDir dir1("cli_t1");
  TempDir dir4("cli_t4");
  ASSERT_EQ(run_cli(golden_run_args(dir1.path) + " --threads 1", "t1").exit_code, 0);
  ASSERT_EQ(run_cli(golden_run_args(dir4.path) + " --threads 4", "t4").exit_code, 0);
  EXPECT_EQ(slurp(dir1.path / "mapping.csv"), slurp(dir4.path / "mapping.csv"));
  EXPECT_EQ(slurp(dir1.path / "stage_stats.json"), slurp(dir4.path / "stage_stats.json"));
}

TEST(CliEval, GoldenFixturePerfectRound) {
  TempDir dir("cli_eval");
  ASSERT_EQ(run_cli(golden_run_args(dir.path), "eval_prep").exit_code, 0);
  auto report_path = dir.path / "evaluation.json";
  std::string args = "eval --mapping " + (dir.path / "mapping.csv").string() + " --truth " +
                     (golden_dir() / "truth.csv").string() + " --out " + report_path.string();
  auto result = run_cli(args, "eval_golden");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  std::ifstream report_in(report_path);
  nlohmann::json report;
  report_in >> report;
  EXPECT_EQ(report["tp"], 5);
  EXPECT_EQ(report["fp"], 0);
  EXPECT_EQ(report["fn"], 0);
  EXPECT_DOUBLE_EQ(report["precision"].get<double>(), 1.0);
}

TEST(CliEval, MappingAgainstItselfIsPerfect) {
  TempDir dir("cli_eval_self");
  ASSERT_EQ(run_cli(golden_run_args(dir.path), "eval_self_prep").exit_code, 0);
  auto report_path = dir.path / "self.json";
  std::string mapping = (dir.path / "mapping.csv").string();
  auto result = run_cli("eval --mapping " + mapping + " --truth " + mapping + " --out " +
                            report_path.string(),
                        "eval_self");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  std::ifstream report_in(report_path);
  nlohmann::json report;
  report_in >> report;
  EXPECT_DOUBLE_EQ(report["precision"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(report["recall"].get<double>(), 1.0);
}

TEST(CliEval, FormatMismatchExitsTwo) {
  TempDir dir("cli_eval_bad");
  auto junk = dir.path / "junk.csv";
  std::ofstream(junk) << "a,b\n1,2\n";
  auto result = run_cli("eval --mapping " + junk.string() + " --truth " + junk.string() +
                            " --out " + (dir.path / "r.json").string(),
                        "eval_bad");
  EXPECT_EQ(result.exit_code, 2);
}

TEST(CliSampleSize, ReferenceValueOnStdout) {
  auto result = run_cli(
      "sample-size --population 406534 --z 2.33 --error 0.03 --heterogeneity 0.12",
      "ss_paper");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_EQ(result.out, "636\n");
  EXPECT_NE(result.err.find("N=406534"), std::string::npos);
}

TEST(CliSampleSize, ConfidenceMapping) {
  auto result = run_cli(
      "sample-size --population 10000 --confidence 0.95 --error 0.05 --heterogeneity 0.5",
      "ss_conf");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_EQ(result.out, "370\n");
}

TEST(CliSampleSize, ZeroHeterogeneity) {
  auto result = run_cli(
      "sample-size --population 1000 --z 1.96 --error 0.05 --heterogeneity 0",
      "ss_zero");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_EQ(result.out, "0\n");
}

TEST(CliSampleSize, DomainViolationExitsThree) {
  auto result = run_cli(
      "sample-size --population 0 --z 1.96 --error 0.05 --heterogeneity 0.5", "ss_bad");
  EXPECT_EQ(result.exit_code, 3);
}

TEST(CliSynth, SameSeedByteIdenticalBundles) {
  TempDir a("cli_synth_a");
  TempDir b("cli_synth_b");
  std::string flags =
      " --identities 120 --publications 90 --seed 42 --inter-address-homonym-rate 0.05";
  ASSERT_EQ(run_cli("synth --out-dir " + a.path.string() + flags, "synth_a").exit_code, 0);
  ASSERT_EQ(run_cli("synth --out-dir " + b.path.string() + flags, "synth_b").exit_code, 0);
  for (const char* name : {"publications.csv", "registry.csv", "vocabulary.csv",
                           "category_map.csv", "truth.csv", "ledger.json"}) {
    EXPECT_EQ(slurp(a.path / name), slurp(b.path / name)) << name;
  }
}

TEST(CliSynth, BundleRunsThroughPipelineCleanly) {
  TempDir dir("cli_synth_run");
  auto bundle_dir = dir.path / "bundle";
  ASSERT_EQ(run_cli("synth --out-dir " + bundle_dir.string() +
                        " --identities 150 --publications 100 --seed 9",
                    "synth_run_gen")
                .exit_code,
            0);
  auto out_dir = dir.path / "out";
  std::string args = "run --publications " + (bundle_dir / "publications.csv").string() +
                     " --registry " + (bundle_dir / "registry.csv").string() +
                     " --vocabulary " + (bundle_dir / "vocabulary.csv").string() +
                     " --category-map " + (bundle_dir / "category_map.csv").string() +
                     " --out-dir " + out_dir.string();
  ASSERT_EQ(run_cli(args, "synth_run").exit_code, 0);
  auto eval_out = dir.path / "eval.json";
  ASSERT_EQ(run_cli("eval --mapping " + (out_dir / "mapping.csv").string() + " --truth " +
                        (bundle_dir / "truth.csv").string() + " --ledger " +
                        (bundle_dir / "ledger.json").string() + " --out " +
                        eval_out.string(),
                    "synth_eval")
                .exit_code,
            0);
  std::ifstream report_in(eval_out);
  nlohmann::json report;
  report_in >> report;
  EXPECT_DOUBLE_EQ(report["precision"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(report["recall"].get<double>(), 1.0);
}

TEST(CliSynth, InfeasibleRatesExitThree) {
  TempDir dir("cli_synth_bad");
  auto result = run_cli("synth --out-dir " + dir.path.string() +
                            " --identities 10 --publications 5 --seed 1 "
                            "--perfect-homonym-rate 0.9 --inter-address-homonym-rate 0.9",
                        "synth_bad");
  EXPECT_EQ(result.exit_code, 3);
}

TEST(CliStats, PrettyPrintsTable) {
  TempDir dir("cli_stats");
  ASSERT_EQ(run_cli(golden_run_args(dir.path), "stats_prep").exit_code, 0);
  auto result =
      run_cli("stats --input " + (dir.path / "stage_stats.json").string(), "stats_show");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_NE(result.out.find("mapping_generation"), std::string::npos);
  EXPECT_NE(result.out.find("Pairs/paper"), std::string::npos);
}

TEST(CliConfigFile, EnvVarPointsAtDefaultConfig) {
  TempDir dir("cli_envcfg");
  auto cfg_path = dir.path / "nomina.cfg";
  std::ofstream(cfg_path) << "[sample-size]\npopulation=406534\nz=2.33\nerror=0.03\n"
                          << "heterogeneity=0.12\n";
  TempDir io("cli_envcfg_io");
  auto out_path = io.path / "out.txt";
  std::string cmd = "NOMINA_CONFIG=" + cfg_path.string() + " " + testutil::cli_path() +
                    " sample-size > " + out_path.string() + " 2>/dev/null";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_EQ(slurp(out_path), "636\n");
}

TEST(CliConfigFile, FlagsOverrideConfig) {
  TempDir dir("cli_config");
  auto cfg_path = dir.path / "nomina.cfg";
  std::ofstream(cfg_path) << "[sample-size]\npopulation=10000\nerror=0.05\n"
                          << "heterogeneity=0.5\nz=1.96\n";
  auto result = run_cli("--config " + cfg_path.string() + " sample-size", "cfg_base");
  ASSERT_EQ(result.exit_code, 0) << result.err;
  EXPECT_EQ(result.out, "370\n");
  auto overridden = run_cli(
      "--config " + cfg_path.string() + " sample-size --heterogeneity 0", "cfg_override");
  ASSERT_EQ(overridden.exit_code, 0) << overridden.err;
  EXPECT_EQ(overridden.out, "0\n");
}

TEST(CliUsage, NoSubcommandFails) {
  auto result = run_cli("", "usage");
  EXPECT_EQ(result.exit_code, 3);
}

}  // namespace
}  // namespace nomina
