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

#include "nomina/eval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nomina/pipeline.hpp"
#include "nomina/synth.hpp"
#include "test_util.hpp"

namespace nomina {
namespace {

TEST(SampleSize, ReferenceOperatingPoint) {
  // N=406,534 disambiguated authorships at 98% confidence, 3% error, 12%
  // heterogeneity.
  EXPECT_EQ(sample_size({406534, 2.33, 0.03, 0.12}), 636);
}

TEST(SampleSize, ZeroHeterogeneityNeedsNoObservations) {
  EXPECT_EQ(sample_size({406534, 2.33, 0.03, 0.0}), 0);
  EXPECT_EQ(sample_size({1000, 1.96, 0.05, 1.0}), 0);
}

TEST(SampleSize, TextbookValue) {
  // Frozen from evaluating the formula by hand: 9604 / 25.9579 = 369.98...
  EXPECT_EQ(sample_size({10000, 1.96, 0.05, 0.5}), 370);
}

TEST(SampleSize, DomainErrors) {
  EXPECT_THROW(sample_size({0, 1.96, 0.05, 0.5}), DomainError);
  EXPECT_THROW(sample_size({100, -1.0, 0.05, 0.5}), DomainError);
  EXPECT_THROW(sample_size({100, 1.96, 0.0, 0.5}), DomainError);
  EXPECT_THROW(sample_size({100, 1.96, 1.0, 0.5}), DomainError);
  EXPECT_THROW(sample_size({100, 1.96, 0.05, 1.5}), DomainError);
}

TEST(SampleSize, MonotoneInHeterogeneityUpToHalf) {
  std::int64_t prev = -1;
  for (double p = 0.05; p <= 0.5001; p += 0.05) {
    auto n = sample_size({50000, 1.96, 0.03, p});
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(SampleSize, SymmetricAboutHalf) {
  for (double p : {0.1, 0.2, 0.3, 0.45}) {
    EXPECT_EQ(sample_size({50000, 1.96, 0.03, p}), sample_size({50000, 1.96, 0.03, 1.0 - p}));
  }
}

TEST(SampleSize, MonotoneNonIncreasingInError) {
  std::int64_t prev = std::numeric_limits<std::int64_t>::max();
  for (double e = 0.01; e < 0.2; e += 0.01) {
    auto n = sample_size({50000, 1.96, e, 0.12});
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(SampleSize, LargePopulationLimit) {
  for (auto [z, e, p] : std::vector<std::tuple<double, double, double>>{
           {1.96, 0.05, 0.5}, {2.33, 0.03, 0.12}, {1.645, 0.02, 0.3}}) {
    auto closed_form = static_cast<std::int64_t>(std::ceil(z * z * p * (1 - p) / (e * e)));
    EXPECT_EQ(sample_size({1e9, z, e, p}), closed_form);
  }
}

TEST(ZForConfidence, SupportedLevels) {
  EXPECT_DOUBLE_EQ(z_for_confidence(0.98), 2.33);
  EXPECT_DOUBLE_EQ(z_for_confidence(0.95), 1.96);
  EXPECT_THROW(z_for_confidence(0.97), DomainError);
}

TEST(ComputeMetrics, SampleBasisFigures) {
  // tp consistent with n=636 observations: 636 - 40 fn = 596.
  auto report = compute_metrics(596, 28, 40);
  ASSERT_TRUE(report.precision && report.recall && report.f_measure);
  EXPECT_NEAR(*report.precision, 0.9551, 5e-4);
  EXPECT_NEAR(*report.recall, 0.9371, 5e-4);
  EXPECT_NEAR(*report.f_measure, 0.9460, 5e-4);
}

TEST(ComputeMetrics, PerfectRound) {
  auto report = compute_metrics(10, 0, 0);
  EXPECT_DOUBLE_EQ(*report.precision, 1.0);
  EXPECT_DOUBLE_EQ(*report.recall, 1.0);
  EXPECT_DOUBLE_EQ(*report.f_measure, 1.0);
}

TEST(ComputeMetrics, HarmonicMeanCrossCheck) {
  // P=96.4% and R=94.3% combine to F=95.3%.
  double f = f_measure_of(0.964, 0.943);
  EXPECT_NEAR(f, 0.9534, 5e-5);
  EXPECT_NEAR(f, 0.953, 5e-4);
}

TEST(ComputeMetrics, AllZeroUndefined) {
  auto report = compute_metrics(0, 0, 0);
  EXPECT_FALSE(report.precision.has_value());
  EXPECT_FALSE(report.recall.has_value());
  EXPECT_FALSE(report.f_measure.has_value());
  auto j = evaluation_report_json(report);
  EXPECT_TRUE(j["precision"].is_null());
}

TEST(ComputeMetrics, RoundTripReconstruction) {
  for (auto [tp, fp, fn] : std::vector<std::tuple<int, int, int>>{
           {596, 28, 40}, {10, 0, 0}, {1, 2, 3}, {1000, 17, 93}}) {
    auto report = compute_metrics(tp, fp, fn);
    if (report.precision) {
      double tp_from_p = *report.precision * static_cast<double>(tp + fp);
      EXPECT_NEAR(tp_from_p, tp, 1e-6);
    }
    if (report.recall) {
      double tp_from_r = *report.recall * static_cast<double>(tp + fn);
      EXPECT_NEAR(tp_from_r, tp, 1e-6);
    }
  }
}

TEST(ComputeMetrics, NegativeCountsRejected) {
  EXPECT_THROW(compute_metrics(-1, 0, 0), DomainError);
}

TEST(CompareToGroundTruth, WorkedExamplePerfectRound) {
  auto fx = testutil::load_golden();
  auto result = run_pipeline(fx.corpus.publications, fx.registry, fx.rules, fx.compat);
  auto detail = compare_to_ground_truth(result.mapping, fx.truth);
  EXPECT_EQ(detail.tp, 5);  // 4 on the worked example + the Turin seed record
  EXPECT_EQ(detail.fp(), 0);
  EXPECT_EQ(detail.fn(), 0);

  // Restricted to the worked-example publication: a perfect round of four.
  std::vector<TruthEntry> restricted;
  for (const auto& t : fx.truth) {
    if (t.pub_id == "PRB-69-045412") restricted.push_back(t);
  }
  std::vector<MappingRow> rows;
  for (const auto& row : mapping_rows(result.mapping)) {
    if (row.pub_id == "PRB-69-045412") rows.push_back(row);
  }
  auto main_detail = compare_rows_to_truth(rows, restricted);
  EXPECT_EQ(main_detail.tp, 4);
  EXPECT_EQ(main_detail.fp(), 0);
  EXPECT_EQ(main_detail.fn(), 0);
}

TEST(CompareToGroundTruth, EmptyMappingAllFalseNegatives) {
  std::vector<TruthEntry> truth;
  for (int i = 0; i < 10; ++i) truth.push_back({"P" + std::to_string(i), 0, "R1"});
  MappingSet empty;
  auto detail = compare_to_ground_truth(empty, truth);
  EXPECT_EQ(detail.tp, 0);
  EXPECT_EQ(detail.fp(), 0);
  EXPECT_EQ(detail.fn(), 10);
  for (const auto& fn : detail.false_negatives) {
    EXPECT_EQ(fn.stage, "never_generated");
  }
}

TEST(CompareToGroundTruth, PartitionInvariant) {
  auto fx = testutil::load_golden();
  auto result = run_pipeline(fx.corpus.publications, fx.registry, fx.rules, fx.compat);
  auto detail = compare_to_ground_truth(result.mapping, fx.truth);
  EXPECT_EQ(detail.tp + detail.fn(), static_cast<std::int64_t>(fx.truth.size()));
  EXPECT_EQ(detail.tp + detail.fp(),
            static_cast<std::int64_t>(result.mapping.accepted.size()));
}

TEST(CompareToGroundTruth, WrongIdentityCountsBothWays) {
  std::vector<MappingRow> rows = {
      {"P1", 0, "ROSSI G", "R-WRONG", "FIS/01", "UNIBO", "accepted", ""}};
  std::vector<TruthEntry> truth = {{"P1", 0, "R-RIGHT"}};
  auto detail = compare_rows_to_truth(rows, truth);
  EXPECT_EQ(detail.tp, 0);
  EXPECT_EQ(detail.fp(), 1);
  EXPECT_EQ(detail.fn(), 1);
}

TEST(CompareToGroundTruth, FnStageAttribution) {
  std::vector<MappingRow> rows = {
      {"P1", 0, "ROSSI G", "R1", "FIS/01", "UNIBO", "eliminated", "address_filter"},
      {"P2", 0, "VERDI L", "R2", "FIS/01", "UNIBO", "unresolved", ""},
  };
  std::vector<TruthEntry> truth = {{"P1", 0, "R1"}, {"P2", 0, "R2"}, {"P3", 0, "R3"}};
  auto detail = compare_rows_to_truth(rows, truth);
  ASSERT_EQ(detail.fn(), 3);
  std::map<std::string, std::string> stage_by_pub;
  for (const auto& fn : detail.false_negatives) stage_by_pub[fn.pub_id] = fn.stage;
  EXPECT_EQ(stage_by_pub.at("P1"), "address_filter");
  EXPECT_EQ(stage_by_pub.at("P2"), "unresolved");
  EXPECT_EQ(stage_by_pub.at("P3"), "never_generated");
}

TEST(TruthCsv, DuplicateAuthorRejected) {
  std::istringstream in(
      "pub_id,author_index,identity_id\nP1,0,R1\nP1,0,R2\n");
  EXPECT_THROW(read_truth_csv(in), FormatError);
}

TEST(TruthCsv, MappingFileActsAsTruth) {
  auto fx = testutil::load_golden();
  auto result = run_pipeline(fx.corpus.publications, fx.registry, fx.rules, fx.compat);
  std::ostringstream csv;
  write_mapping_csv(csv, mapping_rows(result.mapping));
  std::istringstream truth_in(csv.str());
  auto truth = read_truth_csv(truth_in);
  EXPECT_EQ(truth.size(), result.mapping.accepted.size());
  std::istringstream mapping_in(csv.str());
  auto rows = read_mapping_csv(mapping_in);
  auto detail = compare_rows_to_truth(rows, truth);
  EXPECT_EQ(detail.fp(), 0);
  EXPECT_EQ(detail.fn(), 0);
  auto report = evaluate(detail);
  EXPECT_DOUBLE_EQ(*report.precision, 1.0);
  EXPECT_DOUBLE_EQ(*report.recall, 1.0);
}

TEST(TagFnCauses, SinglePlantedCause) {
  SyntheticConfig cfg;
  cfg.n_identities = 200;
  cfg.n_publications = 150;
  cfg.wrong_affiliation_rate = 0.04;
  cfg.rng_seed = 7;
  auto bundle = generate_synthetic_corpus(cfg);
  std::ostringstream reg_csv, voc_csv, cat_csv;
  bundle.write_registry_csv(reg_csv);
  bundle.write_vocabulary_csv(voc_csv);
  bundle.write_category_map_csv(cat_csv);
  std::istringstream reg_in(reg_csv.str()), voc_in(voc_csv.str()), cat_in(cat_csv.str());
  auto registry = Registry::parse(reg_in);
  auto rules = load_address_vocabulary(voc_in);
  auto compat = CategoryCompatibility::parse(cat_in);
  auto result = run_pipeline(bundle.publications, registry, rules, compat);
  auto detail = compare_to_ground_truth(result.mapping, bundle.ledger.truth);
  EXPECT_EQ(detail.fn(), 6);  // 0.04 * 150 publications
  // A wrong affiliation loses the true pair at the address filter.
  for (const auto& fn : detail.false_negatives) {
    EXPECT_EQ(fn.stage, "address_filter");
  }
  auto tags = tag_fn_causes(detail, bundle.ledger.cause_map());
  ASSERT_EQ(tags.size(), 1u);
  EXPECT_EQ(tags.at(std::string(kCauseAuthorAddress)), 6);
}

TEST(TagFnCauses, MixedDistributionMatchesLedgerExactly) {
  SyntheticConfig cfg;
  cfg.n_identities = 600;
  cfg.n_publications = 400;
  // A reference cause distribution: 40 / 30 / 10 / 10 / 7.5 / 2.5 percent
  // of forty false negatives, planted here as publication fractions.
  cfg.wrong_affiliation_rate = 0.04;
  cfg.cross_category_publish_rate = 0.03;
  cfg.address_garble_rate = 0.01;
  cfg.source_address_error_rate = 0.01;
  cfg.source_name_error_rate = 0.0075;
  cfg.name_match_error_rate = 0.0025;
  cfg.rng_seed = 11;
  auto bundle = generate_synthetic_corpus(cfg);
  std::ostringstream reg_csv, voc_csv, cat_csv;
  bundle.write_registry_csv(reg_csv);
  bundle.write_vocabulary_csv(voc_csv);
  bundle.write_category_map_csv(cat_csv);
  std::istringstream reg_in(reg_csv.str()), voc_in(voc_csv.str()), cat_in(cat_csv.str());
  auto registry = Registry::parse(reg_in);
  auto rules = load_address_vocabulary(voc_in);
  auto compat = CategoryCompatibility::parse(cat_in);
  auto result = run_pipeline(bundle.publications, registry, rules, compat);
  auto detail = compare_to_ground_truth(result.mapping, bundle.ledger.truth);
  auto tags = tag_fn_causes(detail, bundle.ledger.cause_map());
  EXPECT_EQ(tags.count("unattributed"), 0u);
  EXPECT_EQ(tags.at(std::string(kCauseAuthorAddress)), 16);
  EXPECT_EQ(tags.at(std::string(kCauseWosSds)), 12);
  EXPECT_EQ(tags.at(std::string(kCauseAddressRecognition)), 4);
  EXPECT_EQ(tags.at(std::string(kCauseSourceAddress)), 4);
  EXPECT_EQ(tags.at(std::string(kCauseSourceName)), 3);
  EXPECT_EQ(tags.at(std::string(kCauseNameMatch)), 1);
  EXPECT_EQ(detail.fn(), 40);
}

TEST(TagFnCauses, NoFalseNegativesEmptyMap) {
  ComparisonDetail detail;
  auto tags = tag_fn_causes(detail, {});
  EXPECT_TRUE(tags.empty());
}

}  // namespace
}  // namespace nomina
