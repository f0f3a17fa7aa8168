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

#ifndef NOMINA_EVAL_HPP
#define NOMINA_EVAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <sstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nomina/csv.hpp"
#include "nomina/errors.hpp"
#include "nomina/model.hpp"
#include "nomina/report.hpp"

namespace nomina {

/// Inputs to the sample-size formula: population N, standard-normal
/// quantile Z, sampling error e, and population heterogeneity p.
struct SamplingParameters {
  double population = 0;     // N
  double z = 0;              // Z
  double error = 0;          // e
  double heterogeneity = 0;  // p

  void validate() const {
    if (population < 1) throw DomainError("population must be >= 1");
    if (!(z > 0)) throw DomainError("z must be > 0");
    if (!(error > 0) || !(error < 1)) throw DomainError("error must be in (0, 1)");
    if (heterogeneity < 0 || heterogeneity > 1) {
      throw DomainError("heterogeneity must be in [0, 1]");
    }
  }
};

/// n = ceil( N Z^2 p (1-p) / ((N-1) e^2 + Z^2 p (1-p)) ). Zero-variance
/// populations (p of 0 or 1) need no observations.
inline std::int64_t sample_size(const SamplingParameters& params) {
  params.validate();
  double pq = params.heterogeneity * (1.0 - params.heterogeneity);
  if (pq == 0.0) return 0;
  double z2pq = params.z * params.z * pq;
  double numerator = params.population * z2pq;
  double denominator = (params.population - 1.0) * params.error * params.error + z2pq;
  return static_cast<std::int64_t>(std::ceil(numerator / denominator));
}

/// Standard-normal quantiles for the confidence levels the assessment
/// reports use.
inline double z_for_confidence(double confidence) {
  if (confidence == 0.90) return 1.645;
  if (confidence == 0.95) return 1.96;
  if (confidence == 0.98) return 2.33;
  if (confidence == 0.99) return 2.576;
  throw DomainError("unsupported confidence level (use 0.90, 0.95, 0.98, 0.99 or pass z)");
}

/// Counts plus derived metrics. A metric whose denominator vanishes is
/// absent, never silently zero.
struct EvaluationReport {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
  std::map<std::string, std::int64_t> fn_causes;
};

inline EvaluationReport compute_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw DomainError("counts must be non-negative");
  EvaluationReport report;
  report.tp = tp;
  report.fp = fp;
  report.fn = fn;
  if (tp + fp > 0) report.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) report.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (report.precision && report.recall && (*report.precision + *report.recall) > 0) {
    report.f_measure =
        2.0 * *report.precision * *report.recall / (*report.precision + *report.recall);
  }
  return report;
}

/// F1 from already-known precision/recall fractions.
inline double f_measure_of(double precision, double recall) {
  if (precision + recall <= 0) throw DomainError("precision + recall must be > 0");
  return 2.0 * precision * recall / (precision + recall);
}

struct TruthEntry {
  std::string pub_id;
  int author_index = 0;
  std::string identity_id;

  auto key() const { return std::pair{pub_id, author_index}; }
};

inline const std::array<std::string_view, 3> kTruthColumns = {"pub_id", "author_index",
                                                              "identity_id"};

/// Reads ground truth. A mapping CSV is also accepted: its accepted and
/// tie-broken rows act as the truth set, which makes two runs directly
/// comparable.
inline std::vector<TruthEntry> read_truth_csv(std::istream& in, std::string source = {}) {
  std::vector<std::string_view> required(kTruthColumns.begin(), kTruthColumns.end());
  CsvTable table(in, required, source);
  std::vector<TruthEntry> truth;
  if (table.empty_stream()) return truth;
  bool has_status = table.has_column("status");
  std::map<std::pair<std::string, int>, std::string> seen;
  while (auto row = table.next_row()) {
    if (has_status) {
      auto status = CsvTable::trim(table.field(*row, "status"));
      if (status != "accepted" && status != "tie_broken") continue;
    }
    TruthEntry entry;
    entry.pub_id = CsvTable::trim(table.field(*row, "pub_id"));
    entry.author_index = detail::parse_int(table.field(*row, "author_index"), source,
                                           table.record_line(), "author_index");
    entry.identity_id = CsvTable::trim(table.field(*row, "identity_id"));
    if (entry.pub_id.empty() || entry.identity_id.empty()) {
      throw FormatError(source, table.record_line(), "truth row with empty key fields");
    }
    auto [it, inserted] = seen.emplace(entry.key(), entry.identity_id);
    if (!inserted) {
      throw FormatError(source, table.record_line(),
                        "multiple truth identities for author " + entry.pub_id + "#" +
                            std::to_string(entry.author_index));
    }
    truth.push_back(std::move(entry));
  }
  return truth;
}

inline void write_truth_csv(std::ostream& out, std::span<const TruthEntry> truth) {
  std::vector<std::string> header(kTruthColumns.begin(), kTruthColumns.end());
  write_csv_record(out, header);
  for (const auto& entry : truth) {
    std::vector<std::string> row = {entry.pub_id, std::to_string(entry.author_index),
                                    entry.identity_id};
    write_csv_record(out, row);
  }
}

/// Outcome of comparing a mapping against ground truth. Each error carries
/// the pipeline stage responsible: for a false negative, the stage that
/// eliminated the true pair, "unresolved" when it survived without
/// acceptance, or "never_generated" when matching produced no such pair.
struct ComparisonDetail {
  struct Item {
    std::string pub_id;
    int author_index = 0;
    std::string identity_id;
    std::string stage;
  };
  std::int64_t tp = 0;
  std::vector<Item> false_positives;
  std::vector<Item> false_negatives;

  std::int64_t fp() const { return static_cast<std::int64_t>(false_positives.size()); }
  std::int64_t fn() const { return static_cast<std::int64_t>(false_negatives.size()); }
};

/// Row-level comparison shared by the library and CLI paths.
inline ComparisonDetail compare_rows_to_truth(std::span<const MappingRow> rows,
                                              std::span<const TruthEntry> truth) {
  using Key = std::pair<std::string, int>;
  std::map<Key, const MappingRow*> accepted;
  std::map<std::pair<Key, std::string>, const MappingRow*> by_pair;
  for (const auto& row : rows) {
    Key key{row.pub_id, row.author_index};
    if (row.status == "accepted" || row.status == "tie_broken") {
      if (!accepted.emplace(key, &row).second) {
        throw FormatError("mapping has two accepted pairs for author " + row.pub_id + "#" +
                          std::to_string(row.author_index));
      }
    }
    if (!row.identity_id.empty()) {
      by_pair[{key, row.identity_id}] = &row;
    }
  }
  std::map<Key, const TruthEntry*> truth_by_author;
  for (const auto& entry : truth) {
    if (!truth_by_author.emplace(entry.key(), &entry).second) {
      throw FormatError("truth has two identities for author " + entry.pub_id + "#" +
                        std::to_string(entry.author_index));
    }
  }
  ComparisonDetail detail;
  for (const auto& [key, row] : accepted) {
    auto it = truth_by_author.find(key);
    if (it != truth_by_author.end() && it->second->identity_id == row->identity_id) {
      ++detail.tp;
    } else {
      detail.false_positives.push_back({key.first, key.second, row->identity_id, row->status});
    }
  }
  for (const auto& [key, entry] : truth_by_author) {
    auto it = accepted.find(key);
    if (it != accepted.end() && it->second->identity_id == entry->identity_id) continue;
    std::string stage = "never_generated";
    auto pair_it = by_pair.find({key, entry->identity_id});
    if (pair_it != by_pair.end()) {
      const MappingRow* row = pair_it->second;
      if (row->status == "eliminated") {
        stage = row->eliminating_stage.empty() ? "eliminated" : row->eliminating_stage;
      } else if (row->status == "unresolved") {
        stage = "unresolved";
      } else {
        stage = row->status;
      }
    }
    detail.false_negatives.push_back({key.first, key.second, entry->identity_id, stage});
  }
  return detail;
}

inline ComparisonDetail compare_to_ground_truth(const MappingSet& mapping,
                                                std::span<const TruthEntry> truth) {
  auto rows = mapping_rows(mapping);
  return compare_rows_to_truth(rows, truth);
}

inline EvaluationReport evaluate(const ComparisonDetail& detail) {
  return compute_metrics(detail.tp, detail.fp(), detail.fn());
}

inline nlohmann::json evaluation_report_json(const EvaluationReport& report,
                                             const AuditInfo* audit = nullptr) {
  nlohmann::json j;
  j["tp"] = report.tp;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  j["precision"] = report.precision ? nlohmann::json(*report.precision) : nlohmann::json();
  j["recall"] = report.recall ? nlohmann::json(*report.recall) : nlohmann::json();
  j["f_measure"] = report.f_measure ? nlohmann::json(*report.f_measure) : nlohmann::json();
  nlohmann::json causes = nlohmann::json::object();
  for (const auto& [cause, count] : report.fn_causes) causes[cause] = count;
  j["fn_causes"] = causes;
  if (audit) j["_audit"] = audit->to_json();
  return j;
}

/// Human rendering with percentages at one decimal.
inline std::string format_evaluation(const EvaluationReport& report) {
  std::ostringstream out;
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("undefined");
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << (*v * 100.0) << '%';
    return s.str();
  };
  out << "tp=" << report.tp << " fp=" << report.fp << " fn=" << report.fn
      << " precision=" << pct(report.precision) << " recall=" << pct(report.recall)
      << " f-measure=" << pct(report.f_measure);
  return out.str();
}

}  // namespace nomina

#endif  // NOMINA_EVAL_HPP
