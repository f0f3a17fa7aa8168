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

#ifndef NOMINA_REPORT_HPP
#define NOMINA_REPORT_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nomina/csv.hpp"
#include "nomina/errors.hpp"
#include "nomina/model.hpp"
#include "nomina/pipeline.hpp"
#include "nomina/version.hpp"

namespace nomina {

/// Audit trail stamped into output files: engine version, configuration
/// hash, and input checksums. Deterministic, so identical runs produce
/// byte-identical outputs.
struct AuditInfo {
  std::string engine_version{kVersion};
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> input_checksums;  // (name, fnv1a64)

  std::vector<std::string> comment_lines() const {
    std::vector<std::string> lines;
    lines.push_back("engine nomina " + engine_version);
    if (!config_hash.empty()) lines.push_back("config " + config_hash);
    for (const auto& [name, sum] : input_checksums) {
      lines.push_back("input " + name + " " + sum);
    }
    return lines;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["engine"] = "nomina";
    j["version"] = engine_version;
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [name, sum] : input_checksums) inputs[name] = sum;
    j["inputs"] = inputs;
    return j;
  }
};

inline const std::array<std::string_view, 8> kMappingColumns = {
    "pub_id", "author_index", "raw_token",  "identity_id",
    "sds_code", "university_id", "status", "eliminating_stage"};

struct MappingRow {
  std::string pub_id;
  int author_index = 0;
  std::string raw_token;
  std::string identity_id;
  std::string sds_code;
  std::string university_id;
  std::string status;  // accepted | tie_broken | unresolved | orphan | eliminated
  std::string eliminating_stage;
};

/// Flattens a mapping into its row form, canonical order: pub_id, author
/// index, identity id. Eliminated pairs carry the stage that removed them;
/// orphans carry empty identity fields.
inline std::vector<MappingRow> mapping_rows(const MappingSet& mapping) {
  std::vector<MappingRow> rows;
  for (const auto& pair : mapping.accepted) {
    rows.push_back({pair.author().pub_id, pair.author().author_index,
                    pair.author().raw_token, pair.identity_id(), pair.sds_code(),
                    pair.university_id(), pair.tie_broken() ? "tie_broken" : "accepted",
                    ""});
  }
  for (const auto& cluster : mapping.unresolved_clusters) {
    for (const auto& pair : cluster.pairs) {
      if (!pair.live()) continue;
      rows.push_back({pair.author().pub_id, pair.author().author_index,
                      pair.author().raw_token, pair.identity_id(), pair.sds_code(),
                      pair.university_id(), "unresolved", ""});
    }
  }
  for (const auto& author : mapping.orphans) {
    rows.push_back({author.pub_id, author.author_index, author.raw_token, "", "", "",
                    "orphan", ""});
  }
  for (const auto& pair : mapping.eliminated) {
    rows.push_back({pair.author().pub_id, pair.author().author_index,
                    pair.author().raw_token, pair.identity_id(), pair.sds_code(),
                    pair.university_id(), "eliminated",
                    std::string(to_string(*pair.eliminated_by()))});
  }
  std::sort(rows.begin(), rows.end(), [](const MappingRow& a, const MappingRow& b) {
    if (a.pub_id != b.pub_id) return a.pub_id < b.pub_id;
    if (a.author_index != b.author_index) return a.author_index < b.author_index;
    if (a.identity_id != b.identity_id) return a.identity_id < b.identity_id;
    return a.status < b.status;
  });
  return rows;
}

inline void write_mapping_csv(std::ostream& out, std::span<const MappingRow> rows,
                              const AuditInfo* audit = nullptr) {
  if (audit) {
    for (const auto& line : audit->comment_lines()) out << "# " << line << '\n';
  }
  std::vector<std::string> header(kMappingColumns.begin(), kMappingColumns.end());
  write_csv_record(out, header);
  for (const auto& row : rows) {
    std::vector<std::string> fields = {row.pub_id,
                                       std::to_string(row.author_index),
                                       row.raw_token,
                                       row.identity_id,
                                       row.sds_code,
                                       row.university_id,
                                       row.status,
                                       row.eliminating_stage};
    write_csv_record(out, fields);
  }
}

inline std::vector<MappingRow> read_mapping_csv(std::istream& in, std::string source = {}) {
  static const std::array<std::string_view, 4> required = {"pub_id", "author_index",
                                                           "identity_id", "status"};
  CsvTable table(in, required, source);
  std::vector<MappingRow> rows;
  if (table.empty_stream()) return rows;
  while (auto row = table.next_row()) {
    MappingRow r;
    r.pub_id = CsvTable::trim(table.field(*row, "pub_id"));
    r.author_index = detail::parse_int(table.field(*row, "author_index"), source,
                                       table.record_line(), "author_index");
    r.raw_token = std::string(table.field(*row, "raw_token"));
    r.identity_id = CsvTable::trim(table.field(*row, "identity_id"));
    r.sds_code = CsvTable::trim(table.field(*row, "sds_code"));
    r.university_id = CsvTable::trim(table.field(*row, "university_id"));
    r.status = CsvTable::trim(table.field(*row, "status"));
    r.eliminating_stage = CsvTable::trim(table.field(*row, "eliminating_stage"));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json stage_stats_json(std::span<const StageStats> stats) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : stats) {
    nlohmann::json j;
    j["stage"] = std::string(to_string(row.stage));
    j["papers"] = row.papers_with_pairs;
    j["pairs"] = row.pair_count;
    j["pairs_per_paper"] = row.pairs_per_paper;
    j["pct_delta_papers"] =
        row.pct_delta_papers ? nlohmann::json(*row.pct_delta_papers) : nlohmann::json();
    j["pct_delta_pairs"] =
        row.pct_delta_pairs ? nlohmann::json(*row.pct_delta_pairs) : nlohmann::json();
    arr.push_back(std::move(j));
  }
  return arr;
}

inline void write_stage_stats_json(std::ostream& out, std::span<const StageStats> stats) {
  out << stage_stats_json(stats).dump(2) << '\n';
}

inline std::vector<StageStats> parse_stage_stats_json(std::istream& in,
                                                      std::string source = {}) {
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source, 0, std::string("bad stats JSON: ") + e.what());
  }
  if (!arr.is_array()) throw FormatError(source, 0, "stats JSON must be an array");
  std::vector<StageStats> stats;
  try {
    for (const auto& j : arr) {
      StageStats row;
      std::string stage = j.at("stage").get<std::string>();
      bool known = false;
      for (Stage s : {Stage::mapping_generation, Stage::address_filter, Stage::wos_sds_filter,
                      Stage::shared_sds_filter, Stage::max_correspondence_filter}) {
        if (stage == to_string(s)) {
          row.stage = s;
          known = true;
          break;
        }
      }
      if (!known) throw FormatError(source, 0, "unknown stage name '" + stage + "'");
      row.papers_with_pairs = j.at("papers").get<std::int64_t>();
      row.pair_count = j.at("pairs").get<std::int64_t>();
      row.pairs_per_paper = j.at("pairs_per_paper").get<double>();
      if (j.contains("pct_delta_papers") && !j["pct_delta_papers"].is_null()) {
        row.pct_delta_papers = j["pct_delta_papers"].get<double>();
      }
      if (j.contains("pct_delta_pairs") && !j["pct_delta_pairs"].is_null()) {
        row.pct_delta_pairs = j["pct_delta_pairs"].get<double>();
      }
      stats.push_back(row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source, 0, std::string("bad stats JSON: ") + e.what());
  }
  return stats;
}

/// Renders the funnel the way the assessment reports tabulate it: counts
/// with percent deltas against the previous step.
inline std::string format_stats_table(std::span<const StageStats> stats) {
  std::ostringstream out;
  auto fmt_delta = [](const std::optional<double>& d) {
    if (!d) return std::string{};
    std::ostringstream s;
    s << " (" << std::showpos << std::fixed << std::setprecision(1) << *d << "%)";
    return s.str();
  };
  out << std::left << std::setw(28) << "Step" << std::right << std::setw(18) << "Papers"
      << std::setw(20) << "Pairs" << std::setw(16) << "Pairs/paper" << '\n';
  for (const auto& row : stats) {
    std::string papers = std::to_string(row.papers_with_pairs) + fmt_delta(row.pct_delta_papers);
    std::string pairs = std::to_string(row.pair_count) + fmt_delta(row.pct_delta_pairs);
    std::ostringstream ppp;
    ppp << std::fixed << std::setprecision(3) << row.pairs_per_paper;
    out << std::left << std::setw(28) << to_string(row.stage) << std::right << std::setw(18)
        << papers << std::setw(20) << pairs << std::setw(16) << ppp.str() << '\n';
  }
  return out.str();
}

inline nlohmann::json exclusion_report_json(const ExclusionReport& report) {
  nlohmann::json j;
  j["total_records"] = report.total;
  j["included"] = report.included;
  nlohmann::json by_reason = nlohmann::json::object();
  for (const auto& [reason, count] : report.excluded_by_reason) by_reason[reason] = count;
  j["excluded_by_reason"] = by_reason;
  return j;
}

}  // namespace nomina

#endif  // NOMINA_REPORT_HPP
