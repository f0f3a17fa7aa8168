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

#ifndef NOMINA_INGEST_HPP
#define NOMINA_INGEST_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "nomina/csv.hpp"
#include "nomina/errors.hpp"
#include "nomina/model.hpp"
#include "nomina/normalize.hpp"

namespace nomina {

struct IngestConfig {
  // Records with strictly more authors than this are excluded.
  int max_authors = 50;
  // Compared case-insensitively against the record's raw doc type.
  std::vector<std::string> doc_type_allowlist = {"article", "review"};
  NormalizationConfig normalization;
};

struct ExclusionReport {
  std::int64_t total = 0;
  std::int64_t included = 0;
  std::map<std::string, std::int64_t> excluded_by_reason;

  std::int64_t excluded_total() const {
    std::int64_t n = 0;
    for (const auto& [_, c] : excluded_by_reason) n += c;
    return n;
  }
};

struct PublicationCorpus {
  std::vector<Publication> publications;
  ExclusionReport exclusions;
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline int parse_int(std::string_view s, const std::string& source, std::size_t line,
                     std::string_view what) {
  int value = 0;
  auto trimmed = CsvTable::trim(s);
  auto [p, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc() || p != trimmed.data() + trimmed.size()) {
    throw FormatError(source, line, "bad integer for " + std::string(what) + ": '" +
                                        std::string(s) + "'");
  }
  return value;
}

inline std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      auto item = CsvTable::trim(s.substr(start, i - start));
      if (!item.empty()) out.push_back(std::move(item));
      start = i + 1;
    }
  }
  return out;
}

inline std::string join_list(std::span<const std::string> items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += items[i];
  }
  return out;
}

inline DocType classify_doc_type(std::string_view raw) {
  std::string t = lower(CsvTable::trim(raw));
  if (t == "article") return DocType::article;
  if (t == "review") return DocType::review;
  return DocType::other;
}

inline bool doc_type_allowed(std::string_view raw, const IngestConfig& cfg) {
  std::string t = lower(CsvTable::trim(raw));
  for (const auto& allowed : cfg.doc_type_allowlist) {
    if (t == lower(allowed)) return true;
  }
  return false;
}

}  // namespace detail

inline const std::array<std::string_view, 6> kPublicationColumns = {
    "pub_id", "year", "doc_type", "authors", "addresses", "subject_categories"};

/// Parses the publication corpus, applying the exclusion rules: doc types
/// outside the allowlist and author lists longer than max_authors. The
/// report accounts for every input record.
inline PublicationCorpus parse_publications(std::istream& in, const IngestConfig& cfg = {},
                                            std::string source = {}) {
  std::vector<std::string_view> required(kPublicationColumns.begin(),
                                         kPublicationColumns.end());
  CsvTable table(in, required, source);
  PublicationCorpus corpus;
  std::set<std::string> seen_ids;
  while (auto row = table.next_row()) {
    std::size_t line = table.record_line();
    ++corpus.exclusions.total;
    Publication pub;
    pub.pub_id = CsvTable::trim(table.field(*row, "pub_id"));
    if (pub.pub_id.empty()) throw FormatError(source, line, "empty pub_id");
    if (!seen_ids.insert(pub.pub_id).second) {
      throw DuplicatePubIdError(source, line, "duplicate pub_id '" + pub.pub_id + "'");
    }
    pub.year = detail::parse_int(table.field(*row, "year"), source, line, "year");
    pub.raw_doc_type = CsvTable::trim(table.field(*row, "doc_type"));
    pub.doc_type = detail::classify_doc_type(pub.raw_doc_type);
    pub.author_tokens = detail::split_list(table.field(*row, "authors"), ';');
    pub.addresses = detail::split_list(table.field(*row, "addresses"), '|');
    pub.subject_categories = detail::split_list(table.field(*row, "subject_categories"), ';');
    if (pub.author_tokens.empty()) throw FormatError(source, line, "record has no authors");
    if (pub.subject_categories.empty()) {
      throw FormatError(source, line, "record has no subject categories");
    }
    for (const auto& name : table.column_names()) {
      bool core = std::find(kPublicationColumns.begin(), kPublicationColumns.end(), name) !=
                  kPublicationColumns.end();
      if (core) continue;
      auto value = std::string(table.field(*row, name));
      if (!value.empty()) pub.passthrough[name] = std::move(value);
    }
    if (!detail::doc_type_allowed(pub.raw_doc_type, cfg)) {
      ++corpus.exclusions.excluded_by_reason["doc_type"];
      continue;
    }
    if (static_cast<int>(pub.author_tokens.size()) > cfg.max_authors) {
      ++corpus.exclusions.excluded_by_reason["author_count"];
      continue;
    }
    ++corpus.exclusions.included;
    corpus.publications.push_back(std::move(pub));
  }
  return corpus;
}

/// JSON-lines variant: identical field names, list fields as arrays or
/// delimiter-joined strings.
inline PublicationCorpus parse_publications_jsonl(std::istream& in,
                                                  const IngestConfig& cfg = {},
                                                  std::string source = {}) {
  PublicationCorpus corpus;
  std::set<std::string> seen_ids;
  std::string line_text;
  std::size_t line = 0;
  auto string_list = [&](const nlohmann::json& v, char sep) -> std::vector<std::string> {
    if (v.is_string()) return detail::split_list(v.get<std::string>(), sep);
    std::vector<std::string> out;
    for (const auto& item : v) out.push_back(item.get<std::string>());
    return out;
  };
  while (std::getline(in, line_text)) {
    ++line;
    auto trimmed = CsvTable::trim(line_text);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(trimmed);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(source, line, std::string("bad JSON: ") + e.what());
    }
    ++corpus.exclusions.total;
    Publication pub;
    try {
      pub.pub_id = obj.at("pub_id").get<std::string>();
      pub.year = obj.at("year").get<int>();
      pub.raw_doc_type = obj.at("doc_type").get<std::string>();
      pub.author_tokens = string_list(obj.at("authors"), ';');
      pub.addresses = obj.contains("addresses") ? string_list(obj["addresses"], '|')
                                                : std::vector<std::string>{};
      pub.subject_categories = string_list(obj.at("subject_categories"), ';');
      for (const auto& [key, value] : obj.items()) {
        bool core = std::find(kPublicationColumns.begin(), kPublicationColumns.end(), key) !=
                    kPublicationColumns.end();
        if (core) continue;
        pub.passthrough[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(source, line, std::string("bad record: ") + e.what());
    }
    pub.doc_type = detail::classify_doc_type(pub.raw_doc_type);
    if (pub.pub_id.empty()) throw FormatError(source, line, "empty pub_id");
    if (!seen_ids.insert(pub.pub_id).second) {
      throw DuplicatePubIdError(source, line, "duplicate pub_id '" + pub.pub_id + "'");
    }
    if (pub.author_tokens.empty()) throw FormatError(source, line, "record has no authors");
    if (pub.subject_categories.empty()) {
      throw FormatError(source, line, "record has no subject categories");
    }
    if (!detail::doc_type_allowed(pub.raw_doc_type, cfg)) {
      ++corpus.exclusions.excluded_by_reason["doc_type"];
      continue;
    }
    if (static_cast<int>(pub.author_tokens.size()) > cfg.max_authors) {
      ++corpus.exclusions.excluded_by_reason["author_count"];
      continue;
    }
    ++corpus.exclusions.included;
    corpus.publications.push_back(std::move(pub));
  }
  return corpus;
}

inline PublicationCorpus parse_publications_file(const std::filesystem::path& path,
                                                 const IngestConfig& cfg = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open publications file: " + path.string());
  if (path.extension() == ".jsonl") {
    return parse_publications_jsonl(in, cfg, path.string());
  }
  return parse_publications(in, cfg, path.string());
}

/// Serializes publications in the canonical CSV layout; passthrough columns
/// follow the core ones in sorted key order.
inline void write_publications_csv(std::ostream& out, std::span<const Publication> pubs,
                                   std::span<const std::string> header_comments = {}) {
  for (const auto& c : header_comments) out << "# " << c << '\n';
  std::set<std::string> extra_keys;
  for (const auto& p : pubs) {
    for (const auto& [k, _] : p.passthrough) extra_keys.insert(k);
  }
  std::vector<std::string> header(kPublicationColumns.begin(), kPublicationColumns.end());
  header.insert(header.end(), extra_keys.begin(), extra_keys.end());
  write_csv_record(out, header);
  for (const auto& p : pubs) {
    std::vector<std::string> row = {
        p.pub_id,
        std::to_string(p.year),
        p.raw_doc_type,
        detail::join_list(p.author_tokens, ';'),
        detail::join_list(p.addresses, '|'),
        detail::join_list(p.subject_categories, ';'),
    };
    for (const auto& k : extra_keys) {
      auto it = p.passthrough.find(k);
      row.push_back(it == p.passthrough.end() ? std::string{} : it->second);
    }
    write_csv_record(out, row);
  }
}

struct AmalgamationFlag {
  std::string primary_id;
  std::vector<std::string> merged_ids;  // the ids folded into primary_id
  int snapshot_year = 0;
};

struct RegistryLoadStats {
  std::int64_t rows = 0;
  std::int64_t identities = 0;
  std::vector<AmalgamationFlag> amalgamations;
  bool empty_input = false;
};

/// The identity registry, indexed by snapshot year and by every surname word
/// so compound-surname identities are reachable through any of their words.
/// Perfect homonyms (same name, university, and SDS within a snapshot year)
/// are amalgamated into one record at load time.
class Registry {
 public:
  Registry() = default;

  static Registry parse(std::istream& in, const NormalizationConfig& norm = {},
                        std::string source = {}) {
    static const std::array<std::string_view, 6> required = {
        "identity_id", "surname", "first_names", "sds_code", "university_id",
        "snapshot_year"};
    CsvTable table(in, required, source);
    Registry reg;
    if (table.empty_stream()) {
      reg.stats_.empty_input = true;
      return reg;
    }
    std::set<std::pair<std::string, int>> seen;
    std::map<std::string, std::size_t> homonym_groups;  // perfect-homonym key -> index
    while (auto row = table.next_row()) {
      std::size_t line = table.record_line();
      ++reg.stats_.rows;
      IdentityRecord rec;
      rec.identity_id = CsvTable::trim(table.field(*row, "identity_id"));
      rec.raw_surname = CsvTable::trim(table.field(*row, "surname"));
      auto first_names_raw = CsvTable::trim(table.field(*row, "first_names"));
      rec.sds_code = CsvTable::trim(table.field(*row, "sds_code"));
      rec.university_id = CsvTable::trim(table.field(*row, "university_id"));
      auto year_raw = CsvTable::trim(table.field(*row, "snapshot_year"));
      const std::array<std::pair<const std::string*, const char*>, 6> mandatory = {
          std::pair{&rec.identity_id, "identity_id"},
          std::pair{&rec.raw_surname, "surname"},
          std::pair{&first_names_raw, "first_names"},
          std::pair{&rec.sds_code, "sds_code"},
          std::pair{&rec.university_id, "university_id"},
          std::pair{&year_raw, "snapshot_year"}};
      for (const auto& [value, name] : mandatory) {
        if (value->empty()) {
          throw MissingFieldError(source, line, "missing field '" + std::string(name) + "'");
        }
      }
      rec.snapshot_year = detail::parse_int(year_raw, source, line, "snapshot_year");
      if (!seen.insert({rec.identity_id, rec.snapshot_year}).second) {
        throw DuplicateIdentityYearError(
            source, line,
            "duplicate (identity_id, snapshot_year): (" + rec.identity_id + ", " +
                std::to_string(rec.snapshot_year) + ")");
      }
      rec.first_names = split_words(clean_text(first_names_raw, norm));
      if (rec.first_names.empty()) {
        throw MissingFieldError(source, line, "first_names empty after normalization");
      }
      rec.surname_tokens = split_words(clean_text(rec.raw_surname, norm));
      if (rec.surname_tokens.empty()) {
        throw MissingFieldError(source, line, "surname empty after normalization");
      }
      if (table.has_column("rank")) {
        rec.rank = parse_rank(CsvTable::trim(table.field(*row, "rank")));
      }
      if (table.has_column("department")) {
        auto dep = CsvTable::trim(table.field(*row, "department"));
        if (!dep.empty()) rec.department = dep;
      }

      std::string key = detail::join_list(rec.surname_tokens, ' ') + '\x1f' +
                        detail::join_list(rec.first_names, ' ') + '\x1f' +
                        rec.university_id + '\x1f' + rec.sds_code + '\x1f' +
                        std::to_string(rec.snapshot_year);
      auto it = homonym_groups.find(key);
      if (it == homonym_groups.end()) {
        homonym_groups[key] = reg.identities_.size();
        reg.identities_.push_back(std::move(rec));
      } else {
        // Perfect homonym: indistinguishable in the external data, so the
        // identities merge into one carrying all ids. The smallest id stays
        // primary.
        IdentityRecord& kept = reg.identities_[it->second];
        std::vector<std::string> all_ids = kept.amalgamated_ids;
        all_ids.push_back(kept.identity_id);
        all_ids.push_back(rec.identity_id);
        std::sort(all_ids.begin(), all_ids.end());
        kept.identity_id = all_ids.front();
        kept.amalgamated_ids.assign(all_ids.begin() + 1, all_ids.end());
      }
    }
    for (const auto& rec : reg.identities_) {
      if (!rec.amalgamated_ids.empty()) {
        reg.stats_.amalgamations.push_back(
            {rec.identity_id, rec.amalgamated_ids, rec.snapshot_year});
      }
    }
    reg.stats_.identities = static_cast<std::int64_t>(reg.identities_.size());
    reg.stats_.empty_input = reg.identities_.empty();
    reg.build_indexes();
    return reg;
  }

  static Registry parse_file(const std::filesystem::path& path,
                             const NormalizationConfig& norm = {}) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open registry file: " + path.string());
    return parse(in, norm, path.string());
  }

  /// Builds a registry from records directly (fixtures, tests).
  static Registry from_records(std::vector<IdentityRecord> records) {
    Registry reg;
    reg.identities_ = std::move(records);
    reg.stats_.rows = static_cast<std::int64_t>(reg.identities_.size());
    reg.stats_.identities = reg.stats_.rows;
    reg.build_indexes();
    return reg;
  }

  const std::vector<IdentityRecord>& identities() const { return identities_; }
  const RegistryLoadStats& load_stats() const { return stats_; }
  std::size_t size() const { return identities_.size(); }

  bool has_year(int year) const { return by_year_.count(year) > 0; }

  std::vector<const IdentityRecord*> all_of_year(int year) const {
    std::vector<const IdentityRecord*> out;
    auto it = by_year_.find(year);
    if (it == by_year_.end()) return out;
    out.reserve(it->second.size());
    for (std::size_t idx : it->second) out.push_back(&identities_[idx]);
    return out;
  }

  /// Identities having `word` among their surname words in `year`.
  std::vector<const IdentityRecord*> lookup(std::string_view word, int year) const {
    return resolve(any_word_index_, word, year);
  }

  /// Identities whose first surname word is `word` in `year`.
  std::vector<const IdentityRecord*> lookup_first_word(std::string_view word,
                                                       int year) const {
    return resolve(first_word_index_, word, year);
  }

 private:
  using Index = std::unordered_map<std::string, std::vector<std::size_t>>;

  static std::string key_of(std::string_view word, int year) {
    return std::string(word) + '\x1f' + std::to_string(year);
  }

  std::vector<const IdentityRecord*> resolve(const Index& index, std::string_view word,
                                             int year) const {
    std::vector<const IdentityRecord*> out;
    auto it = index.find(key_of(word, year));
    if (it == index.end()) return out;
    out.reserve(it->second.size());
    for (std::size_t idx : it->second) out.push_back(&identities_[idx]);
    return out;
  }

  void build_indexes() {
    for (std::size_t i = 0; i < identities_.size(); ++i) {
      const auto& rec = identities_[i];
      by_year_[rec.snapshot_year].push_back(i);
      first_word_index_[key_of(rec.surname_tokens.front(), rec.snapshot_year)].push_back(i);
      std::set<std::string> unique_words(rec.surname_tokens.begin(),
                                         rec.surname_tokens.end());
      for (const auto& w : unique_words) {
        any_word_index_[key_of(w, rec.snapshot_year)].push_back(i);
      }
    }
  }

  std::vector<IdentityRecord> identities_;
  std::map<int, std::vector<std::size_t>> by_year_;
  Index first_word_index_;
  Index any_word_index_;
  RegistryLoadStats stats_;
};

/// One controlled-vocabulary rule: a normalized pattern that maps an
/// affiliation string to an institution. Higher priority wins on overlap.
struct AddressRule {
  std::string rule_id;
  std::string pattern;  // raw, as loaded
  std::string normalized_pattern;
  std::string institution_id;
  int priority = 0;
};

inline std::vector<AddressRule> load_address_vocabulary(std::istream& in,
                                                        const NormalizationConfig& norm = {},
                                                        std::string source = {}) {
  static const std::array<std::string_view, 4> required = {"rule_id", "pattern",
                                                           "institution_id", "priority"};
  CsvTable table(in, required, source);
  std::vector<AddressRule> rules;
  if (table.empty_stream()) return rules;
  std::map<std::pair<std::string, std::string>, std::string> by_pattern_institution;
  std::map<std::pair<std::string, int>, std::string> by_pattern_priority;
  while (auto row = table.next_row()) {
    std::size_t line = table.record_line();
    AddressRule rule;
    rule.rule_id = CsvTable::trim(table.field(*row, "rule_id"));
    rule.pattern = CsvTable::trim(table.field(*row, "pattern"));
    rule.institution_id = CsvTable::trim(table.field(*row, "institution_id"));
    if (rule.pattern.empty()) throw FormatError(source, line, "empty pattern");
    if (rule.institution_id.empty()) throw FormatError(source, line, "empty institution_id");
    if (rule.rule_id.empty()) throw FormatError(source, line, "empty rule_id");
    rule.priority = detail::parse_int(table.field(*row, "priority"), source, line, "priority");
    rule.normalized_pattern = clean_text(rule.pattern, norm);
    if (rule.normalized_pattern.empty()) {
      throw FormatError(source, line, "pattern empty after normalization");
    }
    auto dup_key = std::pair{rule.normalized_pattern, rule.institution_id};
    if (!by_pattern_institution.emplace(dup_key, rule.rule_id).second) {
      throw FormatError(source, line,
                        "duplicate rule for (pattern, institution): ('" + rule.pattern +
                            "', " + rule.institution_id + ")");
    }
    auto conflict_key = std::pair{rule.normalized_pattern, rule.priority};
    auto [it, inserted] = by_pattern_priority.emplace(conflict_key, rule.institution_id);
    if (!inserted && it->second != rule.institution_id) {
      throw ConflictingRuleError(
          source, line,
          "conflicting rule: pattern '" + rule.pattern + "' at priority " +
              std::to_string(rule.priority) + " maps to both " + it->second + " and " +
              rule.institution_id);
    }
    rules.push_back(std::move(rule));
  }
  std::sort(rules.begin(), rules.end(), [](const AddressRule& a, const AddressRule& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.rule_id < b.rule_id;
  });
  return rules;
}

inline std::vector<AddressRule> load_address_vocabulary_file(
    const std::filesystem::path& path, const NormalizationConfig& norm = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file: " + path.string());
  return load_address_vocabulary(in, norm, path.string());
}

/// Category -> compatible SDS codes. Category keys are compared on their
/// normalized form; SDS codes are exact strings.
class CategoryCompatibility {
 public:
  static std::string category_key(std::string_view category,
                                  const NormalizationConfig& norm = {}) {
    return clean_text(category, norm);
  }

  static CategoryCompatibility parse(std::istream& in, const NormalizationConfig& norm = {},
                                     std::string source = {}) {
    static const std::array<std::string_view, 2> required = {"subject_category", "sds_code"};
    CsvTable table(in, required, source);
    CategoryCompatibility compat;
    if (table.empty_stream()) return compat;
    while (auto row = table.next_row()) {
      std::size_t line = table.record_line();
      auto category = CsvTable::trim(table.field(*row, "subject_category"));
      auto sds = CsvTable::trim(table.field(*row, "sds_code"));
      if (category.empty()) throw FormatError(source, line, "empty subject_category");
      if (sds.empty()) throw FormatError(source, line, "empty sds_code");
      compat.add(category, sds, norm);
    }
    return compat;
  }

  static CategoryCompatibility parse_file(const std::filesystem::path& path,
                                          const NormalizationConfig& norm = {}) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open category map file: " + path.string());
    return parse(in, norm, path.string());
  }

  void add(std::string_view category, std::string_view sds,
           const NormalizationConfig& norm = {}) {
    map_[category_key(category, norm)].insert(std::string(sds));
  }

  bool known(std::string_view category_key) const { return map_.count(std::string(category_key)) > 0; }

  bool compatible(std::string_view category_key, std::string_view sds) const {
    auto it = map_.find(std::string(category_key));
    if (it == map_.end()) return false;
    return it->second.count(std::string(sds)) > 0;
  }

  bool empty() const { return map_.empty(); }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& [_, sdss] : map_) n += sdss.size();
    return n;
  }

 private:
  std::map<std::string, std::set<std::string>> map_;
};

}  // namespace nomina

#endif  // NOMINA_INGEST_HPP
