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

#ifndef NOMINA_MODEL_HPP
#define NOMINA_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nomina/errors.hpp"

namespace nomina {

enum class DocType { article, review, other };

inline std::string_view to_string(DocType t) {
  switch (t) {
    case DocType::article: return "article";
    case DocType::review: return "review";
    default: return "other";
  }
}

/// One bibliometric record. Addresses are publication-level: the source
/// gives no link between an author and a specific address line.
struct Publication {
  std::string pub_id;
  int year = 0;
  DocType doc_type = DocType::other;
  std::string raw_doc_type;
  std::vector<std::string> author_tokens;
  std::vector<std::string> addresses;
  std::vector<std::string> subject_categories;
  std::map<std::string, std::string> passthrough;  // carried, never consulted

  bool operator==(const Publication&) const = default;
};

/// Uppercase, punctuation-folded author name: surname words plus initials.
struct NormalizedName {
  std::vector<std::string> surname_words;
  std::vector<std::string> initials;  // single uppercase letters

  bool operator==(const NormalizedName&) const = default;
  bool operator<(const NormalizedName& o) const {
    if (surname_words != o.surname_words) return surname_words < o.surname_words;
    return initials < o.initials;
  }

  /// Renders back to "SURNAME INITIALS" form; re-normalizing the result
  /// yields the same NormalizedName.
  std::string token_string() const {
    std::string out;
    for (const auto& w : surname_words) {
      if (!out.empty()) out.push_back(' ');
      out += w;
    }
    if (initials.size() <= 2) {
      out.push_back(' ');
      for (const auto& i : initials) out += i;
    } else {
      for (const auto& i : initials) {
        out.push_back(' ');
        out += i;
      }
    }
    return out;
  }
};

enum class AcademicRank { assistant, associate, full };

inline std::optional<AcademicRank> parse_rank(std::string_view s) {
  if (s == "assistant") return AcademicRank::assistant;
  if (s == "associate") return AcademicRank::associate;
  if (s == "full") return AcademicRank::full;
  return std::nullopt;
}

inline std::string_view to_string(AcademicRank r) {
  switch (r) {
    case AcademicRank::assistant: return "assistant";
    case AcademicRank::associate: return "associate";
    default: return "full";
  }
}

/// One registry row: a researcher identity in a yearly snapshot. Exactly
/// one discipline (SDS) code per identity per snapshot year.
struct IdentityRecord {
  std::string identity_id;
  std::string raw_surname;
  std::vector<std::string> surname_tokens;  // uppercase-normalized words
  std::vector<std::string> first_names;
  std::string sds_code;
  std::string university_id;
  int snapshot_year = 0;
  std::optional<AcademicRank> rank;
  std::optional<std::string> department;
  // Ids of perfect homonyms merged into this record at load time.
  std::vector<std::string> amalgamated_ids;
};

/// One occurrence of an author token in one publication's author list.
struct AuthorInstance {
  std::string pub_id;
  int author_index = 0;
  std::string raw_token;
  // Absent when the raw token defies the SURNAME-INITIALS grammar; such
  // authors cannot be matched and end up as orphans.
  std::optional<NormalizedName> normalized;
};

enum class PairStatus { candidate, accepted, eliminated };

/// Pipeline stages, in cascade order.
enum class Stage {
  mapping_generation,
  address_filter,
  wos_sds_filter,
  shared_sds_filter,
  max_correspondence_filter,
};

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::mapping_generation: return "mapping_generation";
    case Stage::address_filter: return "address_filter";
    case Stage::wos_sds_filter: return "wos_sds_filter";
    case Stage::shared_sds_filter: return "shared_sds_filter";
    default: return "max_correspondence_filter";
  }
}

/// One (author instance, identity) hypothesis. Status moves candidate ->
/// accepted or candidate -> eliminated, never back; an eliminated pair can
/// never be accepted afterwards.
class CandidatePair {
 public:
  CandidatePair() = default;
  CandidatePair(AuthorInstance author, const IdentityRecord& identity,
                std::string match_form)
      : author_(std::move(author)),
        identity_id_(identity.identity_id),
        sds_code_(identity.sds_code),
        university_id_(identity.university_id),
        match_form_(std::move(match_form)) {}

  const AuthorInstance& author() const { return author_; }
  const std::string& identity_id() const { return identity_id_; }
  const std::string& sds_code() const { return sds_code_; }
  const std::string& university_id() const { return university_id_; }
  const std::string& match_form() const { return match_form_; }
  PairStatus status() const { return status_; }
  bool live() const { return status_ != PairStatus::eliminated; }
  bool accepted() const { return status_ == PairStatus::accepted; }
  bool tie_broken() const { return tie_broken_; }
  std::optional<Stage> eliminated_by() const { return eliminated_by_; }
  std::optional<Stage> accepted_by() const { return accepted_by_; }

  void accept(Stage stage) {
    if (status_ == PairStatus::eliminated) {
      throw Error("invalid status transition: eliminated -> accepted for pair (" +
                  author_.raw_token + ", " + identity_id_ + ")");
    }
    if (status_ == PairStatus::accepted) return;
    status_ = PairStatus::accepted;
    accepted_by_ = stage;
  }

  void eliminate(Stage stage) {
    if (status_ == PairStatus::accepted) {
      throw Error("invalid status transition: accepted -> eliminated for pair (" +
                  author_.raw_token + ", " + identity_id_ + ")");
    }
    if (status_ == PairStatus::eliminated) return;
    status_ = PairStatus::eliminated;
    eliminated_by_ = stage;
  }

  void mark_tie_broken() { tie_broken_ = true; }

 private:
  AuthorInstance author_;
  std::string identity_id_;
  std::string sds_code_;
  std::string university_id_;
  std::string match_form_;
  PairStatus status_ = PairStatus::candidate;
  std::optional<Stage> eliminated_by_;
  std::optional<Stage> accepted_by_;
  bool tie_broken_ = false;
};

/// All pairs hypothesized for one author instance. Eliminated pairs are
/// retained for auditing; cardinality counts only the live ones. A cluster
/// that never had pairs is an orphan author.
struct Cluster {
  AuthorInstance author;
  std::vector<CandidatePair> pairs;

  std::size_t cardinality() const {
    std::size_t n = 0;
    for (const auto& p : pairs)
      if (p.live()) ++n;
    return n;
  }

  CandidatePair* sole_live_pair() {
    CandidatePair* found = nullptr;
    for (auto& p : pairs) {
      if (!p.live()) continue;
      if (found) return nullptr;
      found = &p;
    }
    return found;
  }

  bool orphan() const { return pairs.empty(); }
};

/// Final output of a pipeline run: at most one accepted pair per author
/// instance, plus the audit trail.
struct MappingSet {
  std::vector<CandidatePair> accepted;
  std::vector<Cluster> unresolved_clusters;  // only when force-resolution is off
  std::vector<AuthorInstance> orphans;
  std::vector<CandidatePair> eliminated;  // audit: every eliminated pair and stage
};

/// Per-stage funnel counts.
struct StageStats {
  Stage stage = Stage::mapping_generation;
  std::int64_t papers_with_pairs = 0;
  std::int64_t pair_count = 0;
  double pairs_per_paper = 0.0;
  std::optional<double> pct_delta_papers;  // vs previous stage; absent on first
  std::optional<double> pct_delta_pairs;
};

}  // namespace nomina

#endif  // NOMINA_MODEL_HPP
