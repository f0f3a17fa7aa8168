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

#ifndef NOMINA_MATCHER_HPP
#define NOMINA_MATCHER_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nomina/errors.hpp"
#include "nomina/ingest.hpp"
#include "nomina/model.hpp"
#include "nomina/normalize.hpp"

namespace nomina {

struct MatchConfig {
  // Total Levenshtein distance allowed across aligned surname words.
  // 0 = exact match after normalization. Capped at 2 to keep the candidate
  // superset from exploding.
  int surname_edit_threshold = 0;
  // Publication year + offset = registry snapshot year. The registry
  // snapshot describes staff as of December 31, so a publication joins the
  // snapshot of the preceding year.
  int registry_join_offset = -1;
  enum class MissingSnapshot { treat_empty, raise };
  MissingSnapshot on_missing_snapshot = MissingSnapshot::treat_empty;
  NormalizationConfig normalization;

  void validate() const {
    if (surname_edit_threshold < 0 || surname_edit_threshold > 2) {
      throw ConfigError("surname_edit_threshold must be in [0, 2], got " +
                        std::to_string(surname_edit_threshold));
    }
  }
};

/// Enumerates every author-token form an identity can take in a bibliometric
/// record. A single-word surname yields one form. A two-word surname yields
/// five: both words, each single word, and each single word with the other
/// word's initial folded into the initials block (the indexer may mistake a
/// surname word for a first name). Longer surnames generalize the same way.
inline std::vector<NormalizedName> enumerate_author_forms(
    const IdentityRecord& identity, const NormalizationConfig& norm = {}) {
  NormalizedName base =
      normalize_identity_name(identity.raw_surname.empty()
                                  ? detail::join_list(identity.surname_tokens, ' ')
                                  : identity.raw_surname,
                              identity.first_names, norm);
  std::vector<NormalizedName> forms;
  auto add = [&forms](NormalizedName f) {
    if (std::find(forms.begin(), forms.end(), f) == forms.end()) {
      forms.push_back(std::move(f));
    }
  };
  add(base);
  const auto& words = base.surname_words;
  if (words.size() > 1) {
    for (std::size_t k = 0; k < words.size(); ++k) {
      add(NormalizedName{{words[k]}, base.initials});
    }
    for (std::size_t k = 0; k < words.size(); ++k) {
      // Words after the kept one read as leading first names, words before
      // it as trailing ones.
      std::vector<std::string> initials;
      for (std::size_t j = k + 1; j < words.size(); ++j) {
        initials.emplace_back(1, words[j].front());
      }
      initials.insert(initials.end(), base.initials.begin(), base.initials.end());
      for (std::size_t j = 0; j < k; ++j) {
        initials.emplace_back(1, words[j].front());
      }
      add(NormalizedName{{words[k]}, std::move(initials)});
    }
  }
  return forms;
}

struct MatchDetail {
  std::size_t form_index = 0;
  NormalizedName form;
  std::vector<std::string> matched_initials;
};

/// A match holds when, for some enumerated form, the surname word sequences
/// align within the edit threshold and at least one author initial appears
/// among the form's initials. Initials order never matters.
inline std::optional<MatchDetail> match(const NormalizedName& author,
                                        const IdentityRecord& identity,
                                        const MatchConfig& cfg = {}) {
  auto forms = enumerate_author_forms(identity, cfg.normalization);
  for (std::size_t idx = 0; idx < forms.size(); ++idx) {
    const NormalizedName& form = forms[idx];
    if (author.surname_words.size() != form.surname_words.size()) continue;
    int distance = 0;
    bool within = true;
    for (std::size_t i = 0; i < form.surname_words.size(); ++i) {
      distance += levenshtein(author.surname_words[i], form.surname_words[i]);
      if (distance > cfg.surname_edit_threshold) {
        within = false;
        break;
      }
    }
    if (!within) continue;
    std::set<std::string> form_initials(form.initials.begin(), form.initials.end());
    std::vector<std::string> matched;
    for (const auto& ini : author.initials) {
      if (form_initials.count(ini) &&
          std::find(matched.begin(), matched.end(), ini) == matched.end()) {
        matched.push_back(ini);
      }
    }
    if (!matched.empty()) {
      return MatchDetail{idx, form, std::move(matched)};
    }
  }
  return std::nullopt;
}

/// Aggressive candidate generation: one cluster per author instance holding
/// a pair for every identity the token can denote in the joined registry
/// snapshot. Authors with no candidates stay as empty clusters (orphans).
/// Output order is canonical: author index, then identity id.
inline std::vector<Cluster> generate_candidates(const Publication& pub,
                                                const Registry& registry,
                                                const MatchConfig& cfg = {}) {
  cfg.validate();
  int snapshot_year = pub.year + cfg.registry_join_offset;
  if (!registry.has_year(snapshot_year) &&
      cfg.on_missing_snapshot == MatchConfig::MissingSnapshot::raise) {
    throw MissingSnapshotError(snapshot_year);
  }
  std::vector<Cluster> clusters;
  clusters.reserve(pub.author_tokens.size());
  for (std::size_t i = 0; i < pub.author_tokens.size(); ++i) {
    AuthorInstance author;
    author.pub_id = pub.pub_id;
    author.author_index = static_cast<int>(i);
    author.raw_token = pub.author_tokens[i];
    try {
      author.normalized = normalize_token(author.raw_token, cfg.normalization);
    } catch (const EmptyTokenError&) {
      author.normalized = std::nullopt;
    } catch (const NoInitialsError&) {
      author.normalized = std::nullopt;
    }
    Cluster cluster;
    cluster.author = author;
    if (author.normalized) {
      std::vector<const IdentityRecord*> candidates;
      if (cfg.surname_edit_threshold == 0) {
        // Any matching form starts with one of the author's surname words,
        // so the word index finds every exact-threshold candidate.
        std::set<const IdentityRecord*> seen;
        for (const auto& word : author.normalized->surname_words) {
          for (const IdentityRecord* rec : registry.lookup(word, snapshot_year)) {
            if (seen.insert(rec).second) candidates.push_back(rec);
          }
        }
      } else {
        candidates = registry.all_of_year(snapshot_year);
      }
      std::sort(candidates.begin(), candidates.end(),
                [](const IdentityRecord* a, const IdentityRecord* b) {
                  return a->identity_id < b->identity_id;
                });
      for (const IdentityRecord* rec : candidates) {
        if (auto detail = match(*author.normalized, *rec, cfg)) {
          cluster.pairs.emplace_back(author, *rec, detail->form.token_string());
        }
      }
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace nomina

#endif  // NOMINA_MATCHER_HPP
