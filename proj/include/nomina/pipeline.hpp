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

#ifndef NOMINA_PIPELINE_HPP
#define NOMINA_PIPELINE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nomina/errors.hpp"
#include "nomina/ingest.hpp"
#include "nomina/matcher.hpp"
#include "nomina/model.hpp"
#include "nomina/parallel.hpp"

namespace nomina {

struct PipelineConfig {
  // When off, clusters the maximum-correspondence filter cannot decide are
  // reported unresolved instead of tie-broken.
  bool force_resolution = true;
  // When no address of a publication resolves against the vocabulary, keep
  // the pairs (vocabulary gaps should not manufacture false negatives).
  bool keep_on_unresolved_address = true;
  // Subject categories absent from the compatibility map count as
  // compatible with every SDS.
  bool lenient_unknown_category = true;
  // Ties always break on the lexicographically smallest identity id.
};

/// Seed-set correspondence counts: how many distinct accepted identities of
/// an SDS author articles of a subject category.
class CorrespondenceTable {
 public:
  void insert(std::string_view sds, std::string_view category_key,
              std::string_view identity_id) {
    members_[{std::string(sds), std::string(category_key)}].insert(std::string(identity_id));
  }

  std::int64_t count(std::string_view sds, std::string_view category_key) const {
    auto it = members_.find({std::string(sds), std::string(category_key)});
    if (it == members_.end()) return 0;
    return static_cast<std::int64_t>(it->second.size());
  }

  bool empty() const { return members_.empty(); }
  std::size_t cell_count() const { return members_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::set<std::string>> members_;
};

/// Institutions recognized in a publication's address list.
struct AddressResolution {
  std::set<std::string> institutions;
  // Winning institution per address line, empty when nothing matched.
  std::vector<std::string> per_address;

  bool unresolved() const { return institutions.empty(); }
};

/// Resolves each address against the vocabulary: word-boundary substring
/// match on normalized text, highest priority (then smallest rule id) wins
/// per address.
inline AddressResolution resolve_addresses(std::span<const std::string> addresses,
                                           std::span<const AddressRule> rules,
                                           const NormalizationConfig& norm = {}) {
  AddressResolution res;
  for (const auto& raw : addresses) {
    std::string padded = " " + clean_text(raw, norm) + " ";
    std::string winner;
    for (const auto& rule : rules) {  // rules pre-sorted: priority desc, rule_id asc
      std::string needle = " " + rule.normalized_pattern + " ";
      if (padded.find(needle) != std::string::npos) {
        winner = rule.institution_id;
        break;
      }
    }
    res.per_address.push_back(winner);
    if (!winner.empty()) res.institutions.insert(winner);
  }
  return res;
}

/// Address filter: eliminates pairs whose identity sits at a university not
/// recognized in the publication's address list. Returns true when no
/// address resolved (publication flagged, pairs kept under the default
/// config).
inline bool address_filter(std::vector<Cluster>& clusters, const Publication& pub,
                           std::span<const AddressRule> rules, const PipelineConfig& cfg = {},
                           const NormalizationConfig& norm = {}) {
  AddressResolution res = resolve_addresses(pub.addresses, rules, norm);
  if (res.unresolved()) {
    if (!cfg.keep_on_unresolved_address) {
      for (auto& cluster : clusters) {
        for (auto& pair : cluster.pairs) {
          if (pair.live()) pair.eliminate(Stage::address_filter);
        }
      }
    }
    return true;
  }
  for (auto& cluster : clusters) {
    for (auto& pair : cluster.pairs) {
      if (pair.live() && !res.institutions.count(pair.university_id())) {
        pair.eliminate(Stage::address_filter);
      }
    }
  }
  return false;
}

/// WoS-SDS filter: a pair survives iff some category of the publication is
/// compatible with the identity's SDS. Afterwards every singleton cluster is
/// accepted and frozen; later stages never touch those pairs again.
inline void category_filter(std::vector<Cluster>& clusters, const Publication& pub,
                            const CategoryCompatibility& compat,
                            const PipelineConfig& cfg = {},
                            const NormalizationConfig& norm = {}) {
  std::vector<std::string> keys;
  keys.reserve(pub.subject_categories.size());
  for (const auto& c : pub.subject_categories) {
    keys.push_back(CategoryCompatibility::category_key(c, norm));
  }
  for (auto& cluster : clusters) {
    for (auto& pair : cluster.pairs) {
      if (!pair.live() || pair.accepted()) continue;
      bool survives = false;
      for (const auto& key : keys) {
        if (!compat.known(key)) {
          if (cfg.lenient_unknown_category) {
            survives = true;
            break;
          }
          continue;
        }
        if (compat.compatible(key, pair.sds_code())) {
          survives = true;
          break;
        }
      }
      if (!survives) pair.eliminate(Stage::wos_sds_filter);
    }
  }
  for (auto& cluster : clusters) {
    if (auto* sole = cluster.sole_live_pair()) sole->accept(Stage::wos_sds_filter);
  }
}

inline std::set<std::string> accepted_sds_of(const std::vector<Cluster>& clusters) {
  std::set<std::string> sds;
  for (const auto& cluster : clusters) {
    for (const auto& pair : cluster.pairs) {
      if (pair.accepted()) sds.insert(pair.sds_code());
    }
  }
  return sds;
}

/// Shared-SDS filter: within a still-ambiguous cluster, when exactly one
/// pair's SDS is shared with a pair of the same article already accepted,
/// that pair survives and the rest of the cluster is eliminated. Zero or
/// multiple shared pairs defer the cluster to the next filter.
inline void shared_sds_filter(std::vector<Cluster>& clusters,
                              const std::set<std::string>& accepted_sds) {
  if (accepted_sds.empty()) return;
  for (auto& cluster : clusters) {
    if (cluster.cardinality() <= 1) continue;
    std::vector<CandidatePair*> shared;
    for (auto& pair : cluster.pairs) {
      if (pair.live() && accepted_sds.count(pair.sds_code())) shared.push_back(&pair);
    }
    if (shared.size() != 1) continue;
    for (auto& pair : cluster.pairs) {
      if (pair.live() && &pair != shared.front()) {
        pair.eliminate(Stage::shared_sds_filter);
      }
    }
    shared.front()->accept(Stage::shared_sds_filter);
  }
}

/// Per-publication view used by the global passes.
struct PubState {
  const Publication* pub = nullptr;
  std::vector<Cluster> clusters;
  bool address_unresolved = false;
};

/// Builds the seed table from every pair accepted so far. Distinct-identity
/// semantics: an identity contributes once per (SDS, category) cell no
/// matter how many accepted articles it has there.
inline CorrespondenceTable build_correspondence_table(std::span<const PubState> states,
                                                      const NormalizationConfig& norm = {}) {
  CorrespondenceTable table;
  for (const auto& state : states) {
    for (const auto& cluster : state.clusters) {
      for (const auto& pair : cluster.pairs) {
        if (!pair.accepted()) continue;
        for (const auto& category : state.pub->subject_categories) {
          table.insert(pair.sds_code(), CategoryCompatibility::category_key(category, norm),
                       pair.identity_id());
        }
      }
    }
  }
  return table;
}

/// Maximum-correspondence filter: scores each remaining pair by the best
/// correspondence of its SDS across the article's categories and keeps the
/// unique argmax. Ties (including all-zero scores) either break on the
/// smallest identity id, flagged, or leave the cluster unresolved.
inline void max_correspondence_filter(std::vector<Cluster>& clusters, const Publication& pub,
                                      const CorrespondenceTable& table,
                                      const PipelineConfig& cfg = {},
                                      const NormalizationConfig& norm = {}) {
  std::vector<std::string> keys;
  for (const auto& c : pub.subject_categories) {
    keys.push_back(CategoryCompatibility::category_key(c, norm));
  }
  for (auto& cluster : clusters) {
    if (cluster.cardinality() <= 1) continue;
    std::vector<CandidatePair*> live;
    for (auto& pair : cluster.pairs) {
      if (pair.live()) live.push_back(&pair);
    }
    std::vector<std::int64_t> scores(live.size(), 0);
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (const auto& key : keys) {
        scores[i] = std::max(scores[i], table.count(live[i]->sds_code(), key));
      }
    }
    std::int64_t best = *std::max_element(scores.begin(), scores.end());
    std::vector<CandidatePair*> winners;
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (scores[i] == best) winners.push_back(live[i]);
    }
    CandidatePair* retained = nullptr;
    bool tie = winners.size() > 1;
    if (!tie) {
      retained = winners.front();
    } else if (cfg.force_resolution) {
      retained = *std::min_element(winners.begin(), winners.end(),
                                   [](const CandidatePair* a, const CandidatePair* b) {
                                     return a->identity_id() < b->identity_id();
                                   });
      retained->mark_tie_broken();
    } else {
      continue;  // reported unresolved
    }
    for (auto* pair : live) {
      if (pair != retained) pair->eliminate(Stage::max_correspondence_filter);
    }
    retained->accept(Stage::max_correspondence_filter);
  }
}

/// Result of a full pipeline run: the mapping, the per-stage funnel, and the
/// complete per-publication audit trail.
struct PipelineResult {
  MappingSet mapping;
  std::vector<StageStats> stats;
  std::vector<PubState> states;
};

namespace detail {

inline StageStats snapshot_stage(Stage stage, std::span<const PubState> states,
                                 const StageStats* previous) {
  StageStats row;
  row.stage = stage;
  for (const auto& state : states) {
    std::int64_t live = 0;
    for (const auto& cluster : state.clusters) {
      live += static_cast<std::int64_t>(cluster.cardinality());
    }
    if (live > 0) ++row.papers_with_pairs;
    row.pair_count += live;
  }
  row.pairs_per_paper = row.papers_with_pairs > 0
                            ? static_cast<double>(row.pair_count) /
                                  static_cast<double>(row.papers_with_pairs)
                            : 0.0;
  if (previous) {
    auto delta = [](std::int64_t curr, std::int64_t prev) -> std::optional<double> {
      if (prev == 0) return std::nullopt;
      return 100.0 * (static_cast<double>(curr) - static_cast<double>(prev)) /
             static_cast<double>(prev);
    };
    row.pct_delta_papers = delta(row.papers_with_pairs, previous->papers_with_pairs);
    row.pct_delta_pairs = delta(row.pair_count, previous->pair_count);
  }
  return row;
}

}  // namespace detail

/// Runs the whole cascade: candidate generation, address filter, WoS-SDS
/// filter with singleton freezing, shared-SDS filter per publication, one
/// global correspondence-table build, and the maximum-correspondence filter.
/// Deterministic for fixed inputs regardless of thread count.
inline PipelineResult run_pipeline(std::span<const Publication> pubs, const Registry& registry,
                                   std::span<const AddressRule> rules,
                                   const CategoryCompatibility& compat,
                                   const MatchConfig& match_cfg = {},
                                   const PipelineConfig& pipe_cfg = {}, int threads = 1) {
  match_cfg.validate();
  PipelineResult result;
  result.states.resize(pubs.size());
  const NormalizationConfig& norm = match_cfg.normalization;

  parallel_for(pubs.size(), threads, [&](std::size_t i) {
    result.states[i].pub = &pubs[i];
    result.states[i].clusters = generate_candidates(pubs[i], registry, match_cfg);
  });
  result.stats.push_back(
      detail::snapshot_stage(Stage::mapping_generation, result.states, nullptr));

  parallel_for(pubs.size(), threads, [&](std::size_t i) {
    result.states[i].address_unresolved =
        address_filter(result.states[i].clusters, pubs[i], rules, pipe_cfg, norm);
  });
  result.stats.push_back(
      detail::snapshot_stage(Stage::address_filter, result.states, &result.stats.back()));

  parallel_for(pubs.size(), threads, [&](std::size_t i) {
    category_filter(result.states[i].clusters, pubs[i], compat, pipe_cfg, norm);
  });
  result.stats.push_back(
      detail::snapshot_stage(Stage::wos_sds_filter, result.states, &result.stats.back()));

  parallel_for(pubs.size(), threads, [&](std::size_t i) {
    auto accepted = accepted_sds_of(result.states[i].clusters);
    shared_sds_filter(result.states[i].clusters, accepted);
  });
  result.stats.push_back(
      detail::snapshot_stage(Stage::shared_sds_filter, result.states, &result.stats.back()));

  CorrespondenceTable table = build_correspondence_table(result.states, norm);
  parallel_for(pubs.size(), threads, [&](std::size_t i) {
    max_correspondence_filter(result.states[i].clusters, pubs[i], table, pipe_cfg, norm);
  });
  result.stats.push_back(detail::snapshot_stage(Stage::max_correspondence_filter,
                                                result.states, &result.stats.back()));

  // Assemble the mapping in canonical order.
  std::vector<std::size_t> order(result.states.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.states[a].pub->pub_id < result.states[b].pub->pub_id;
  });
  std::set<std::pair<std::string, int>> accepted_authors;
  for (std::size_t idx : order) {
    auto& state = result.states[idx];
    for (auto& cluster : state.clusters) {
      if (cluster.orphan()) {
        result.mapping.orphans.push_back(cluster.author);
        continue;
      }
      std::size_t live = cluster.cardinality();
      if (live > 1) {
        result.mapping.unresolved_clusters.push_back(cluster);
      }
      for (auto& pair : cluster.pairs) {
        if (pair.accepted()) {
          if (!accepted_authors.insert({pair.author().pub_id, pair.author().author_index})
                   .second) {
            throw Error("internal invariant violated: two accepted pairs for author " +
                        pair.author().pub_id + "#" +
                        std::to_string(pair.author().author_index));
          }
          result.mapping.accepted.push_back(pair);
        } else if (!pair.live()) {
          result.mapping.eliminated.push_back(pair);
        }
      }
    }
  }
  auto pair_order = [](const CandidatePair& a, const CandidatePair& b) {
    if (a.author().pub_id != b.author().pub_id) return a.author().pub_id < b.author().pub_id;
    if (a.author().author_index != b.author().author_index) {
      return a.author().author_index < b.author().author_index;
    }
    return a.identity_id() < b.identity_id();
  };
  std::sort(result.mapping.accepted.begin(), result.mapping.accepted.end(), pair_order);
  std::sort(result.mapping.eliminated.begin(), result.mapping.eliminated.end(), pair_order);
  return result;
}

}  // namespace nomina

#endif  // NOMINA_PIPELINE_HPP
