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

#ifndef NOMINA_SYNTH_HPP
#define NOMINA_SYNTH_HPP

// Synthetic-corpus generator: plants a known ground truth, injects homonyms
// by taxonomy class and corruption by cause, and emits the exact ingest file
// formats plus the truth ledger. Truth construction is bookkeeping over the
// generator's own records; it never runs the matcher or the filters, which
// keeps it usable as an independent oracle for both.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nomina/csv.hpp"
#include "nomina/errors.hpp"
#include "nomina/eval.hpp"
#include "nomina/ingest.hpp"
#include "nomina/model.hpp"

namespace nomina {

struct SyntheticConfig {
  std::int64_t n_identities = 300;
  std::int64_t n_publications = 500;

  // Homonym taxonomy, as fractions of the base identities.
  double external_homonym_rate = 0.0;
  double inter_address_homonym_rate = 0.0;
  double intra_address_homonym_rate = 0.0;
  double perfect_homonym_rate = 0.0;

  // Name-shape knobs.
  double compound_surname_rate = 0.15;
  double multi_first_name_rate = 0.25;

  // Corruption causes, as fractions of the publications. Each corrupted
  // publication carries a single author whose true pair the cascade loses.
  double wrong_affiliation_rate = 0.0;      // author indicated the wrong organization
  double cross_category_publish_rate = 0.0; // article outside the author's discipline
  double address_garble_rate = 0.0;         // affiliation the vocabulary cannot recognize
  double source_address_error_rate = 0.0;   // source lists a wrong address
  double source_name_error_rate = 0.0;      // source misspells the surname
  double name_match_error_rate = 0.0;       // token initials match nothing

  std::uint64_t rng_seed = 1;  // required: every run is reproducible
  int publication_year = 2004;
  int max_coauthors = 3;

  void validate() const {
    if (n_identities < 1) throw ConfigError("n_identities must be >= 1");
    if (n_publications < 1) throw ConfigError("n_publications must be >= 1");
    for (auto [rate, name] : std::initializer_list<std::pair<double, const char*>>{
             {external_homonym_rate, "external_homonym_rate"},
             {inter_address_homonym_rate, "inter_address_homonym_rate"},
             {intra_address_homonym_rate, "intra_address_homonym_rate"},
             {perfect_homonym_rate, "perfect_homonym_rate"},
             {compound_surname_rate, "compound_surname_rate"},
             {multi_first_name_rate, "multi_first_name_rate"},
             {wrong_affiliation_rate, "wrong_affiliation_rate"},
             {cross_category_publish_rate, "cross_category_publish_rate"},
             {address_garble_rate, "address_garble_rate"},
             {source_address_error_rate, "source_address_error_rate"},
             {source_name_error_rate, "source_name_error_rate"},
             {name_match_error_rate, "name_match_error_rate"}}) {
      if (rate < 0.0 || rate > 1.0) {
        throw ConfigError(std::string(name) + " must be in [0, 1]");
      }
    }
  }
};

// False-negative cause labels.
inline constexpr std::string_view kCauseAuthorAddress = "author_address_error";
inline constexpr std::string_view kCauseWosSds = "wos_sds_filter_error";
inline constexpr std::string_view kCauseAddressRecognition = "address_recognition_error";
inline constexpr std::string_view kCauseSourceAddress = "source_address_error";
inline constexpr std::string_view kCauseSourceName = "source_name_error";
inline constexpr std::string_view kCauseNameMatch = "name_match_error";

struct CorruptionRecord {
  std::string pub_id;
  int author_index = 0;
  std::string identity_id;
  std::string cause;
};

struct HomonymRecord {
  std::string taxonomy_class;  // external | inter_address | intra_address | perfect
  std::string victim_id;
  std::string clone_id;  // empty for external homonyms
  std::string pub_id;    // publication exercising the collision
  std::string expected_stage;
};

struct PerfectGroup {
  std::string primary;
  std::vector<std::string> ids;
};

struct TruthLedger {
  std::uint64_t seed = 0;
  std::vector<TruthEntry> truth;
  std::vector<CorruptionRecord> corruptions;
  std::vector<HomonymRecord> homonyms;
  std::vector<PerfectGroup> perfect_groups;

  std::map<std::pair<std::string, int>, std::string> cause_map() const {
    std::map<std::pair<std::string, int>, std::string> causes;
    for (const auto& c : corruptions) causes[{c.pub_id, c.author_index}] = c.cause;
    return causes;
  }

  std::int64_t homonym_count(std::string_view taxonomy_class) const {
    std::int64_t n = 0;
    for (const auto& h : homonyms) {
      if (h.taxonomy_class == taxonomy_class) ++n;
    }
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    nlohmann::json truth_arr = nlohmann::json::array();
    for (const auto& t : truth) {
      truth_arr.push_back({{"pub_id", t.pub_id},
                           {"author_index", t.author_index},
                           {"identity_id", t.identity_id}});
    }
    j["truth"] = truth_arr;
    nlohmann::json corr = nlohmann::json::array();
    for (const auto& c : corruptions) {
      corr.push_back({{"pub_id", c.pub_id},
                      {"author_index", c.author_index},
                      {"identity_id", c.identity_id},
                      {"cause", c.cause}});
    }
    j["corruptions"] = corr;
    nlohmann::json hom = nlohmann::json::array();
    for (const auto& h : homonyms) {
      hom.push_back({{"class", h.taxonomy_class},
                     {"victim_id", h.victim_id},
                     {"clone_id", h.clone_id},
                     {"pub_id", h.pub_id},
                     {"expected_stage", h.expected_stage}});
    }
    j["homonyms"] = hom;
    nlohmann::json perf = nlohmann::json::array();
    for (const auto& g : perfect_groups) {
      perf.push_back({{"primary", g.primary}, {"ids", g.ids}});
    }
    j["perfect_groups"] = perf;
    nlohmann::json counts;
    counts["truth_pairs"] = truth.size();
    counts["corruptions"] = corruptions.size();
    counts["homonyms"] = {{"external", homonym_count("external")},
                          {"inter_address", homonym_count("inter_address")},
                          {"intra_address", homonym_count("intra_address")},
                          {"perfect", homonym_count("perfect")}};
    j["counts"] = counts;
    return j;
  }

  static TruthLedger from_json(const nlohmann::json& j) {
    TruthLedger ledger;
    ledger.seed = j.value("seed", std::uint64_t{0});
    for (const auto& t : j.at("truth")) {
      ledger.truth.push_back({t.at("pub_id").get<std::string>(),
                              t.at("author_index").get<int>(),
                              t.at("identity_id").get<std::string>()});
    }
    for (const auto& c : j.at("corruptions")) {
      ledger.corruptions.push_back({c.at("pub_id").get<std::string>(),
                                    c.at("author_index").get<int>(),
                                    c.at("identity_id").get<std::string>(),
                                    c.at("cause").get<std::string>()});
    }
    for (const auto& h : j.at("homonyms")) {
      ledger.homonyms.push_back({h.at("class").get<std::string>(),
                                 h.at("victim_id").get<std::string>(),
                                 h.value("clone_id", std::string{}),
                                 h.at("pub_id").get<std::string>(),
                                 h.at("expected_stage").get<std::string>()});
    }
    for (const auto& g : j.at("perfect_groups")) {
      PerfectGroup group;
      group.primary = g.at("primary").get<std::string>();
      for (const auto& id : g.at("ids")) group.ids.push_back(id.get<std::string>());
      ledger.perfect_groups.push_back(std::move(group));
    }
    return ledger;
  }
};

/// False negatives tagged by their planted cause; unexplained ones land in
/// "unattributed".
inline std::map<std::string, std::int64_t> tag_fn_causes(
    const ComparisonDetail& detail,
    const std::map<std::pair<std::string, int>, std::string>& causes) {
  std::map<std::string, std::int64_t> tags;
  for (const auto& fn : detail.false_negatives) {
    auto it = causes.find({fn.pub_id, fn.author_index});
    if (it == causes.end()) {
      ++tags["unattributed"];
    } else {
      ++tags[it->second];
    }
  }
  return tags;
}

struct SynthRegistryRow {
  std::string identity_id;
  std::string surname;
  std::string first_names;
  std::string sds_code;
  std::string university_id;
  int snapshot_year = 0;
  std::string rank;
  std::string department;
};

struct SynthVocabularyRow {
  std::string rule_id;
  std::string pattern;
  std::string institution_id;
  int priority = 0;
};

struct SyntheticBundle {
  std::vector<Publication> publications;
  std::vector<SynthRegistryRow> registry_rows;
  std::vector<SynthVocabularyRow> vocabulary;
  std::vector<std::pair<std::string, std::string>> category_pairs;
  TruthLedger ledger;

  void write_registry_csv(std::ostream& out) const {
    std::vector<std::string> header = {"identity_id", "surname",      "first_names",
                                       "sds_code",    "university_id", "snapshot_year",
                                       "rank",        "department"};
    write_csv_record(out, header);
    for (const auto& r : registry_rows) {
      std::vector<std::string> row = {r.identity_id, r.surname,
                                      r.first_names, r.sds_code,
                                      r.university_id, std::to_string(r.snapshot_year),
                                      r.rank,        r.department};
      write_csv_record(out, row);
    }
  }

  void write_vocabulary_csv(std::ostream& out) const {
    std::vector<std::string> header = {"rule_id", "pattern", "institution_id", "priority"};
    write_csv_record(out, header);
    for (const auto& r : vocabulary) {
      std::vector<std::string> row = {r.rule_id, r.pattern, r.institution_id,
                                      std::to_string(r.priority)};
      write_csv_record(out, row);
    }
  }

  void write_category_map_csv(std::ostream& out) const {
    std::vector<std::string> header = {"subject_category", "sds_code"};
    write_csv_record(out, header);
    for (const auto& [category, sds] : category_pairs) {
      std::vector<std::string> row = {category, sds};
      write_csv_record(out, row);
    }
  }

  void write_to_dir(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(dir / "publications.csv", std::ios::binary);
      write_publications_csv(out, publications);
    }
    {
      std::ofstream out(dir / "registry.csv", std::ios::binary);
      write_registry_csv(out);
    }
    {
      std::ofstream out(dir / "vocabulary.csv", std::ios::binary);
      write_vocabulary_csv(out);
    }
    {
      std::ofstream out(dir / "category_map.csv", std::ios::binary);
      write_category_map_csv(out);
    }
    {
      std::ofstream out(dir / "truth.csv", std::ios::binary);
      write_truth_csv(out, ledger.truth);
    }
    {
      std::ofstream out(dir / "ledger.json", std::ios::binary);
      out << ledger.to_json().dump(2) << '\n';
    }
  }
};

namespace synth_detail {

// Bounded draws go through explicit arithmetic on the raw engine output so
// bundles are byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {  // inclusive
    if (hi <= lo) return lo;
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(next() % span);
  }

  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return real() < p; }

 private:
  std::mt19937_64 eng_;
};

struct University {
  std::string_view id;
  std::string_view pattern;  // vocabulary pattern, embedded verbatim in addresses
  std::string_view city;
  std::string_view zip;
};

inline constexpr std::array<University, 10> kUniversities = {{
    {"UNIBO", "Univ Bologna", "Bologna", "I-40127"},
    {"UNITO", "Univ Turin", "Turin", "I-10125"},
    {"UNIMORE", "Univ Modena & Reggio Emilia", "Modena", "I-41100"},
    {"UNIMI", "Univ Milan", "Milan", "I-20122"},
    {"UNIPD", "Univ Padua", "Padua", "I-35122"},
    {"UNIROMA1", "Univ Roma La Sapienza", "Rome", "I-00185"},
    {"UNINA", "Univ Naples Federico II", "Naples", "I-80138"},
    {"UNIPI", "Univ Pisa", "Pisa", "I-56126"},
    {"UNIFI", "Univ Florence", "Florence", "I-50121"},
    {"UNIGE", "Univ Genoa", "Genoa", "I-16126"},
}};

inline constexpr std::array<std::string_view, 16> kSds = {
    "FIS/01", "FIS/03", "CHIM/02",    "CHIM/03",    "MED/09", "MED/26",
    "BIO/10", "BIO/18", "ING-INF/05", "ING-INF/06", "MAT/05", "MAT/07",
    "GEO/01", "GEO/05", "AGR/01",     "AGR/16"};

inline constexpr std::array<std::string_view, 8> kCategories = {
    "Physics, condensed matter",
    "Chemistry, physical",
    "Medicine, general & internal",
    "Biochemistry & molecular biology",
    "Engineering, electrical & electronic",
    "Mathematics, applied",
    "Geosciences, multidisciplinary",
    "Agronomy"};

inline constexpr std::array<std::string_view, 8> kDepartments = {
    "Dipartimento di Fisica",       "Dipartimento di Chimica",
    "Dipartimento di Medicina",     "Dipartimento di Scienze Biologiche",
    "Dipartimento di Ingegneria",   "Dipartimento di Matematica",
    "Dipartimento di Geoscienze",   "Dipartimento di Agraria"};

inline int home_category(int sds) { return sds / 2; }
// Compatible with the category but at home in the next one: survives the
// WoS-SDS filter yet never accumulates correspondence on this category.
inline int neighbor_sds(int category) { return (2 * category + 2) % 16; }

inline constexpr std::array<std::string_view, 24> kSyllables = {
    "ROS", "MAR", "BER", "TIN", "NEL", "FER", "GAL", "LUC", "MON", "VIT", "DEL", "PAL",
    "COR", "BAL", "ZAN", "LAN", "TOR", "MEN", "DOL", "FRE", "GRI", "SER", "PIC", "RIZ"};

// Fixed-width syllable composition keeps every generated surname word unique
// per index and at least six letters long (so it can never be mistaken for
// an initials block).
inline std::string compose_surname_word(std::int64_t k) {
  std::string word{kSyllables[static_cast<std::size_t>(k % 24)]};
  k /= 24;
  word += kSyllables[static_cast<std::size_t>(k % 24)];
  k /= 24;
  while (k > 0) {
    word += kSyllables[static_cast<std::size_t>(k % 24)];
    k /= 24;
  }
  return word;
}

inline constexpr std::array<std::string_view, 32> kGivenNames = {
    "Andrea",   "Bruno",  "Carlo", "Dario",   "Elena",  "Fabio",   "Giulia", "Ilaria",
    "Laura",    "Marco",  "Nadia", "Paolo",   "Rita",   "Sergio",  "Tiziana", "Umberto",
    "Valeria",  "Walter", "Anna",  "Bianca",  "Cesare", "Domenico", "Emma",   "Franca",
    "Giorgio",  "Irene",  "Luisa", "Mario",   "Nicola", "Olga",    "Pietro", "Sonia"};

inline constexpr std::array<std::string_view, 3> kRanks = {"assistant", "associate", "full"};

struct Person {
  std::string id;
  std::vector<std::string> surname_words;  // uppercase
  std::vector<std::string> given_names;    // title case
  int sds = 0;
  int university = 0;
};

inline std::string surname_of(const Person& p) {
  std::string s;
  for (const auto& w : p.surname_words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

inline std::string given_names_of(const Person& p) {
  std::string s;
  for (const auto& n : p.given_names) {
    if (!s.empty()) s.push_back(' ');
    s += std::string(n);
  }
  return s;
}

inline std::vector<std::string> given_initials_of(const Person& p) {
  std::vector<std::string> initials;
  for (const auto& n : p.given_names) {
    initials.emplace_back(1, static_cast<char>(std::toupper(static_cast<unsigned char>(n[0]))));
  }
  return initials;
}

inline std::string render_token(const std::vector<std::string>& surname_words,
                                const std::vector<std::string>& initials) {
  std::string token;
  for (const auto& w : surname_words) {
    if (!token.empty()) token.push_back(' ');
    token += w;
  }
  if (initials.size() <= 2) {
    token.push_back(' ');
    for (const auto& i : initials) token += i;
  } else {
    for (const auto& i : initials) {
      token.push_back(' ');
      token += i;
    }
  }
  return token;
}

// Renders one of the listing forms of a person's name, exercising the
// compound-surname variants and the partial/reordered initials the sources
// produce. Every variant keeps at least one true initial, so a correct
// matcher must recover the pair.
inline std::string render_author_token(const Person& p, Rng& rng) {
  std::vector<std::string> initials = given_initials_of(p);
  if (initials.size() > 1) {
    if (rng.chance(0.3)) {
      std::string kept = initials[static_cast<std::size_t>(
          rng.uniform(0, static_cast<std::int64_t>(initials.size()) - 1))];
      initials = {kept};
    } else if (rng.chance(0.2)) {
      std::reverse(initials.begin(), initials.end());
    }
  }
  if (p.surname_words.size() == 1) {
    return render_token(p.surname_words, initials);
  }
  const std::string& w0 = p.surname_words[0];
  const std::string& w1 = p.surname_words[1];
  switch (rng.uniform(0, 9)) {
    case 0: case 1: case 2: case 3:
      return render_token({w0, w1}, initials);
    case 4:
      return render_token({w0}, initials);
    case 5:
      return render_token({w1}, initials);
    case 6: case 7: {
      std::vector<std::string> with_displaced = {std::string(1, w1[0])};
      with_displaced.insert(with_displaced.end(), initials.begin(), initials.end());
      return render_token({w0}, with_displaced);
    }
    default: {
      std::vector<std::string> with_displaced = initials;
      with_displaced.emplace_back(1, w0[0]);
      return render_token({w1}, with_displaced);
    }
  }
}

inline std::string full_token(const Person& p) {
  return render_token(p.surname_words, given_initials_of(p));
}

inline std::string address_of(int university, std::string_view department) {
  const University& u = kUniversities[static_cast<std::size_t>(university)];
  std::string out{u.pattern};
  out += ", ";
  out += department;
  out += ", ";
  out += u.city;
  out += ", ";
  out += u.zip;
  out += ", Italy";
  return out;
}

}  // namespace synth_detail

/// Generates the full bundle. Deterministic for a fixed config; every
/// planted pair, homonym, and corruption lands in the ledger.
inline SyntheticBundle generate_synthetic_corpus(const SyntheticConfig& cfg) {
  using namespace synth_detail;
  cfg.validate();
  Rng rng(cfg.rng_seed);
  SyntheticBundle bundle;
  bundle.ledger.seed = cfg.rng_seed;
  const int year = cfg.publication_year;
  const int snapshot_year = year - 1;

  // --- static tables -------------------------------------------------------
  for (std::size_t i = 0; i < kUniversities.size(); ++i) {
    char rule_id[24];
    std::snprintf(rule_id, sizeof(rule_id), "V%03zu", i + 1);
    bundle.vocabulary.push_back({rule_id, std::string(kUniversities[i].pattern),
                                 std::string(kUniversities[i].id), 10});
  }
  for (std::size_t cat = 0; cat < kCategories.size(); ++cat) {
    const auto add = [&](int sds) {
      bundle.category_pairs.emplace_back(std::string(kCategories[cat]),
                                         std::string(kSds[static_cast<std::size_t>(sds)]));
    };
    add(static_cast<int>(2 * cat));
    add(static_cast<int>(2 * cat + 1));
    add(neighbor_sds(static_cast<int>(cat)));
  }

  // --- base identities -----------------------------------------------------
  const std::int64_t n = cfg.n_identities;
  std::vector<Person> people;
  people.reserve(static_cast<std::size_t>(n));
  std::int64_t next_word = 0;
  auto next_id = [counter = std::int64_t{0}]() mutable {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "R%06lld", static_cast<long long>(counter++));
    return std::string(buf);
  };
  for (std::int64_t i = 0; i < n; ++i) {
    Person p;
    p.id = next_id();
    p.surname_words.push_back(compose_surname_word(next_word++));
    if (rng.chance(cfg.compound_surname_rate)) {
      p.surname_words.push_back(compose_surname_word(next_word++));
    }
    p.given_names.emplace_back(kGivenNames[static_cast<std::size_t>(rng.uniform(0, 31))]);
    if (rng.chance(cfg.multi_first_name_rate)) {
      for (;;) {
        std::string second{kGivenNames[static_cast<std::size_t>(rng.uniform(0, 31))]};
        if (second != p.given_names[0]) {
          p.given_names.push_back(second);
          break;
        }
      }
    }
    p.sds = static_cast<int>(i % 16);
    p.university = static_cast<int>((i / 16) % 10);
    people.push_back(std::move(p));
  }

  // --- victim selection ----------------------------------------------------
  const std::int64_t n_external = std::llround(cfg.external_homonym_rate * static_cast<double>(n));
  const std::int64_t n_inter = std::llround(cfg.inter_address_homonym_rate * static_cast<double>(n));
  const std::int64_t n_intra = std::llround(cfg.intra_address_homonym_rate * static_cast<double>(n));
  const std::int64_t n_perfect = std::llround(cfg.perfect_homonym_rate * static_cast<double>(n));
  const std::int64_t n_intra_shared = n_intra / 3;
  const std::int64_t n_intra_maxcorr = n_intra / 3;
  const std::int64_t n_intra_category = n_intra - n_intra_shared - n_intra_maxcorr;
  if (n_external + n_inter + n_intra + n_perfect > n) {
    throw ConfigError("homonym rates request more victims than identities exist");
  }

  enum class Role { free, victim, anchor };
  std::vector<Role> roles(people.size(), Role::free);
  std::vector<std::int64_t> victims_external, victims_inter, victims_intra_category,
      victims_intra_shared, victims_intra_maxcorr, victims_perfect;
  std::vector<std::int64_t> shared_anchor(people.size(), -1);

  std::int64_t free_count = n;
  auto take_free = [&](std::vector<std::int64_t>& out) -> bool {
    for (std::int64_t i = 0; i < n; ++i) {
      if (roles[static_cast<std::size_t>(i)] == Role::free) {
        roles[static_cast<std::size_t>(i)] = Role::victim;
        --free_count;
        out.push_back(i);
        return true;
      }
    }
    return false;
  };
  auto take_many = [&](std::int64_t count, std::vector<std::int64_t>& out, const char* what) {
    for (std::int64_t k = 0; k < count; ++k) {
      if (!take_free(out)) {
        throw ConfigError(std::string("not enough free identities for ") + what);
      }
    }
  };
  take_many(n_intra_shared, victims_intra_shared, "intra-address homonyms");
  take_many(n_intra_maxcorr, victims_intra_maxcorr, "intra-address homonyms");
  take_many(n_intra_category, victims_intra_category, "intra-address homonyms");
  take_many(n_inter, victims_inter, "inter-address homonyms");
  take_many(n_external, victims_external, "external homonyms");
  take_many(n_perfect, victims_perfect, "perfect homonyms");

  // Shared-SDS victims need a colleague in the same university and SDS to
  // act as the accepted co-author; recruit a free identity into that cell.
  for (std::int64_t v : victims_intra_shared) {
    std::int64_t anchor = -1;
    for (std::int64_t i = 0; i < n; ++i) {
      if (roles[static_cast<std::size_t>(i)] == Role::free) {
        anchor = i;
        break;
      }
    }
    if (anchor < 0) {
      throw ConfigError(
          "not enough free identities to anchor intra-address shared-SDS homonyms; "
          "increase n_identities");
    }
    roles[static_cast<std::size_t>(anchor)] = Role::anchor;
    --free_count;
    people[static_cast<std::size_t>(anchor)].university =
        people[static_cast<std::size_t>(v)].university;
    people[static_cast<std::size_t>(anchor)].sds = people[static_cast<std::size_t>(v)].sds;
    shared_anchor[static_cast<std::size_t>(v)] = anchor;
  }

  // Correspondence seeds: two disambiguated colleagues per SDS that hosts a
  // maximum-correspondence victim. Free identities are re-badged into the
  // SDS when its natural population ran out.
  std::set<int> maxcorr_sds;
  for (std::int64_t v : victims_intra_maxcorr) {
    maxcorr_sds.insert(people[static_cast<std::size_t>(v)].sds);
  }
  std::map<int, std::vector<std::int64_t>> seeds_by_sds;
  std::set<std::int64_t> seed_indices;
  for (int sds : maxcorr_sds) {
    auto& seeds = seeds_by_sds[sds];
    for (std::int64_t i = 0; i < n && seeds.size() < 2; ++i) {
      if (roles[static_cast<std::size_t>(i)] == Role::free &&
          people[static_cast<std::size_t>(i)].sds == sds && !seed_indices.count(i)) {
        seeds.push_back(i);
        seed_indices.insert(i);
      }
    }
    for (std::int64_t i = 0; i < n && seeds.size() < 2; ++i) {
      if (roles[static_cast<std::size_t>(i)] == Role::free && !seed_indices.count(i)) {
        people[static_cast<std::size_t>(i)].sds = sds;
        seeds.push_back(i);
        seed_indices.insert(i);
      }
    }
    if (seeds.size() < 2) {
      throw ConfigError("not enough free identities of SDS " +
                        std::string(kSds[static_cast<std::size_t>(sds)]) +
                        " to seed the correspondence table; increase n_identities");
    }
  }

  // --- clones --------------------------------------------------------------
  std::vector<Person> clones;
  std::map<std::int64_t, std::size_t> clone_of;  // victim index -> clones[] index
  auto add_clone = [&](std::int64_t victim, int university, int sds) {
    const Person& v = people[static_cast<std::size_t>(victim)];
    Person c;
    c.id = next_id();
    c.surname_words = v.surname_words;
    c.given_names = v.given_names;
    c.university = university;
    c.sds = sds;
    clone_of[victim] = clones.size();
    clones.push_back(std::move(c));
  };
  for (std::int64_t v : victims_inter) {
    const Person& p = people[static_cast<std::size_t>(v)];
    int other = static_cast<int>((p.university + 1 + rng.uniform(0, 8)) % 10);
    add_clone(v, other, p.sds);
  }
  for (std::int64_t v : victims_intra_category) {
    const Person& p = people[static_cast<std::size_t>(v)];
    add_clone(v, p.university, (p.sds + 4) % 16);  // incompatible with the home category
  }
  for (std::int64_t v : victims_intra_shared) {
    const Person& p = people[static_cast<std::size_t>(v)];
    add_clone(v, p.university, p.sds ^ 1);  // sibling home SDS: survives the category filter
  }
  for (std::int64_t v : victims_intra_maxcorr) {
    const Person& p = people[static_cast<std::size_t>(v)];
    add_clone(v, p.university, neighbor_sds(home_category(p.sds)));
  }
  for (std::int64_t v : victims_perfect) {
    const Person& p = people[static_cast<std::size_t>(v)];
    add_clone(v, p.university, p.sds);
    bundle.ledger.perfect_groups.push_back(
        {p.id, {p.id, clones[clone_of[v]].id}});
  }

  // --- registry rows -------------------------------------------------------
  auto registry_row = [&](const Person& p) {
    SynthRegistryRow row;
    row.identity_id = p.id;
    row.surname = surname_of(p);
    row.first_names = given_names_of(p);
    row.sds_code = std::string(kSds[static_cast<std::size_t>(p.sds)]);
    row.university_id = std::string(kUniversities[static_cast<std::size_t>(p.university)].id);
    row.snapshot_year = snapshot_year;
    row.rank = std::string(kRanks[static_cast<std::size_t>(rng.uniform(0, 2))]);
    row.department = std::string(kDepartments[static_cast<std::size_t>(home_category(p.sds))]);
    return row;
  };
  for (const auto& p : people) bundle.registry_rows.push_back(registry_row(p));
  for (const auto& c : clones) bundle.registry_rows.push_back(registry_row(c));

  // --- publications --------------------------------------------------------
  std::int64_t pub_counter = 0;
  auto next_pub_id = [&]() {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "P%06lld", static_cast<long long>(++pub_counter));
    return std::string(buf);
  };
  auto department_of = [&](const Person& p) {
    return std::string(kDepartments[static_cast<std::size_t>(home_category(p.sds))]);
  };
  auto make_pub = [&](const std::vector<std::string>& tokens, int category, int university,
                      std::string_view department) {
    Publication pub;
    pub.pub_id = next_pub_id();
    pub.year = year;
    pub.doc_type = DocType::article;
    pub.raw_doc_type = "article";
    pub.author_tokens = tokens;
    pub.addresses = {address_of(university, department)};
    pub.subject_categories = {std::string(kCategories[static_cast<std::size_t>(category)])};
    return pub;
  };
  auto add_truth = [&](const Publication& pub, int author_index, const std::string& id) {
    bundle.ledger.truth.push_back({pub.pub_id, author_index, id});
  };

  // Coverage publications pin the correspondence profile of every SDS that a
  // maximum-correspondence victim belongs to.
  for (const auto& [sds, seeds] : seeds_by_sds) {
    for (std::int64_t seed_idx : seeds) {
      const Person& p = people[static_cast<std::size_t>(seed_idx)];
      Publication pub = make_pub({render_author_token(p, rng)}, home_category(sds),
                                 p.university, department_of(p));
      add_truth(pub, 0, p.id);
      bundle.publications.push_back(std::move(pub));
    }
  }

  // Homonym exercise publications.
  auto exercise_single = [&](std::int64_t victim, std::string_view taxonomy_class,
                             std::string_view expected_stage) {
    const Person& p = people[static_cast<std::size_t>(victim)];
    Publication pub = make_pub({full_token(p)}, home_category(p.sds), p.university,
                               department_of(p));
    add_truth(pub, 0, p.id);
    std::string clone_id = clone_of.count(victim) ? clones[clone_of[victim]].id : std::string{};
    bundle.ledger.homonyms.push_back({std::string(taxonomy_class), p.id, clone_id,
                                      pub.pub_id, std::string(expected_stage)});
    bundle.publications.push_back(std::move(pub));
  };
  for (std::int64_t v : victims_inter) exercise_single(v, "inter_address", "address_filter");
  for (std::int64_t v : victims_intra_category) {
    exercise_single(v, "intra_address", "wos_sds_filter");
  }
  for (std::int64_t v : victims_intra_shared) {
    const Person& p = people[static_cast<std::size_t>(v)];
    const Person& anchor = people[static_cast<std::size_t>(shared_anchor[static_cast<std::size_t>(v)])];
    Publication pub = make_pub({full_token(p), render_author_token(anchor, rng)},
                               home_category(p.sds), p.university, department_of(p));
    add_truth(pub, 0, p.id);
    add_truth(pub, 1, anchor.id);
    bundle.ledger.homonyms.push_back({"intra_address", p.id, clones[clone_of[v]].id,
                                      pub.pub_id, "shared_sds_filter"});
    bundle.publications.push_back(std::move(pub));
  }
  for (std::int64_t v : victims_intra_maxcorr) {
    exercise_single(v, "intra_address", "max_correspondence_filter");
  }
  for (std::int64_t v : victims_perfect) {
    // No dedicated publication: the collision is absorbed when the registry
    // amalgamates the pair, after which the identity publishes like any
    // other under the primary id.
    const Person& p = people[static_cast<std::size_t>(v)];
    bundle.ledger.homonyms.push_back(
        {"perfect", p.id, clones[clone_of[v]].id, "", "amalgamated_at_load"});
    roles[static_cast<std::size_t>(v)] = Role::free;
  }
  for (std::int64_t v : victims_external) {
    // The shadow author shares the victim's name but works at another
    // organization; the address filter clears the spurious pair.
    const Person& p = people[static_cast<std::size_t>(v)];
    int other = static_cast<int>((p.university + 1 + rng.uniform(0, 8)) % 10);
    Publication pub = make_pub({full_token(p)}, home_category(p.sds), other,
                               department_of(p));
    bundle.ledger.homonyms.push_back(
        {"external", p.id, "", pub.pub_id, "address_filter"});
    bundle.publications.push_back(std::move(pub));
  }

  // Corruption publications: one per planted false negative, single-author
  // so the ledger attribution is exact.
  std::vector<std::int64_t> free_pool;
  for (std::int64_t i = 0; i < n; ++i) {
    if (roles[static_cast<std::size_t>(i)] == Role::free) free_pool.push_back(i);
  }
  std::size_t free_cursor = 0;
  auto next_free = [&]() -> const Person& {
    if (free_pool.empty()) {
      throw ConfigError("no identities left for corruption publications; lower the rates");
    }
    const Person& p = people[static_cast<std::size_t>(free_pool[free_cursor])];
    free_cursor = (free_cursor + 1) % free_pool.size();
    return p;
  };
  auto plant = [&](std::int64_t count, std::string_view cause) {
    for (std::int64_t k = 0; k < count; ++k) {
      const Person& p = next_free();
      Publication pub;
      if (cause == kCauseAuthorAddress || cause == kCauseSourceAddress) {
        int other = static_cast<int>((p.university + 1 + rng.uniform(0, 8)) % 10);
        pub = make_pub({full_token(p)}, home_category(p.sds), other, department_of(p));
      } else if (cause == kCauseAddressRecognition) {
        // The true affiliation is garbled beyond the vocabulary; a clean
        // foreign address still resolves, so the true pair is eliminated.
        int other = static_cast<int>((p.university + 1 + rng.uniform(0, 8)) % 10);
        pub = make_pub({full_token(p)}, home_category(p.sds), other, department_of(p));
        const auto& u = kUniversities[static_cast<std::size_t>(p.university)];
        std::string garbled = "Osped Civile ";
        garbled += u.city;
        garbled += ", Reparto ";
        garbled += compose_surname_word(rng.uniform(0, 500));
        garbled += ", Italy";
        pub.addresses.insert(pub.addresses.begin(), garbled);
      } else if (cause == kCauseWosSds) {
        int far_category = home_category((p.sds + 4) % 16);
        pub = make_pub({full_token(p)}, far_category, p.university, department_of(p));
      } else if (cause == kCauseSourceName) {
        Person garbled = p;
        garbled.surname_words[0] += "Z";  // one edit past the exact-match threshold
        pub = make_pub({full_token(garbled)}, home_category(p.sds), p.university,
                       department_of(p));
      } else {  // kCauseNameMatch
        std::vector<std::string> wrong_initial = {"X"};
        pub = make_pub({render_token(p.surname_words, wrong_initial)}, home_category(p.sds),
                       p.university, department_of(p));
      }
      add_truth(pub, 0, p.id);
      bundle.ledger.corruptions.push_back({pub.pub_id, 0, p.id, std::string(cause)});
      bundle.publications.push_back(std::move(pub));
    }
  };
  const double np = static_cast<double>(cfg.n_publications);
  plant(std::llround(cfg.wrong_affiliation_rate * np), kCauseAuthorAddress);
  plant(std::llround(cfg.cross_category_publish_rate * np), kCauseWosSds);
  plant(std::llround(cfg.address_garble_rate * np), kCauseAddressRecognition);
  plant(std::llround(cfg.source_address_error_rate * np), kCauseSourceAddress);
  plant(std::llround(cfg.source_name_error_rate * np), kCauseSourceName);
  plant(std::llround(cfg.name_match_error_rate * np), kCauseNameMatch);

  if (static_cast<std::int64_t>(bundle.publications.size()) > cfg.n_publications) {
    throw ConfigError("n_publications too small for the requested homonym and corruption "
                      "rates: need at least " +
                      std::to_string(bundle.publications.size()));
  }

  // Ordinary publications: research groups inside one university publishing
  // in the home categories of their SDS pair.
  std::map<std::pair<int, int>, std::vector<std::int64_t>> groups;  // (univ, category)
  for (std::int64_t i : free_pool) {
    const Person& p = people[static_cast<std::size_t>(i)];
    groups[{p.university, home_category(p.sds)}].push_back(i);
  }
  std::int64_t remaining = cfg.n_publications - static_cast<std::int64_t>(bundle.publications.size());
  if (remaining > 0 && free_pool.empty()) {
    throw ConfigError("no identities left for ordinary publications; lower the rates");
  }
  for (std::int64_t k = 0; k < remaining; ++k) {
    const Person& lead = people[static_cast<std::size_t>(
        free_pool[static_cast<std::size_t>(k) % free_pool.size()])];
    int category = home_category(lead.sds);
    const auto& cell = groups[{lead.university, category}];
    std::vector<const Person*> authors = {&lead};
    std::int64_t extra = rng.uniform(0, cfg.max_coauthors - 1);
    for (std::int64_t e = 0; e < extra && authors.size() < cell.size(); ++e) {
      const Person* candidate = &people[static_cast<std::size_t>(
          cell[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(cell.size()) - 1))])];
      if (std::find(authors.begin(), authors.end(), candidate) == authors.end()) {
        authors.push_back(candidate);
      }
    }
    std::vector<std::string> tokens;
    tokens.reserve(authors.size());
    for (const Person* a : authors) tokens.push_back(render_author_token(*a, rng));
    Publication pub = make_pub(tokens, category, lead.university, department_of(lead));
    for (std::size_t a = 0; a < authors.size(); ++a) {
      add_truth(pub, static_cast<int>(a), authors[a]->id);
    }
    bundle.publications.push_back(std::move(pub));
  }

  std::sort(bundle.ledger.truth.begin(), bundle.ledger.truth.end(),
            [](const TruthEntry& a, const TruthEntry& b) {
              if (a.pub_id != b.pub_id) return a.pub_id < b.pub_id;
              return a.author_index < b.author_index;
            });
  return bundle;
}

}  // namespace nomina

#endif  // NOMINA_SYNTH_HPP
