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

#include "nomina/normalize.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "nomina/model.hpp"

namespace nomina {
namespace {

TEST(NormalizeToken, ApostropheFoldsAway) {
  auto n = normalize_token("DADDATO S");
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"DADDATO"}));
  EXPECT_EQ(n.initials, (std::vector<std::string>{"S"}));
  // The registry spelling normalizes to the same surname word.
  auto reg = normalize_identity_name("D'ADDATO", std::vector<std::string>{"Sergio"});
  EXPECT_EQ(reg.surname_words, n.surname_words);
}

TEST(NormalizeToken, TwoLetterInitialsBlock) {
  auto n = normalize_token("ROSSI GM");
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"ROSSI"}));
  EXPECT_EQ(n.initials, (std::vector<std::string>{"G", "M"}));
}

TEST(NormalizeToken, CaseInsensitive) {
  EXPECT_EQ(normalize_token("rossi gm"), normalize_token("ROSSI GM"));
  EXPECT_EQ(normalize_token("Rossi Gm"), normalize_token("ROSSI GM"));
}

TEST(NormalizeToken, CompoundSurname) {
  auto n = normalize_token("LEVIALDI GHIRON N");
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"LEVIALDI", "GHIRON"}));
  EXPECT_EQ(n.initials, (std::vector<std::string>{"N"}));
}

TEST(NormalizeToken, SeparatedInitialsRun) {
  auto n = normalize_token("ROSSI G M");
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"ROSSI"}));
  EXPECT_EQ(n.initials, (std::vector<std::string>{"G", "M"}));
}

TEST(NormalizeToken, DiacriticsFoldToAscii) {
  auto n = normalize_token("MU\xC3\x9CLLER J");  // MUÜLLER
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"MUULLER"}));
  auto m = normalize_token("NU\xC3\xB1" "EZ P");  // NUñEZ
  EXPECT_EQ(m.surname_words, (std::vector<std::string>{"NUNEZ"}));
}

TEST(NormalizeToken, HyphenSplitsWords) {
  auto n = normalize_token("GARCIA-LOPEZ M");
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"GARCIA", "LOPEZ"}));
  NormalizationConfig joined;
  joined.split_hyphens = false;
  auto j = normalize_token("GARCIA-LOPEZ M", joined);
  EXPECT_EQ(j.surname_words, (std::vector<std::string>{"GARCIALOPEZ"}));
}

TEST(NormalizeToken, EmptyAfterCleaningThrows) {
  EXPECT_THROW(normalize_token("   "), EmptyTokenError);
  EXPECT_THROW(normalize_token("..--.."), EmptyTokenError);
}

TEST(NormalizeToken, SurnameOnlyThrowsNoInitials) {
  EXPECT_THROW(normalize_token("ROSSI"), NoInitialsError);
  // A long trailing capital run is a surname word, not an initials block.
  EXPECT_THROW(normalize_token("ROSSI BIANCHI"), NoInitialsError);
}

TEST(NormalizeToken, IdempotentThroughRendering) {
  for (const char* raw : {"DADDATO S", "ROSSI GM", "LEVIALDI GHIRON N", "rossi g m c",
                          "D'addato s", "GARCIA-LOPEZ MC"}) {
    NormalizedName once = normalize_token(raw);
    NormalizedName twice = normalize_token(once.token_string());
    EXPECT_EQ(once, twice) << raw;
  }
}

TEST(NormalizeToken, RenderingManyInitialsStaysParseable) {
  NormalizedName n{{"ROSSI"}, {"A", "B", "C"}};
  EXPECT_EQ(n.token_string(), "ROSSI A B C");
  EXPECT_EQ(normalize_token(n.token_string()), n);
}

TEST(NormalizeIdentityName, MultipleGivenNames) {
  auto n = normalize_identity_name("LAMBERTI", std::vector<std::string>{"Maria", "Carla"});
  EXPECT_EQ(n.surname_words, (std::vector<std::string>{"LAMBERTI"}));
  EXPECT_EQ(n.initials, (std::vector<std::string>{"M", "C"}));
}

TEST(NormalizeIdentityName, NoGivenNamesThrows) {
  EXPECT_THROW(normalize_identity_name("ROSSI", std::vector<std::string>{}), NoInitialsError);
}

TEST(Levenshtein, BasicDistances) {
  EXPECT_EQ(levenshtein("ROSSI", "ROSSI"), 0);
  EXPECT_EQ(levenshtein("ROSSI", "ROSSO"), 1);
  EXPECT_EQ(levenshtein("ROSSI", "ROSS"), 1);
  EXPECT_EQ(levenshtein("ROSSI", "BIANCHI"), 6);
  EXPECT_EQ(levenshtein("", "ABC"), 3);
}

// Property: case-insensitivity over random tokens.
TEST(NormalizeToken, CaseInsensitivityProperty) {
  std::mt19937 rng(7);
  const std::string letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  for (int trial = 0; trial < 200; ++trial) {
    std::string word;
    int len = 3 + static_cast<int>(rng() % 8);
    for (int i = 0; i < len; ++i) word += letters[rng() % 26];
    std::string token = word + " " + letters[rng() % 26];
    std::string lowered = token;
    for (char& c : lowered) {
      if (rng() % 2) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    EXPECT_EQ(normalize_token(token), normalize_token(lowered)) << token;
  }
}

TEST(CandidatePairStatus, EliminatedNeverAccepted) {
  IdentityRecord identity;
  identity.identity_id = "X1";
  identity.sds_code = "FIS/01";
  identity.university_id = "UNIBO";
  AuthorInstance author{"P1", 0, "ROSSI G", normalize_token("ROSSI G")};
  CandidatePair pair(author, identity, "ROSSI G");
  pair.eliminate(Stage::address_filter);
  EXPECT_THROW(pair.accept(Stage::wos_sds_filter), Error);
  EXPECT_EQ(pair.eliminated_by(), Stage::address_filter);
}

TEST(CandidatePairStatus, AcceptedNeverEliminated) {
  IdentityRecord identity;
  identity.identity_id = "X1";
  AuthorInstance author{"P1", 0, "ROSSI G", normalize_token("ROSSI G")};
  CandidatePair pair(author, identity, "ROSSI G");
  pair.accept(Stage::wos_sds_filter);
  EXPECT_THROW(pair.eliminate(Stage::shared_sds_filter), Error);
  EXPECT_TRUE(pair.accepted());
}

}  // namespace
}  // namespace nomina
