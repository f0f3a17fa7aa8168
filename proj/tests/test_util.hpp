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

#ifndef NOMINA_TESTS_TEST_UTIL_HPP
#define NOMINA_TESTS_TEST_UTIL_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nomina/eval.hpp"
#include "nomina/ingest.hpp"
#include "nomina/pipeline.hpp"

namespace nomina::testutil {

inline std::filesystem::path data_dir() { return NOMINA_TEST_DATA_DIR; }
inline std::filesystem::path golden_dir() { return data_dir() / "golden"; }
inline std::string cli_path() { return NOMINA_CLI_PATH; }

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("nomina_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct GoldenFixture {
  PublicationCorpus corpus;
  Registry registry;
  std::vector<AddressRule> rules;
  CategoryCompatibility compat;
  std::vector<TruthEntry> truth;
};

inline GoldenFixture load_golden() {
  GoldenFixture fx;
  fx.corpus = parse_publications_file(golden_dir() / "publications.csv");
  fx.registry = Registry::parse_file(golden_dir() / "registry.csv");
  fx.rules = load_address_vocabulary_file(golden_dir() / "vocabulary.csv");
  fx.compat = CategoryCompatibility::parse_file(golden_dir() / "category_map.csv");
  std::ifstream truth_in(golden_dir() / "truth.csv");
  fx.truth = read_truth_csv(truth_in, "truth.csv");
  return fx;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::string& args, const std::string& tag) {
  TempDir io("cli_io_" + tag);
  auto out_path = io.path / "out.txt";
  auto err_path = io.path / "err.txt";
  std::string cmd = cli_path() + " " + args + " > " + out_path.string() + " 2> " +
                    err_path.string();
  int rc = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

}  // namespace nomina::testutil

#endif  // NOMINA_TESTS_TEST_UTIL_HPP
