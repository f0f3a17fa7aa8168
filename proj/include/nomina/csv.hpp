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

#ifndef NOMINA_CSV_HPP
#define NOMINA_CSV_HPP

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nomina/errors.hpp"

namespace nomina {

// RFC 4180 reader. Lines starting with '#' at a record boundary are treated
// as comments (audit headers written by the CLI).
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, std::string source = {})
      : in_(in), source_(std::move(source)) {
    // Swallow a UTF-8 BOM if present.
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (in_.gcount() != 3 || bom[1] != char(0xBB) || bom[2] != char(0xBF)) {
        throw FormatError(source_, 1, "bad byte-order mark");
      }
    }
  }

  /// Line number (1-based) where the last returned record started.
  std::size_t record_line() const { return record_line_; }
  const std::string& source() const { return source_; }

  std::optional<std::vector<std::string>> next_record() {
    skip_comments_and_blank();
    if (in_.peek() == EOF) return std::nullopt;
    record_line_ = line_;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (;;) {
      int ci = in_.get();
      if (ci == EOF) {
        if (quoted) throw FormatError(source_, record_line_, "unterminated quoted field");
        fields.push_back(std::move(field));
        return fields;
      }
      char c = static_cast<char>(ci);
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty()) throw FormatError(source_, line_, "stray quote inside field");
          quoted = true;
          break;
        case ',':
          fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r':
          if (in_.peek() == '\n') in_.get();
          [[fallthrough]];
        case '\n':
          ++line_;
          fields.push_back(std::move(field));
          return fields;
        default:
          field.push_back(c);
      }
    }
  }

 private:
  void skip_comments_and_blank() {
    for (;;) {
      int c = in_.peek();
      if (c == '\n') {
        in_.get();
        ++line_;
        continue;
      }
      if (c == '\r') {
        in_.get();
        if (in_.peek() == '\n') in_.get();
        ++line_;
        continue;
      }
      if (c == '#') {
        std::string dummy;
        std::getline(in_, dummy);
        ++line_;
        continue;
      }
      return;
    }
  }

  std::istream& in_;
  std::string source_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

inline void write_csv_field(std::ostream& out, std::string_view field, bool first) {
  bool need_quotes = (first && !field.empty() && field.front() == '#');
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      need_quotes = true;
      break;
    }
  }
  if (!need_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void write_csv_record(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    write_csv_field(out, fields[i], i == 0);
  }
  out << '\n';
}

// Header-indexed view over a CSV stream.
class CsvTable {
 public:
  CsvTable(std::istream& in, std::span<const std::string_view> required_columns,
           std::string source = {})
      : reader_(in, std::move(source)) {
    auto header = reader_.next_record();
    if (!header) {
      empty_ = true;
      return;
    }
    for (std::size_t i = 0; i < header->size(); ++i) {
      columns_[trim((*header)[i])] = i;
      column_names_.push_back(trim((*header)[i]));
    }
    for (auto col : required_columns) {
      if (!columns_.count(std::string(col))) {
        throw FormatError(reader_.source(), 1,
                          "missing required column '" + std::string(col) + "'");
      }
    }
  }

  bool empty_stream() const { return empty_; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  std::size_t record_line() const { return reader_.record_line(); }
  const std::string& source() const { return reader_.source(); }

  std::optional<std::vector<std::string>> next_row() {
    if (empty_) return std::nullopt;
    return reader_.next_record();
  }

  bool has_column(std::string_view name) const {
    return columns_.count(std::string(name)) > 0;
  }

  std::string_view field(const std::vector<std::string>& row, std::string_view name) const {
    auto it = columns_.find(std::string(name));
    if (it == columns_.end() || it->second >= row.size()) return {};
    return row[it->second];
  }

  static std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

 private:
  CsvReader reader_;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::string> column_names_;
  bool empty_ = false;
};

}  // namespace nomina

#endif  // NOMINA_CSV_HPP
