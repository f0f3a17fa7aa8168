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

#ifndef NOMINA_ERRORS_HPP
#define NOMINA_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace nomina {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or contract-violating input data. Carries file/line context
/// when the source is a stream.
class FormatError : public Error {
 public:
  FormatError(std::string_view source, std::size_t line, const std::string& what)
      : Error(compose(source, line, what)), source_(source), line_(line) {}
  explicit FormatError(const std::string& what) : Error(what), line_(0) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  static std::string compose(std::string_view source, std::size_t line,
                             const std::string& what) {
    std::string msg;
    if (!source.empty()) {
      msg.append(source);
      msg.push_back(':');
    }
    if (line > 0) {
      msg.append(std::to_string(line));
      msg.append(": ");
    } else if (!msg.empty()) {
      msg.append(" ");
    }
    msg.append(what);
    return msg;
  }

  std::string source_;
  std::size_t line_;
};

class DuplicatePubIdError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DuplicateIdentityYearError : public FormatError {
 public:
  using FormatError::FormatError;
};

class MissingFieldError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Two vocabulary rules with the same pattern and priority but different
/// institutions.
class ConflictingRuleError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Invalid run or generator configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside its mathematical domain (sampling formula inputs).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A name token that is empty after normalization.
class EmptyTokenError : public Error {
 public:
  using Error::Error;
};

/// A name token from which no initials block can be isolated.
class NoInitialsError : public Error {
 public:
  using Error::Error;
};

/// The registry has no snapshot for the requested join year.
class MissingSnapshotError : public Error {
 public:
  explicit MissingSnapshotError(int year)
      : Error("registry has no snapshot for year " + std::to_string(year)),
        year_(year) {}
  int year() const { return year_; }

 private:
  int year_;
};

}  // namespace nomina

#endif  // NOMINA_ERRORS_HPP
