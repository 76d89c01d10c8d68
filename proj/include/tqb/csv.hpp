// Copyright 2026 The tqb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tqb::csv {

/// Decimal with 12 significant digits, '.' separator, independent of locale.
std::string number(double x);
/// Empty field for a missing value.
std::string number(const std::optional<double>& x);
/// Round-trip exact representation (17 significant digits).
std::string exact(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // missing fields read as NaN

  /// Index of the first column whose header starts with `prefix`; throws
  /// ParseError if absent.
  std::size_t column(const std::string& prefix) const;
  std::vector<double> column_values(const std::string& prefix) const;
};

/// Parses a comma-separated numeric table with one header line. Lines
/// starting with '#' are skipped.
Table read(std::istream& is);
Table read_file(const std::string& path);

}  // namespace tqb::csv
