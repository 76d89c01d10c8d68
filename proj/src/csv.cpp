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

#include "tqb/csv.hpp"

#include "tqb/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace tqb::csv {

namespace {

std::string printf_g(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0 into 0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_field(const std::string& s, int line) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return std::numeric_limits<double>::quiet_NaN();
  std::size_t e = s.find_last_not_of(" \t");
  const std::string t = s.substr(b, e - b + 1);
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("not a number: '" + t + "'", line);
  }
  return v;
}

}  // namespace

std::string number(double x) { return printf_g(x, 12); }

std::string number(const std::optional<double>& x) { return x ? number(*x) : std::string(); }

std::string exact(double x) { return printf_g(x, 17); }

std::size_t Table::column(const std::string& prefix) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind(prefix, 0) == 0) return i;
  }
  throw ParseError("missing column '" + prefix + "'");
}

std::vector<double> Table::column_values(const std::string& prefix) const {
  const std::size_t c = column(prefix);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

Table read(std::istream& is) {
  Table t;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_field(f, lineno));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("empty CSV");
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read(in);
}

}  // namespace tqb::csv
