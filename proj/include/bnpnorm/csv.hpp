// Copyright 2026 The bnpnorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Numeric CSV input and output.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bnpnorm/errors.hpp"
#include "bnpnorm/mahalanobis.hpp"

namespace bnpnorm {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

// Splits one record. Quoted fields may not contain commas or newlines; this
// reader only needs numbers and simple header names.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = trim(line.substr(start, comma - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = trim(field.substr(1, field.size() - 2));
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

// Parses CSV text into a DataMatrix. A first record with any non-numeric
// field is taken as a header. Blank lines are skipped; line numbers in
// ParseError are 1-based physical lines, columns are 1-based fields.
[[nodiscard]] inline DataMatrix parse_csv(std::string_view text) {
  std::vector<double> cells;
  std::size_t m = 0;
  std::size_t rows = 0;
  bool first_record = true;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;

    const auto fields = detail::split_fields(line);
    if (first_record) {
      first_record = false;
      m = fields.size();
      double scratch = 0.0;
      bool numeric = true;
      for (const auto f : fields) numeric = numeric && detail::parse_number(f, scratch);
      if (!numeric) continue;
    }
    if (fields.size() != m) {
      throw ParseError(line_no, std::min(fields.size(), m) + 1,
                       "expected " + std::to_string(m) + " fields, found " +
                           std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      if (!detail::parse_number(fields[j], v)) {
        throw ParseError(line_no, j + 1,
                         "not a finite number: '" + std::string(fields[j]) + "'");
      }
      cells.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw EmptyInput("no data rows");

  Matrix values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cells[i * m + j];
    }
  }
  return DataMatrix(std::move(values));
}

[[nodiscard]] inline DataMatrix ingest_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EmptyInput("cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return parse_csv(text);
}

// Shortest decimal form that reads back to the same double.
[[nodiscard]] inline std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

inline void write_csv(std::ostream& out, const DataMatrix& data,
                      const std::vector<std::string>& header = {}) {
  const Matrix& v = data.values();
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      out << (j ? "," : "") << header[j];
    }
    out << '\n';
  }
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      out << (j ? "," : "") << format_double(v(i, j));
    }
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const DataMatrix& data,
                      const std::vector<std::string>& header = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidConfig("cannot write '" + path + "'");
  write_csv(out, data, header);
}

}  // namespace bnpnorm
