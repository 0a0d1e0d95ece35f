// Copyright 2026 The QKFE Authors
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
#include <string>
#include <string_view>
#include <vector>

namespace qkfe {

/// Shortest round-trip decimal form ("nan", "inf" for non-finite values).
std::string format_number(double value);

/// Inverse of format_number. Throws InvalidArgument unless the whole cell
/// is a number.
double parse_number(std::string_view cell);

/// Column-oriented text table with a commented metadata header.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells);
  void add_numeric_row(const std::vector<double>& values);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// Metadata lines are written as "# line"; columns are tab separated.
  void write_text(std::ostream& out, const std::vector<std::string>& metadata) const;

  /// One JSON object: {"metadata": [...], "columns": [...], "rows": [{...}]}.
  /// Numeric-looking cells become numbers, non-finite values become null.
  void write_json(std::ostream& out, const std::vector<std::string>& metadata) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace qkfe
