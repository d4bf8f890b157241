// Copyright 2026 The theta-kernels Authors
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

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace theta_kernels {

/// Full-precision decimal rendering (17 significant digits, round-trips).
std::string format_number(double v);

/// Numeric CSV table. A first row that does not parse as numbers is taken as the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows);

/// Parses "1,2.5,3" into numbers; throws ValidationError on junk.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace theta_kernels
