// Copyright 2026 The RQU Model Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rqu::cli {

/// One swept axis: `name=lin:min:max:count`, `name=log:min:max:count` or
/// `name=list:v1,v2,...`.
struct SweepAxis {
  std::string name;
  std::string scale;  // lin, log or list
  double min = 0, max = 0;
  std::size_t count = 0;
  std::vector<double> values;  // explicit list

  static SweepAxis parse(const std::string& text);
  std::vector<double> grid() const;
};

/// Axis names that `sweep` accepts.
const std::vector<std::string>& sweep_whitelist();

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a(const std::string& bytes);

/// Runs the command line and returns the process exit code. Results go to
/// `out` and to files under --out-dir; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rqu::cli
