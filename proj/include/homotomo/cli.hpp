// Copyright 2026 The homotomo Authors
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

#ifndef HOMOTOMO_CLI_HPP
#define HOMOTOMO_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace homotomo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (without the program name). Returns the process exit code:
/// 0 success, 2 usage or validation error, 3 numerical failure, 1 anything else.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace homotomo::cli

#endif
