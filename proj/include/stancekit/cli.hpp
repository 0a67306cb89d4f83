// Copyright 2026 The stancekit Authors
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

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace stancekit::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kContract = 3, kInternal = 4 };

// Maps a library exception onto the exit-code contract.
int exit_code_for(const std::exception& e);

// Runs one subcommand. args[0] is the program name. Diagnostics go to `err`;
// console summaries (not files) go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Environment variable naming the default resource directory, which holds
// lexicons/manifest.json and source_stance.tsv.
inline constexpr const char* kResourceEnv = "STANCEKIT_RESOURCES";

}  // namespace stancekit::cli
