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

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace stancekit::io {

std::string read_file(const std::filesystem::path& path);
// Lines without trailing '\n' / '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the target on commit().
// If the writer is destroyed without commit() the temp file is removed, so a
// failed command never leaves a truncated output behind.
class AtomicWriter {
 public:
  explicit AtomicWriter(std::filesystem::path target);
  ~AtomicWriter();
  AtomicWriter(const AtomicWriter&) = delete;
  AtomicWriter& operator=(const AtomicWriter&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

// Minimal RFC 4180 quoting.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

}  // namespace stancekit::io
