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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers backed by ICU.
namespace stancekit::text {

std::string nfc(std::string_view s);
std::string lower(std::string_view s);
std::string upper(std::string_view s);
std::string trim(std::string_view s);

// Decodes into code points; invalid sequences become U+FFFD.
std::vector<char32_t> decode(std::string_view s);
std::string encode(char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

bool is_space(char32_t c);
bool is_alpha(char32_t c);
bool is_digit(char32_t c);
bool is_upper(char32_t c);
bool is_punct(char32_t c);
bool is_symbol(char32_t c);

bool has_alpha(std::string_view s);
bool starts_upper(std::string_view s);
bool ends_with(std::string_view s, std::string_view suffix);

// Splits on `sep`, keeping empty fields.
std::vector<std::string> split(std::string_view s, char sep);
// Splits on runs of Unicode whitespace.
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Number of code points.
std::size_t length(std::string_view s);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 1469598103934665603ULL);
std::string hex64(std::uint64_t v);

}  // namespace stancekit::text
