// Copyright 2026 The matchprobe Authors
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
#include <string>
#include <string_view>
#include <vector>

namespace matchprobe::text {

// Lowercases ASCII and splits on runs of characters that are not ASCII
// alphanumerics. Bytes >= 0x80 count as word characters so UTF-8 words
// survive intact.
std::vector<std::string> tokenize(std::string_view text);

std::string_view trim(std::string_view s);

// Trims and collapses internal whitespace runs to one space.
std::string normalize_whitespace(std::string_view s);

// Case-insensitive, whitespace-normalized key used for reviewer name matching.
std::string name_key(std::string_view name);

bool is_number(std::string_view token);

// Splits on '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view text);
std::size_t sentence_count(std::string_view text);

// Net number of sentences `draft` adds over `original` (never negative).
std::size_t added_sentence_count(std::string_view original, std::string_view draft);

struct WordFilter {
  std::size_t min_length = 3;
  bool drop_numbers = true;
  bool drop_stopwords = true;

  bool accepts(std::string_view token) const;
};

// The fixed 50-word English stopword list used by the default filter.
const std::vector<std::string_view>& stopwords();

}  // namespace matchprobe::text
