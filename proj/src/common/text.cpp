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

#include "matchprobe/text.hpp"

#include <algorithm>
#include <unordered_set>

namespace matchprobe::text {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (const char c : text) {
    if (is_word_byte(static_cast<unsigned char>(c))) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (const char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string name_key(std::string_view name) {
  std::string key = normalize_whitespace(name);
  std::transform(key.begin(), key.end(), key.begin(), lower);
  return key;
}

bool is_number(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const std::string_view t = trim(text);
  for (std::size_t i = 0; i < t.size(); ++i) {
    cur.push_back(t[i]);
    const bool terminal = t[i] == '.' || t[i] == '!' || t[i] == '?';
    if (terminal && (i + 1 == t.size() || is_space(t[i + 1]))) {
      std::string s = normalize_whitespace(cur);
      if (!s.empty()) out.push_back(std::move(s));
      cur.clear();
    }
  }
  std::string rest = normalize_whitespace(cur);
  if (!rest.empty()) out.push_back(std::move(rest));
  return out;
}

std::size_t sentence_count(std::string_view text) { return split_sentences(text).size(); }

std::size_t added_sentence_count(std::string_view original, std::string_view draft) {
  const std::size_t before = sentence_count(original);
  const std::size_t after = sentence_count(draft);
  return after > before ? after - before : 0;
}

const std::vector<std::string_view>& stopwords() {
  static const std::vector<std::string_view> words = {
      "the",  "and",   "for",   "are",   "but",   "not",   "you",   "all",   "any",   "can",
      "had",  "her",   "was",   "one",   "our",   "out",   "has",   "him",   "his",   "how",
      "its",  "may",   "new",   "now",   "see",   "two",   "who",   "did",   "get",   "use",
      "this", "that",  "with",  "from",  "they",  "been",  "have",  "were",  "which", "their",
      "will", "would", "there", "these", "those", "into",  "such",  "than",  "then",  "also"};
  return words;
}

bool WordFilter::accepts(std::string_view token) const {
  if (token.size() < min_length) return false;
  if (drop_numbers && is_number(token)) return false;
  if (drop_stopwords) {
    static const std::unordered_set<std::string_view> set(stopwords().begin(), stopwords().end());
    if (set.contains(token)) return false;
  }
  return true;
}

}  // namespace matchprobe::text
