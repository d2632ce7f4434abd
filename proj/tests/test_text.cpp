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

#include <gtest/gtest.h>

#include "matchprobe/text.hpp"

using namespace matchprobe;

TEST(Tokenize, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(text::tokenize("Graph Neural-Networks, 2nd ed."),
            (std::vector<std::string>{"graph", "neural", "networks", "2nd", "ed"}));
  EXPECT_TRUE(text::tokenize("  ...  ").empty());
}

TEST(Tokenize, KeepsUtf8Bytes) {
  EXPECT_EQ(text::tokenize("Schrödinger équation"), (std::vector<std::string>{"schrödinger", "équation"}));
}

TEST(Sentences, SplitsOnTerminalPunctuation) {
  EXPECT_EQ(text::split_sentences("One. Two!  Three? Four"),
            (std::vector<std::string>{"One.", "Two!", "Three?", "Four"}));
  // A period inside a token is not a boundary.
  EXPECT_EQ(text::sentence_count("Version 2.5 is out. Done."), 2u);
  EXPECT_EQ(text::sentence_count(""), 0u);
}

TEST(Sentences, AddedCountNeverNegative) {
  EXPECT_EQ(text::added_sentence_count("A b. C d.", "New one. A b. C d."), 1u);
  EXPECT_EQ(text::added_sentence_count("A b. C d.", "A b."), 0u);
  EXPECT_EQ(text::added_sentence_count("A b.", "A b. X. Y. Z."), 3u);
}

TEST(WordFilter, DropsShortNumericAndStopwords) {
  const text::WordFilter f;
  EXPECT_FALSE(f.accepts("of"));
  EXPECT_FALSE(f.accepts("the"));
  EXPECT_FALSE(f.accepts("with"));
  EXPECT_FALSE(f.accepts("2023"));
  EXPECT_TRUE(f.accepts("graph"));
  EXPECT_EQ(text::stopwords().size(), 50u);
  text::WordFilter loose{1, false, false};
  EXPECT_TRUE(loose.accepts("of"));
  EXPECT_TRUE(loose.accepts("42"));
}

TEST(NameKey, NormalizesCaseAndSpacing) {
  EXPECT_EQ(text::name_key("  Ada   LOVELACE "), text::name_key("ada lovelace"));
}
