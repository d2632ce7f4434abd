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

#include <atomic>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "matchprobe/text.hpp"

namespace matchprobe {

enum class RewriteKind { themes, keywords };

std::string_view to_string(RewriteKind kind);

struct ArchivePaperText {
  std::string title;
  std::string abstract;
};

struct RewriteRequest {
  RewriteKind kind = RewriteKind::themes;
  std::string title;
  std::string abstract;
  std::vector<ArchivePaperText> archive;
  std::vector<std::string> keywords;
  std::string template_id;
  // Version index within IncludeThemes; lets deterministic providers vary.
  int variant = 0;
};

struct RewriteResponse {
  std::string abstract;
  std::map<std::string, std::string> rejected;  // keyword -> reason
};

// Wire format of POST /rewrite.
nlohmann::json to_json(const RewriteRequest& request);
RewriteRequest rewrite_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RewriteResponse& response);
// Throws ContractError on a missing or empty abstract.
RewriteResponse rewrite_response_from_json(const nlohmann::json& j);

class RewriteProvider {
 public:
  virtual ~RewriteProvider() = default;
  virtual std::string tag() const = 0;
  virtual RewriteResponse rewrite(const RewriteRequest& request) const = 0;
};

// Deterministic offline provider.
//   themes:   prepends one carrier sentence naming the five most frequent
//             filtered archive tokens; the carrier rotates with `variant`.
//   keywords: splices accepted keywords into "Regarding a, b and c, " at the
//             start of the final sentence. Rejects only `reject_words`.
class StubRewriter final : public RewriteProvider {
 public:
  StubRewriter() = default;
  explicit StubRewriter(std::set<std::string> reject_words) : reject_(std::move(reject_words)) {}

  std::string tag() const override { return "stub"; }
  RewriteResponse rewrite(const RewriteRequest& request) const override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::set<std::string> reject_;
  mutable std::atomic<std::size_t> calls_{0};
};

// Top-n tokens by frequency (ties alphabetical) across archive titles and abstracts.
std::vector<std::string> top_archive_tokens(const std::vector<ArchivePaperText>& archive, std::size_t n,
                                            const text::WordFilter& filter = {});

// POST {base}/rewrite. Sends "Authorization: Bearer <key>" when a key is set.
class RemoteRewriter final : public RewriteProvider {
 public:
  RemoteRewriter(std::string url, std::string api_key = {}, int max_retries = 2, double timeout_seconds = 120.0);
  std::string tag() const override { return "remote:" + url_; }
  RewriteResponse rewrite(const RewriteRequest& request) const override;

 private:
  std::string url_;
  std::string api_key_;
  int max_retries_;
  double timeout_seconds_;
};

// Shipped prompt templates, keyed by template id: themes-auto, themes-human,
// keywords-auto, themes-study, keywords-study.
std::vector<std::string> prompt_template_ids();
// Throws NotFoundError for an unknown id.
std::string_view prompt_template(std::string_view id);
// Template followed by the JSON input object the template describes.
std::string render_prompt(const RewriteRequest& request);

}  // namespace matchprobe
