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

#include "matchprobe/rewrite.hpp"

#include <algorithm>
#include <unordered_map>

#include "../common/http_client.hpp"
#include "matchprobe/error.hpp"
#include "matchprobe_prompts.inc"

namespace matchprobe {
namespace {

using nlohmann::json;

std::string join_list(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += (i + 1 == words.size()) ? " and " : ", ";
    out += words[i];
  }
  return out;
}

constexpr std::string_view kThemeCarriers[] = {
    "This work is inspired by themes such as ",
    "Our study draws on ideas from ",
    "The approach is motivated by prior work on ",
};

}  // namespace

std::string_view to_string(RewriteKind kind) { return kind == RewriteKind::themes ? "themes" : "keywords"; }

json to_json(const RewriteRequest& r) {
  json archive = json::array();
  for (const auto& a : r.archive) archive.push_back({{"title", a.title}, {"abstract", a.abstract}});
  return {{"kind", to_string(r.kind)}, {"title", r.title},       {"abstract", r.abstract},
          {"archive", archive},        {"keywords", r.keywords}, {"template_id", r.template_id},
          {"variant", r.variant}};
}

RewriteRequest rewrite_request_from_json(const json& j) {
  try {
    RewriteRequest r;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "themes") {
      r.kind = RewriteKind::themes;
    } else if (kind == "keywords") {
      r.kind = RewriteKind::keywords;
    } else {
      throw ContractError("unknown rewrite kind: " + kind);
    }
    r.title = j.at("title").get<std::string>();
    r.abstract = j.at("abstract").get<std::string>();
    for (const auto& a : j.value("archive", json::array())) {
      r.archive.push_back({a.at("title").get<std::string>(), a.at("abstract").get<std::string>()});
    }
    r.keywords = j.value("keywords", std::vector<std::string>{});
    r.template_id = j.value("template_id", std::string{});
    r.variant = j.value("variant", 0);
    return r;
  } catch (const json::exception& e) {
    throw ContractError(std::string("malformed rewrite request: ") + e.what());
  }
}

json to_json(const RewriteResponse& r) { return {{"abstract", r.abstract}, {"rejected", r.rejected}}; }

RewriteResponse rewrite_response_from_json(const json& j) {
  RewriteResponse r;
  const auto it = j.find("abstract");
  if (it == j.end() || !it->is_string()) throw ContractError("rewrite reply lacks an \"abstract\" string");
  r.abstract = it->get<std::string>();
  if (text::trim(r.abstract).empty()) throw ContractError("rewrite reply has an empty abstract");
  // Accept both the wire name and the key the prompt templates ask the model for.
  for (const char* key : {"rejected", "left out keywords"}) {
    if (auto rej = j.find(key); rej != j.end() && rej->is_object()) {
      for (const auto& [k, v] : rej->items()) r.rejected[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return r;
}

std::vector<std::string> top_archive_tokens(const std::vector<ArchivePaperText>& archive, std::size_t n,
                                            const text::WordFilter& filter) {
  std::unordered_map<std::string, int> counts;
  for (const auto& a : archive) {
    for (const auto* field : {&a.title, &a.abstract}) {
      for (auto& tok : text::tokenize(*field)) {
        if (filter.accepts(tok)) ++counts[tok];
      }
    }
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < n; ++i) out.push_back(ranked[i].first);
  return out;
}

RewriteResponse StubRewriter::rewrite(const RewriteRequest& request) const {
  ++calls_;
  RewriteResponse resp;
  const std::string abstract = text::normalize_whitespace(request.abstract);
  if (request.kind == RewriteKind::themes) {
    const auto tokens = top_archive_tokens(request.archive, 5);
    if (tokens.empty()) {
      resp.abstract = abstract.empty() ? request.title : abstract;
      return resp;
    }
    const auto carrier = kThemeCarriers[static_cast<std::size_t>(std::max(request.variant, 0)) % std::size(kThemeCarriers)];
    std::string sentence = std::string(carrier) + join_list(tokens) + ".";
    resp.abstract = abstract.empty() ? sentence : sentence + " " + abstract;
    return resp;
  }

  std::vector<std::string> accepted;
  for (const auto& k : request.keywords) {
    if (reject_.contains(k)) {
      resp.rejected[k] = "not related to the topics of this abstract";
    } else {
      accepted.push_back(k);
    }
  }
  if (accepted.empty()) {
    resp.abstract = abstract.empty() ? request.title : abstract;
    return resp;
  }
  const std::string clause = "Regarding " + join_list(accepted) + ", ";
  const auto sentences = text::split_sentences(abstract);
  if (sentences.empty()) {
    resp.abstract = clause + "this work is summarized by its title.";
    return resp;
  }
  std::string out;
  for (std::size_t i = 0; i + 1 < sentences.size(); ++i) out += sentences[i] + " ";
  out += clause + sentences.back();
  resp.abstract = std::move(out);
  return resp;
}

RemoteRewriter::RemoteRewriter(std::string url, std::string api_key, int max_retries, double timeout_seconds)
    : url_(std::move(url)), api_key_(std::move(api_key)), max_retries_(max_retries), timeout_seconds_(timeout_seconds) {
  detail::parse_endpoint(url_);
}

RewriteResponse RemoteRewriter::rewrite(const RewriteRequest& request) const {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  const auto reply =
      detail::post_json(detail::parse_endpoint(url_), "/rewrite", to_json(request), timeout_seconds_, max_retries_, headers);
  return rewrite_response_from_json(reply);
}

std::vector<std::string> prompt_template_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : detail::kPromptTemplates) ids.emplace_back(id);
  return ids;
}

std::string_view prompt_template(std::string_view id) {
  for (const auto& [key, body] : detail::kPromptTemplates) {
    if (key == id) return body;
  }
  throw NotFoundError("unknown prompt template: " + std::string(id));
}

std::string render_prompt(const RewriteRequest& request) {
  json input = {{"title", request.title}, {"abstract", request.abstract}};
  if (request.kind == RewriteKind::themes) {
    json works = json::array();
    for (const auto& a : request.archive) works.push_back({{"title", a.title}, {"abstract", a.abstract}});
    input["related previous works"] = std::move(works);
  } else {
    input["keywords"] = request.keywords;
  }
  return std::string(prompt_template(request.template_id)) + "\n" + input.dump(2) + "\n";
}

}  // namespace matchprobe
