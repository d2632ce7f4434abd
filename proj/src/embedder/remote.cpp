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

#include <cmath>

#include "../common/http_client.hpp"
#include "matchprobe/embedder.hpp"
#include "matchprobe/error.hpp"

namespace matchprobe {

RemoteEmbedder::RemoteEmbedder(std::string url, std::size_t dimension, int max_retries, double timeout_seconds)
    : dimension_(dimension), max_retries_(max_retries), timeout_seconds_(timeout_seconds) {
  const auto ep = detail::parse_endpoint(url);
  base_ = ep.origin;
  path_prefix_ = ep.prefix;
}

std::string RemoteEmbedder::tag() const { return "remote:" + base_ + path_prefix_ + "/d" + std::to_string(dimension_); }

EmbeddingVector RemoteEmbedder::embed(std::string_view title, std::string_view abstract) const {
  const nlohmann::json body = {{"title", title}, {"abstract", abstract}};
  const auto reply = detail::post_json({base_, path_prefix_}, "/embed", body, timeout_seconds_, max_retries_);
  const auto it = reply.find("vector");
  if (it == reply.end() || !it->is_array()) throw ContractError("embedding reply lacks a \"vector\" array");
  if (it->size() != dimension_) {
    throw ContractError("embedding reply has dimension " + std::to_string(it->size()) + ", expected " +
                        std::to_string(dimension_));
  }
  EmbeddingVector v;
  v.provider_tag = tag();
  v.values.reserve(dimension_);
  for (const auto& x : *it) {
    if (!x.is_number()) throw ContractError("embedding reply contains a non-number");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw ContractError("embedding reply contains a non-finite value");
    v.values.push_back(d);
  }
  return v;
}

}  // namespace matchprobe
