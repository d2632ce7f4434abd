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

#include <algorithm>
#include <cmath>

#include "matchprobe/embedder.hpp"
#include "matchprobe/error.hpp"
#include "matchprobe/hash.hpp"
#include "matchprobe/simd/kernels.hpp"
#include "matchprobe/text.hpp"

namespace matchprobe {

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dimension() != v.dimension()) {
    throw ContractError("cosine of vectors with dimensions " + std::to_string(u.dimension()) +
                        " and " + std::to_string(v.dimension()));
  }
  const double uu = simd::squared_norm(u.values);
  const double vv = simd::squared_norm(v.values);
  if (uu == 0.0 || vv == 0.0) throw DegenerateInputError("cosine of a zero vector");
  // sqrt(uu * vv) rather than sqrt(uu) * sqrt(vv): exact for u == v and
  // symmetric because the product commutes.
  const double c = simd::dot(u.values, v.values) / std::sqrt(uu * vv);
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingVector reference_embed(std::string_view title, std::string_view abstract, std::size_t dimension) {
  if (dimension < 2) throw ContractError("reference embedder needs dimension >= 2");
  EmbeddingVector out;
  out.values.assign(dimension, 0.0);
  out.provider_tag = "reference-fnv1a-d" + std::to_string(dimension);
  std::string joined;
  joined.reserve(title.size() + abstract.size() + 1);
  joined.append(title).append(" ").append(abstract);
  for (const auto& tok : text::tokenize(joined)) {
    out.values[fnv1a64(tok) % dimension] += 1.0;
  }
  const double sq = simd::squared_norm(out.values);
  if (sq == 0.0) {
    out.degenerate = true;
    return out;
  }
  simd::scale(out.values, 1.0 / std::sqrt(sq));
  return out;
}

ReferenceEmbedder::ReferenceEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension < 2) throw ContractError("reference embedder needs dimension >= 2");
}

std::string ReferenceEmbedder::tag() const { return "reference-fnv1a-d" + std::to_string(dimension_); }

EmbeddingVector ReferenceEmbedder::embed(std::string_view title, std::string_view abstract) const {
  return reference_embed(title, abstract, dimension_);
}

std::shared_ptr<const EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config) {
  switch (config.kind) {
    case EmbeddingProviderConfig::Kind::reference:
      return std::make_shared<ReferenceEmbedder>(config.dimension);
    case EmbeddingProviderConfig::Kind::remote:
      if (!config.remote_url || config.remote_url->empty()) {
        throw ContractError("remote embedding provider requires a URL (MATCHPROBE_EMBED_URL)");
      }
      return std::make_shared<RemoteEmbedder>(*config.remote_url, config.dimension);
  }
  throw ContractError("unknown provider kind");
}

std::uint64_t cache_key(std::string_view provider_tag, std::string_view title, std::string_view abstract) {
  std::uint64_t h = fnv1a64(provider_tag);
  h = fnv1a64(std::string_view("\x1f", 1), h);
  h = fnv1a64(title, h);
  h = fnv1a64(std::string_view("\x1e", 1), h);
  return fnv1a64(abstract, h);
}

Embedder::Embedder(std::shared_ptr<const EmbeddingProvider> provider, std::shared_ptr<EmbeddingCache> cache,
                   bool trim, std::size_t memo_capacity)
    : provider_(std::move(provider)), cache_(std::move(cache)), trim_(trim), memo_capacity_(memo_capacity) {
  if (!provider_) throw ContractError("embedder needs a provider");
}

EmbeddingVector Embedder::embed(std::string_view title, std::string_view abstract, CachePolicy policy) const {
  const std::string_view t = trim_ ? text::trim(title) : title;
  const std::string_view a = trim_ ? text::trim(abstract) : abstract;
  if (text::trim(t).empty()) throw DegenerateInputError("cannot embed a paper with an empty title");

  if (policy == CachePolicy::transient) {
    {
      std::lock_guard lock(memo_mu_);
      ++provider_calls_;
    }
    return provider_->embed(t, a);
  }

  const std::uint64_t key = cache_key(provider_->tag(), t, a);
  {
    std::lock_guard lock(memo_mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  std::optional<EmbeddingVector> found = cache_ ? cache_->get(key) : std::nullopt;
  if (!found) {
    found = provider_->embed(t, a);
    if (found->dimension() != provider_->dimension()) {
      throw ContractError("provider returned dimension " + std::to_string(found->dimension()) + ", expected " +
                          std::to_string(provider_->dimension()));
    }
    if (cache_) cache_->put(key, *found);
    std::lock_guard lock(memo_mu_);
    ++provider_calls_;
  }
  std::lock_guard lock(memo_mu_);
  if (memo_.size() >= memo_capacity_) memo_.clear();
  memo_.emplace(key, *found);
  return *found;
}

std::size_t Embedder::provider_calls() const {
  std::lock_guard lock(memo_mu_);
  return provider_calls_;
}

}  // namespace matchprobe
