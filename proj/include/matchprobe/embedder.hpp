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
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace matchprobe {

inline constexpr std::size_t kDefaultDimension = 768;

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_tag;
  // Set by the reference embedder when the text has no tokens.
  bool degenerate = false;

  std::size_t dimension() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// (u . v) / (|u| |v|), clamped to [-1, 1]. Throws DegenerateInputError on a
// zero vector and ContractError on a dimension mismatch.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string tag() const = 0;
  virtual std::size_t dimension() const = 0;
  // Title and abstract arrive already normalized by the caller (Embedder).
  virtual EmbeddingVector embed(std::string_view title, std::string_view abstract) const = 0;
};

// Hashed unigram bag of words: tokens of title + " " + abstract are bucketed
// by FNV-1a-64 mod D, counted, then L2-normalized. D must be >= 2.
EmbeddingVector reference_embed(std::string_view title, std::string_view abstract, std::size_t dimension);

class ReferenceEmbedder final : public EmbeddingProvider {
 public:
  explicit ReferenceEmbedder(std::size_t dimension = kDefaultDimension);
  std::string tag() const override;
  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view title, std::string_view abstract) const override;

 private:
  std::size_t dimension_;
};

// POST {base}/embed with {"title","abstract"}; expects {"vector":[D numbers]}.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::string url, std::size_t dimension, int max_retries = 2,
                 double timeout_seconds = 30.0);
  std::string tag() const override;
  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view title, std::string_view abstract) const override;

 private:
  std::string base_;
  std::string path_prefix_;
  std::size_t dimension_;
  int max_retries_;
  double timeout_seconds_;
};

struct EmbeddingProviderConfig {
  enum class Kind { reference, remote };
  Kind kind = Kind::reference;
  std::size_t dimension = kDefaultDimension;
  std::optional<std::string> remote_url;  // required for remote
  bool trim = true;
};

// Throws ContractError when a remote config lacks a URL.
std::shared_ptr<const EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

std::uint64_t cache_key(std::string_view provider_tag, std::string_view title, std::string_view abstract);

// Append-only on-disk log of embeddings. Layout after the 8-byte file magic
// "MPCACHE1", per record (little-endian):
//   u32 record magic | u64 key | u16 tag length | tag bytes | u32 dimension |
//   u8 flags | dimension x f64 | u64 FNV-1a checksum of the preceding bytes
// Later records for the same key shadow earlier ones.
class EmbeddingCache {
 public:
  // Creates the file if missing. Throws CacheIntegrityError on a corrupt file.
  explicit EmbeddingCache(std::string path);

  std::optional<EmbeddingVector> get(std::uint64_t key) const;
  void put(std::uint64_t key, const EmbeddingVector& value);
  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::uint64_t, EmbeddingVector> index_;
};

enum class CachePolicy { persist, transient };

// Provider front end: input normalization, in-memory memo and the optional
// persistent cache. Safe to call concurrently.
class Embedder {
 public:
  explicit Embedder(std::shared_ptr<const EmbeddingProvider> provider,
                    std::shared_ptr<EmbeddingCache> cache = nullptr, bool trim = true,
                    std::size_t memo_capacity = 1u << 15);

  // Throws DegenerateInputError on an empty title.
  EmbeddingVector embed(std::string_view title, std::string_view abstract,
                        CachePolicy policy = CachePolicy::persist) const;

  const EmbeddingProvider& provider() const { return *provider_; }
  std::string tag() const { return provider_->tag(); }
  std::size_t dimension() const { return provider_->dimension(); }
  std::size_t provider_calls() const;

 private:
  std::shared_ptr<const EmbeddingProvider> provider_;
  std::shared_ptr<EmbeddingCache> cache_;
  bool trim_;
  std::size_t memo_capacity_;
  mutable std::mutex memo_mu_;
  mutable std::unordered_map<std::uint64_t, EmbeddingVector> memo_;
  mutable std::size_t provider_calls_ = 0;
};

}  // namespace matchprobe
