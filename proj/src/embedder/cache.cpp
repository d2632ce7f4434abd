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

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "matchprobe/embedder.hpp"
#include "matchprobe/error.hpp"
#include "matchprobe/hash.hpp"

namespace matchprobe {
namespace {

constexpr char kFileMagic[8] = {'M', 'P', 'C', 'A', 'C', 'H', 'E', '1'};
constexpr std::uint32_t kRecordMagic = 0x4345504du;  // "MPEC" little-endian
constexpr std::uint8_t kFlagDegenerate = 0x1;

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& buf, std::size_t pos) : buf_(buf), pos_(pos) {}

  template <typename T>
  bool get(T& v) {
    if (buf_.size() - pos_ < sizeof(T)) return false;
    v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i));
    }
    pos_ += sizeof(T);
    return true;
  }

  bool bytes(std::size_t n, std::string& out) {
    if (buf_.size() - pos_ < n) return false;
    out.assign(buf_, pos_, n);
    pos_ += n;
    return true;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::string& buf_;
  std::size_t pos_;
};

std::string encode(std::uint64_t key, const EmbeddingVector& v) {
  std::string rec;
  rec.reserve(32 + v.provider_tag.size() + 8 * v.values.size());
  put_le<std::uint32_t>(rec, kRecordMagic);
  put_le<std::uint64_t>(rec, key);
  put_le<std::uint16_t>(rec, static_cast<std::uint16_t>(v.provider_tag.size()));
  rec.append(v.provider_tag);
  put_le<std::uint32_t>(rec, static_cast<std::uint32_t>(v.values.size()));
  put_le<std::uint8_t>(rec, v.degenerate ? kFlagDegenerate : 0);
  for (const double x : v.values) put_le<std::uint64_t>(rec, std::bit_cast<std::uint64_t>(x));
  put_le<std::uint64_t>(rec, fnv1a64(rec));
  return rec;
}

[[noreturn]] void corrupt(const std::string& path, std::size_t offset, const std::string& why) {
  throw CacheIntegrityError("embedding cache " + path + " is corrupt at byte " + std::to_string(offset) + " (" +
                            why + "); delete the file to rebuild it");
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::string path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw CacheIntegrityError("cannot create embedding cache " + path_);
    out.write(kFileMagic, sizeof kFileMagic);
    return;
  }
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw CacheIntegrityError("cannot open embedding cache " + path_);
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof kFileMagic || std::memcmp(buf.data(), kFileMagic, sizeof kFileMagic) != 0) {
    corrupt(path_, 0, "bad file magic");
  }
  std::size_t pos = sizeof kFileMagic;
  while (pos < buf.size()) {
    Reader r(buf, pos);
    std::uint32_t magic = 0;
    std::uint64_t key = 0;
    std::uint16_t tag_len = 0;
    std::uint32_t dim = 0;
    std::uint8_t flags = 0;
    EmbeddingVector v;
    if (!r.get(magic) || magic != kRecordMagic) corrupt(path_, pos, "bad record magic");
    if (!r.get(key) || !r.get(tag_len) || !r.bytes(tag_len, v.provider_tag) || !r.get(dim) || !r.get(flags)) {
      corrupt(path_, pos, "truncated record header");
    }
    v.degenerate = (flags & kFlagDegenerate) != 0;
    v.values.resize(dim);
    for (auto& x : v.values) {
      std::uint64_t bits = 0;
      if (!r.get(bits)) corrupt(path_, pos, "truncated values");
      x = std::bit_cast<double>(bits);
    }
    const std::uint64_t expected = fnv1a64(std::string_view(buf).substr(pos, r.pos() - pos));
    std::uint64_t checksum = 0;
    if (!r.get(checksum)) corrupt(path_, pos, "truncated checksum");
    if (checksum != expected) corrupt(path_, pos, "checksum mismatch");
    index_[key] = std::move(v);
    pos = r.pos();
  }
}

std::optional<EmbeddingVector> EmbeddingCache::get(std::uint64_t key) const {
  std::shared_lock lock(mu_);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  return std::nullopt;
}

void EmbeddingCache::put(std::uint64_t key, const EmbeddingVector& value) {
  const std::string rec = encode(key, value);
  std::unique_lock lock(mu_);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
  out.flush();
  if (!out) throw CacheIntegrityError("failed to append to embedding cache " + path_);
  index_[key] = value;
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mu_);
  return index_.size();
}

}  // namespace matchprobe
