// Copyright (c) 2026 The SBF Authors
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

#ifndef SBF_EMBEDDING_HPP_
#define SBF_EMBEDDING_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sbf {

// A finite, non-empty real vector. `is_unit()` is set only by normalized(),
// which lets cos_sim() reduce to a dot product.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool is_unit() const { return unit_; }

  double norm() const;
  // Throws DegenerateVectorError on a zero vector.
  EmbeddingVector normalized() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
  bool unit_ = false;
};

double dot(const EmbeddingVector& u, const EmbeddingVector& v);

// dot(u,v) / (|u| |v|), or plain dot(u,v) when both are unit vectors.
// Throws DimensionMismatchError / DegenerateVectorError.
double cos_sim(const EmbeddingVector& u, const EmbeddingVector& v);

enum class BackendKind { kLocalModel, kRemoteService, kFixture };

std::string backend_kind_name(BackendKind kind);
BackendKind parse_backend_kind(const std::string& name);

struct EmbeddingBackendConfig {
  BackendKind kind = BackendKind::kLocalModel;
  std::string model_id = "all-MiniLM-L6-v2";
  std::string endpoint;      // remote_service only
  std::string fixture_path;  // fixture only
  std::string model_dir;     // local_model: explicit directory, optional
  bool normalize = true;
  // Disk cache directory; empty means $SBF_CACHE_DIR, or memory-only if unset.
  std::string cache_dir;

  // Throws ConfigError if a field required by `kind` is missing or a field
  // belonging to another kind is set.
  void validate() const;
};

// Produces raw (un-normalized) vectors. Implementations must tolerate
// concurrent embed() calls.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  // Stable name of the vector space, e.g. "local:all-MiniLM-L6-v2".
  virtual std::string identity() const = 0;
  // Key under which vectors are persisted on disk.
  virtual std::string cache_namespace() const = 0;
  virtual std::vector<std::vector<double>> embed(
      std::span<const std::string> texts) const = 0;
};

// Explicit text -> vector table, loaded from a JSON object.
class FixtureBackend : public EmbeddingBackend {
 public:
  explicit FixtureBackend(std::map<std::string, std::vector<double>> table,
                          std::string name = "inline");
  static std::shared_ptr<FixtureBackend> from_file(const std::string& path);
  static std::shared_ptr<FixtureBackend> from_json(const std::string& json_text,
                                                   std::string name = "inline");

  std::string identity() const override { return "fixture:" + name_; }
  std::string cache_namespace() const override;
  std::vector<std::vector<double>> embed(
      std::span<const std::string> texts) const override;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, std::vector<double>> table_;
  std::string name_;
  std::size_t dim_ = 0;
};

// Two-level memo of raw backend output: an in-memory map guarded by a
// shared mutex, and an optional directory of one file per (namespace,
// SHA-256(text)).
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path disk_dir);

  std::optional<std::vector<double>> get(const std::string& ns,
                                         const std::string& text) const;
  void put(const std::string& ns, const std::string& text,
           const std::vector<double>& values);

  const std::optional<std::filesystem::path>& disk_dir() const { return disk_dir_; }
  std::size_t memory_entries() const;

  static std::filesystem::path entry_path(const std::filesystem::path& dir,
                                          const std::string& ns,
                                          const std::string& text);

 private:
  std::optional<std::filesystem::path> disk_dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::vector<double>> memory_;
};

struct DiskCacheStats {
  std::size_t entries = 0;
  std::uintmax_t bytes = 0;
  std::map<std::string, std::size_t> per_namespace;
};
DiskCacheStats disk_cache_stats(const std::filesystem::path& dir);
std::size_t clear_disk_cache(const std::filesystem::path& dir);

// Resolves the effective disk cache directory for a config.
std::optional<std::filesystem::path> resolve_cache_dir(const std::string& configured);

// Backend + cache + normalization policy: the txt_emb function.
class Embedder {
 public:
  Embedder(std::shared_ptr<const EmbeddingBackend> backend, bool normalize,
           std::shared_ptr<EmbeddingCache> cache = nullptr);

  // One vector per text, same order. Throws ValidationError on an empty
  // batch or empty text, BackendContractError on a malformed backend reply.
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;

  const EmbeddingBackend& backend() const { return *backend_; }
  bool normalize() const { return normalize_; }
  bool caching() const { return cache_ != nullptr; }

 private:
  std::shared_ptr<const EmbeddingBackend> backend_;
  bool normalize_;
  std::shared_ptr<EmbeddingCache> cache_;
};

std::shared_ptr<EmbeddingBackend> make_backend(const EmbeddingBackendConfig& config);
std::shared_ptr<Embedder> make_embedder(const EmbeddingBackendConfig& config,
                                        bool use_cache = true);

// Convenience entry point; embedders are memoized per configuration so the
// in-memory cache survives across calls.
std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbeddingBackendConfig& config);

}  // namespace sbf

#endif  // SBF_EMBEDDING_HPP_
