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

#include "sbf/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "sbf/bert.hpp"
#include "sbf/errors.hpp"
#include "sbf/remote.hpp"
#include "sbf/sha256.hpp"

namespace sbf {

namespace fs = std::filesystem;
using nlohmann::json;

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("embedding vector has dimension 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("embedding vector has a non-finite value");
  }
}

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

EmbeddingVector EmbeddingVector::normalized() const {
  double n = norm();
  if (n == 0.0) throw DegenerateVectorError();
  EmbeddingVector out;
  out.values_.reserve(values_.size());
  for (double v : values_) out.values_.push_back(v / n);
  out.unit_ = true;
  return out;
}

double dot(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) throw DimensionMismatchError(u.dim(), v.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) s += u[i] * v[i];
  return s;
}

double cos_sim(const EmbeddingVector& u, const EmbeddingVector& v) {
  double d = dot(u, v);
  if (u.is_unit() && v.is_unit()) return std::fmax(-1.0, std::fmin(1.0, d));
  double nu = u.norm();
  double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw DegenerateVectorError();
  double c = d / (nu * nv);
  return std::fmax(-1.0, std::fmin(1.0, c));
}

std::string backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kLocalModel: return "local";
    case BackendKind::kRemoteService: return "remote";
    case BackendKind::kFixture: return "fixture";
  }
  return "local";
}

BackendKind parse_backend_kind(const std::string& name) {
  if (name == "local" || name == "local_model") return BackendKind::kLocalModel;
  if (name == "remote" || name == "remote_service") return BackendKind::kRemoteService;
  if (name == "fixture") return BackendKind::kFixture;
  throw ConfigError("unknown embedding backend '" + name +
                    "' (expected local, remote or fixture)");
}

void EmbeddingBackendConfig::validate() const {
  auto forbid = [&](bool set, const char* field) {
    if (set) {
      throw ConfigError(std::string("backend '") + backend_kind_name(kind) +
                        "' does not take '" + field + "'");
    }
  };
  switch (kind) {
    case BackendKind::kLocalModel:
      if (model_id.empty() && model_dir.empty()) {
        throw ConfigError("local backend needs a model id or model directory");
      }
      forbid(!endpoint.empty(), "endpoint");
      forbid(!fixture_path.empty(), "fixture_path");
      break;
    case BackendKind::kRemoteService:
      if (endpoint.empty()) throw ConfigError("remote backend needs an endpoint");
      if (model_id.empty()) throw ConfigError("remote backend needs a model id");
      forbid(!fixture_path.empty(), "fixture_path");
      forbid(!model_dir.empty(), "model_dir");
      break;
    case BackendKind::kFixture:
      if (fixture_path.empty()) throw ConfigError("fixture backend needs a fixture path");
      forbid(!endpoint.empty(), "endpoint");
      forbid(!model_dir.empty(), "model_dir");
      break;
  }
}

// ---- fixture backend ----

FixtureBackend::FixtureBackend(std::map<std::string, std::vector<double>> table,
                               std::string name)
    : table_(std::move(table)), name_(std::move(name)) {
  for (const auto& [text, vec] : table_) {
    if (vec.empty()) throw ValidationError("fixture entry \"" + text + "\" is empty");
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_) {
      throw ValidationError("fixture entry \"" + text + "\" has dimension " +
                            std::to_string(vec.size()) + ", expected " +
                            std::to_string(dim_));
    }
  }
}

std::shared_ptr<FixtureBackend> FixtureBackend::from_json(const std::string& json_text,
                                                          std::string name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("fixture: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ValidationError("fixture: top-level value must be an object");
  std::map<std::string, std::vector<double>> table;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_array()) {
      throw ValidationError("fixture entry \"" + it.key() + "\" is not an array");
    }
    std::vector<double> vec;
    for (const auto& x : it.value()) {
      if (!x.is_number()) {
        throw ValidationError("fixture entry \"" + it.key() + "\" has a non-numeric value");
      }
      vec.push_back(x.get<double>());
    }
    table.emplace(it.key(), std::move(vec));
  }
  return std::make_shared<FixtureBackend>(std::move(table), std::move(name));
}

std::shared_ptr<FixtureBackend> FixtureBackend::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open fixture file: " + path);
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return from_json(bytes, path);
}

std::string FixtureBackend::cache_namespace() const {
  std::string canon;
  for (const auto& [text, vec] : table_) {
    canon += text;
    canon += '\0';
    canon += std::string(reinterpret_cast<const char*>(vec.data()),
                         vec.size() * sizeof(double));
  }
  return "fixture-" + sha256_hex(canon).substr(0, 16);
}

std::vector<std::vector<double>> FixtureBackend::embed(
    std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) throw MissingFixtureError(t);
    out.push_back(it->second);
  }
  return out;
}

// ---- cache ----

namespace {

constexpr char kVecMagic[4] = {'S', 'B', 'F', 'V'};

std::string sanitize(const std::string& ns) {
  std::string out;
  for (char c : ns) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

std::optional<std::vector<double>> read_entry(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint32_t dim = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (!in || std::string_view(magic, 4) != std::string_view(kVecMagic, 4) || dim == 0) {
    return std::nullopt;
  }
  std::vector<double> vec(dim);
  in.read(reinterpret_cast<char*>(vec.data()), static_cast<std::streamsize>(dim * sizeof(double)));
  if (!in) return std::nullopt;
  return vec;
}

void write_entry(const fs::path& p, const std::vector<double>& vec) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  fs::path tmp = p;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;  // a read-only cache directory degrades to memory-only
    auto dim = static_cast<std::uint32_t>(vec.size());
    out.write(kVecMagic, 4);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(double)));
  }
  fs::rename(tmp, p, ec);
  if (ec) fs::remove(tmp, ec);
}

}  // namespace

EmbeddingCache::EmbeddingCache(fs::path disk_dir) : disk_dir_(std::move(disk_dir)) {}

fs::path EmbeddingCache::entry_path(const fs::path& dir, const std::string& ns,
                                    const std::string& text) {
  return dir / sanitize(ns) / (sha256_hex(text) + ".vec");
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& ns,
                                                       const std::string& text) const {
  std::string key = ns + '\0' + text;
  {
    std::shared_lock lock(mu_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (!disk_dir_) return std::nullopt;
  auto vec = read_entry(entry_path(*disk_dir_, ns, text));
  if (vec) {
    std::unique_lock lock(mu_);
    memory_.emplace(std::move(key), *vec);
  }
  return vec;
}

void EmbeddingCache::put(const std::string& ns, const std::string& text,
                         const std::vector<double>& values) {
  {
    std::unique_lock lock(mu_);
    memory_[ns + '\0' + text] = values;
  }
  if (disk_dir_) write_entry(entry_path(*disk_dir_, ns, text), values);
}

std::size_t EmbeddingCache::memory_entries() const {
  std::shared_lock lock(mu_);
  return memory_.size();
}

DiskCacheStats disk_cache_stats(const fs::path& dir) {
  DiskCacheStats stats;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return stats;
  for (const auto& ns_entry : fs::directory_iterator(dir)) {
    if (!ns_entry.is_directory()) continue;
    std::size_t n = 0;
    for (const auto& f : fs::directory_iterator(ns_entry.path())) {
      if (f.is_regular_file() && f.path().extension() == ".vec") {
        ++n;
        stats.bytes += f.file_size();
      }
    }
    stats.entries += n;
    stats.per_namespace[ns_entry.path().filename().string()] = n;
  }
  return stats;
}

std::size_t clear_disk_cache(const fs::path& dir) {
  std::size_t removed = 0;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return 0;
  for (const auto& ns_entry : fs::directory_iterator(dir)) {
    if (!ns_entry.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(ns_entry.path())) {
      if (f.is_regular_file() && f.path().extension() == ".vec") {
        fs::remove(f.path(), ec);
        if (!ec) ++removed;
      }
    }
    fs::remove(ns_entry.path(), ec);  // only succeeds when now empty
  }
  return removed;
}

std::optional<fs::path> resolve_cache_dir(const std::string& configured) {
  if (!configured.empty()) return fs::path(configured);
  if (const char* env = std::getenv("SBF_CACHE_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

// ---- embedder ----

Embedder::Embedder(std::shared_ptr<const EmbeddingBackend> backend, bool normalize,
                   std::shared_ptr<EmbeddingCache> cache)
    : backend_(std::move(backend)), normalize_(normalize), cache_(std::move(cache)) {
  if (!backend_) throw ConfigError("embedder needs a backend");
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) throw ValidationError("embed_batch: empty batch");
  for (const auto& t : texts) {
    if (t.empty()) throw ValidationError("embed_batch: empty text");
  }
  const std::string ns = backend_->cache_namespace();

  std::vector<std::optional<std::vector<double>>> raw(texts.size());
  if (cache_) {
    for (std::size_t i = 0; i < texts.size(); ++i) raw[i] = cache_->get(ns, texts[i]);
  }

  std::vector<std::string> misses;
  std::unordered_map<std::string, std::size_t> miss_index;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!raw[i] && miss_index.emplace(texts[i], misses.size()).second) {
      misses.push_back(texts[i]);
    }
  }
  if (!misses.empty()) {
    auto rows = backend_->embed(misses);
    if (rows.size() != misses.size()) {
      throw BackendContractError(backend_->identity() + " returned " +
                                 std::to_string(rows.size()) + " rows for " +
                                 std::to_string(misses.size()) + " texts");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (!raw[i]) raw[i] = rows[miss_index.at(texts[i])];
    }
    if (cache_) {
      for (std::size_t j = 0; j < misses.size(); ++j) cache_->put(ns, misses[j], rows[j]);
    }
  }

  const std::size_t dim = raw.front()->size();
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (raw[i]->size() != dim || dim == 0) {
      throw BackendContractError(backend_->identity() +
                                 " returned vectors of differing dimension (" +
                                 std::to_string(dim) + " vs " +
                                 std::to_string(raw[i]->size()) + ")");
    }
    try {
      EmbeddingVector v(std::move(*raw[i]));
      out.push_back(normalize_ ? v.normalized() : std::move(v));
    } catch (const ValidationError& e) {
      throw BackendContractError(backend_->identity() + ": " + e.what());
    } catch (const DegenerateVectorError&) {
      throw BackendContractError(backend_->identity() + " returned a zero vector for \"" +
                                 texts[i] + "\"");
    }
  }
  return out;
}

std::shared_ptr<EmbeddingBackend> make_backend(const EmbeddingBackendConfig& config) {
  config.validate();
  switch (config.kind) {
    case BackendKind::kFixture:
      return FixtureBackend::from_file(config.fixture_path);
    case BackendKind::kRemoteService:
      return std::make_shared<RemoteBackend>(config.endpoint, config.model_id);
    case BackendKind::kLocalModel:
      return std::make_shared<LocalModelBackend>(
          resolve_model_dir(config.model_id, config.model_dir), config.model_id);
  }
  throw ConfigError("unknown backend kind");
}

std::shared_ptr<Embedder> make_embedder(const EmbeddingBackendConfig& config,
                                        bool use_cache) {
  auto backend = make_backend(config);
  std::shared_ptr<EmbeddingCache> cache;
  if (use_cache) {
    auto dir = resolve_cache_dir(config.cache_dir);
    cache = dir ? std::make_shared<EmbeddingCache>(*dir) : std::make_shared<EmbeddingCache>();
  }
  return std::make_shared<Embedder>(std::move(backend), config.normalize, std::move(cache));
}

std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbeddingBackendConfig& config) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<Embedder>> registry;
  std::string key = backend_kind_name(config.kind) + '\0' + config.model_id + '\0' +
                    config.endpoint + '\0' + config.fixture_path + '\0' +
                    config.model_dir + '\0' + (config.normalize ? "1" : "0") + '\0' +
                    config.cache_dir;
  std::shared_ptr<Embedder> embedder;
  {
    std::lock_guard lock(mu);
    auto& slot = registry[key];
    if (!slot) slot = make_embedder(config);
    embedder = slot;
  }
  return embedder->embed_batch(texts);
}

}  // namespace sbf
