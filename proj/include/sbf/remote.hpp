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

#ifndef SBF_REMOTE_HPP_
#define SBF_REMOTE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sbf/embedding.hpp"

namespace sbf {

struct ServiceHealth {
  std::string status;
  std::vector<std::string> models;
};

// Client for the embedding service protocol:
//   POST {base}/embed   {"model": id, "texts": [...]}
//        -> {"model": id, "dim": n, "embeddings": [[...], ...]}
//   GET  {base}/health  -> {"status": "ok", "models": [...]}
// Only plain http:// endpoints are supported.
class RemoteBackend : public EmbeddingBackend {
 public:
  RemoteBackend(std::string endpoint, std::string model_id,
                std::size_t max_batch = 64, int timeout_seconds = 60);

  std::string identity() const override { return "remote:" + model_id_ + "@" + endpoint_; }
  std::string cache_namespace() const override { return model_id_; }
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) const override;

  ServiceHealth health() const;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::vector<std::vector<double>> embed_chunk(std::span<const std::string> texts) const;

  std::string endpoint_;
  std::string host_;  // scheme://host:port
  std::string base_path_;
  std::string model_id_;
  std::size_t max_batch_;
  int timeout_seconds_;
};

}  // namespace sbf

#endif  // SBF_REMOTE_HPP_
