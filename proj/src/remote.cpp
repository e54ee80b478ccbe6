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

#include "sbf/remote.hpp"

#include <algorithm>

#include <httplib.h>
#include <json.hpp>

#include "sbf/errors.hpp"

namespace sbf {

using nlohmann::json;

namespace {

std::string error_detail(const httplib::Result& res) {
  if (!res) return "request failed: " + httplib::to_string(res.error());
  std::string detail = "HTTP " + std::to_string(res->status);
  try {
    auto body = json::parse(res->body);
    if (body.is_object() && body.contains("error") && body["error"].is_string()) {
      detail += ": " + body["error"].get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return detail;
}

}  // namespace

RemoteBackend::RemoteBackend(std::string endpoint, std::string model_id,
                             std::size_t max_batch, int timeout_seconds)
    : endpoint_(std::move(endpoint)),
      model_id_(std::move(model_id)),
      max_batch_(std::max<std::size_t>(1, max_batch)),
      timeout_seconds_(timeout_seconds) {
  constexpr std::string_view kScheme = "http://";
  if (endpoint_.rfind(kScheme, 0) != 0) {
    throw ConfigError("remote endpoint must start with http://: " + endpoint_);
  }
  auto slash = endpoint_.find('/', kScheme.size());
  host_ = endpoint_.substr(0, slash);
  base_path_ = slash == std::string::npos ? "" : endpoint_.substr(slash);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (host_.size() == kScheme.size()) throw ConfigError("remote endpoint has no host: " + endpoint_);
}

std::vector<std::vector<double>> RemoteBackend::embed(std::span<const std::string> texts) const {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += max_batch_) {
    auto chunk = embed_chunk(texts.subspan(i, std::min(max_batch_, texts.size() - i)));
    for (auto& row : chunk) out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<double>> RemoteBackend::embed_chunk(
    std::span<const std::string> texts) const {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);

  json request = {{"model", model_id_}, {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto res = client.Post(base_path_ + "/embed", request.dump(), "application/json");
  if (!res || res->status != 200) throw TransportError(endpoint_, error_detail(res));

  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw BackendContractError("embedding service returned malformed JSON: " + std::string(e.what()));
  }
  if (!body.is_object() || !body.contains("embeddings") || !body["embeddings"].is_array()) {
    throw BackendContractError("embedding service response lacks 'embeddings'");
  }
  if (body.contains("model") && body["model"] != model_id_) {
    throw BackendContractError("embedding service answered for model " + body["model"].dump() +
                               ", requested " + model_id_);
  }
  const auto& rows = body["embeddings"];
  if (rows.size() != texts.size()) {
    throw BackendContractError("embedding service returned " + std::to_string(rows.size()) +
                               " rows for " + std::to_string(texts.size()) + " texts");
  }
  std::size_t dim = body.value("dim", std::size_t{0});
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array()) throw BackendContractError("embedding row is not an array");
    std::vector<double> vec;
    vec.reserve(row.size());
    for (const auto& x : row) {
      if (!x.is_number()) throw BackendContractError("embedding row has a non-numeric value");
      vec.push_back(x.get<double>());
    }
    if (dim != 0 && vec.size() != dim) {
      throw BackendContractError("embedding row has dimension " + std::to_string(vec.size()) +
                                 ", response declares " + std::to_string(dim));
    }
    out.push_back(std::move(vec));
  }
  return out;
}

ServiceHealth RemoteBackend::health() const {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  auto res = client.Get(base_path_ + "/health");
  if (!res || res->status != 200) throw TransportError(endpoint_, error_detail(res));
  try {
    auto body = json::parse(res->body);
    ServiceHealth h;
    h.status = body.at("status").get<std::string>();
    h.models = body.value("models", std::vector<std::string>{});
    return h;
  } catch (const json::exception& e) {
    throw BackendContractError("malformed /health response: " + std::string(e.what()));
  }
}

}  // namespace sbf
