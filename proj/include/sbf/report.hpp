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

#ifndef SBF_REPORT_HPP_
#define SBF_REPORT_HPP_

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbf/corpus.hpp"
#include "sbf/sbf.hpp"

namespace sbf {

inline constexpr const char* kToolVersion = "0.3.0";

nlohmann::json config_json(const SbfConfig& config);
nlohmann::json tag_json(const DetectedTag& tag);
nlohmann::json tp_json(const TruePositive& tp);
nlohmann::json pair_report_json(const SbfReport& report);
nlohmann::json corpus_items_json(const CorpusReport& report, std::span<const CaptionItem> items);
nlohmann::json corpus_summary_json(const CorpusReport& report);
nlohmann::json benchmark_pairs_json(const BenchmarkResult& result);
nlohmann::json benchmark_summary_json(const BenchmarkResult& result);

struct ManifestInput {
  std::string role;  // "ontology", "dataset", ...
  std::string path;
};

// Command name, resolved configuration, SHA-256 of each input file, tool
// version and a UTC timestamp.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& resolved_config,
                             const std::vector<ManifestInput>& inputs);

// Rows of (tag_t, category, accuracy) including an "overall" row per value.
std::string sweep_csv(const std::vector<std::pair<double, BenchmarkResult>>& sweep);

// Human-readable explanation of a single pair.
std::string explain(const SbfReport& report);

}  // namespace sbf

#endif  // SBF_REPORT_HPP_
