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

#ifndef SBF_TESTS_TEST_UTIL_HPP_
#define SBF_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sbf/ontology.hpp"
#include "sbf/sbf.hpp"

namespace sbf::testing {

inline std::filesystem::path data_dir() { return SBF_TEST_DATA_DIR; }
inline std::string data_path(const std::string& name) { return (data_dir() / name).string(); }

// Scorer over the mini ontology and the hand-built fixture vectors.
inline Scorer fixture_scorer(SbfConfig config = {}) {
  config.backend.kind = BackendKind::kFixture;
  config.backend.model_id.clear();
  config.backend.fixture_path = data_path("example_fixture.json");
  return Scorer::create(load_ontology_file(data_path("mini_ontology.json")), config);
}

inline EmbeddingVector basis(std::size_t dim, std::size_t i) {
  std::vector<double> v(dim, 0.0);
  v[i] = 1.0;
  return EmbeddingVector(std::move(v)).normalized();
}

inline EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return EmbeddingVector(std::move(v)).normalized();
}

inline DetectedTag make_tag(const std::string& name, EmbeddingVector emb, double best_sim = 1.0,
                            std::size_t index = 0) {
  DetectedTag t;
  t.class_id = "id-" + name;
  t.name = name;
  t.embedding = std::move(emb);
  t.best_phrase = name;
  t.best_sim = best_sim;
  t.universe_index = index;
  return t;
}

template <typename T>
std::vector<std::string> names_of(const std::vector<T>& tags) {
  std::vector<std::string> out;
  for (const auto& t : tags) {
    if constexpr (std::is_same_v<T, TruePositive>) {
      out.push_back(t.tag.name);
    } else {
      out.push_back(t.name);
    }
  }
  return out;
}

}  // namespace sbf::testing

#endif  // SBF_TESTS_TEST_UTIL_HPP_
