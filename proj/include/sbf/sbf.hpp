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

#ifndef SBF_SBF_HPP_
#define SBF_SBF_HPP_

#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbf/embedding.hpp"
#include "sbf/ontology.hpp"
#include "sbf/phrase.hpp"

namespace sbf {

struct SbfConfig {
  double tag_t = 0.4;   // phrase-tag grounding threshold
  double sim_t = 0.45;  // candidate-reference tag matching threshold
  double rep_t = 0.45;  // redundancy threshold between tags of one set
  EmbeddingBackendConfig backend;
  std::set<std::string> exclude_restrictions = default_excluded_restrictions();
  PhraseConfig phrases;

  // Each threshold must lie strictly inside (0, 1).
  void validate() const;
};

// An ontology tag grounded in a caption.
struct DetectedTag {
  std::string class_id;
  std::string name;
  EmbeddingVector embedding;
  std::string best_phrase;
  double best_sim = 0.0;
  std::size_t universe_index = 0;
};

struct TruePositive {
  DetectedTag tag;  // reference-side tag
  std::string matched_class_id;
  std::string matched_name;  // best candidate-side counterpart
  double match_sim = 0.0;
};

struct MatchResult {
  std::vector<TruePositive> tp;
  std::vector<DetectedTag> fp;
  std::vector<DetectedTag> fn;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;

  friend bool operator==(const Prf&, const Prf&) = default;
};

// The tag universe together with one embedding per tag label, computed once.
class EmbeddedUniverse {
 public:
  EmbeddedUniverse(TagUniverse universe, std::vector<EmbeddingVector> embeddings);
  static EmbeddedUniverse build(TagUniverse universe, const Embedder& embedder);

  const TagUniverse& universe() const { return universe_; }
  const std::vector<EmbeddingVector>& embeddings() const { return embeddings_; }
  std::size_t size() const { return universe_.size(); }
  std::size_t dim() const { return embeddings_.front().dim(); }

 private:
  TagUniverse universe_;
  std::vector<EmbeddingVector> embeddings_;
};

// Every tag whose best cosine against the phrases is strictly above tag_t,
// sorted by descending best_sim (ties in universe order).
std::vector<DetectedTag> ground_tags(std::span<const EmbeddingVector> phrase_embs,
                                     std::span<const std::string> phrase_texts,
                                     const EmbeddedUniverse& universe, double tag_t);

// Greedy representative selection in input order: an item is kept iff its
// cosine with every already kept item is strictly below rep_t.
template <typename T, typename Embedding>
std::vector<T> dedup_by(std::span<const T> items, double rep_t, Embedding embedding_of) {
  std::vector<T> kept;
  for (const auto& item : items) {
    bool redundant = false;
    for (const auto& k : kept) {
      if (!(cos_sim(embedding_of(item), embedding_of(k)) < rep_t)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(item);
  }
  return kept;
}

std::vector<DetectedTag> dedup(std::span<const DetectedTag> tags, double rep_t);

// Soft intersection and differences without the trailing redundancy pass:
//   tp = {t in a_r : exists u in a_c, cos(t,u) > sim_t}
//   fp = {t in a_c : for all u in a_r, cos(t,u) < sim_t}
//   fn = {t in a_r : for all u in a_c, cos(t,u) < sim_t}
MatchResult soft_match(std::span<const DetectedTag> a_c, std::span<const DetectedTag> a_r,
                       double sim_t);

// soft_match followed by dedup of each output set.
MatchResult match_sets(std::span<const DetectedTag> a_c, std::span<const DetectedTag> a_r,
                       double sim_t, double rep_t);

// Precision/recall/F from counts. (0,0,0) -> (1,1,1); an undefined ratio
// with any positive count is 0.
Prf prf(std::size_t n_tp, std::size_t n_fp, std::size_t n_fn);

struct SbfReport {
  std::string candidate;
  std::string reference;
  std::vector<Phrase> candidate_phrases;
  std::vector<Phrase> reference_phrases;
  std::vector<DetectedTag> grounded_candidate;  // before redundancy removal
  std::vector<DetectedTag> grounded_reference;
  std::vector<DetectedTag> a_c;
  std::vector<DetectedTag> a_r;
  std::vector<TruePositive> tp;
  std::vector<DetectedTag> fp;
  std::vector<DetectedTag> fn;
  Prf scores;
  SbfConfig config;
};

// Owns the pipeline state shared across caption pairs. Copies share the
// embedder and universe embeddings.
class Scorer {
 public:
  Scorer(std::shared_ptr<const EmbeddedUniverse> universe,
         std::shared_ptr<const Embedder> embedder, SbfConfig config);

  // Loads nothing from disk beyond what `config.backend` needs.
  static Scorer create(std::vector<AudioClass> classes, SbfConfig config);
  static Scorer create(std::vector<AudioClass> classes, SbfConfig config,
                       std::shared_ptr<const Embedder> embedder);

  SbfReport score_pair(std::string_view candidate, std::string_view reference) const;

  // Same embedder and universe, different thresholds.
  Scorer with_thresholds(double tag_t, double sim_t, double rep_t) const;

  const SbfConfig& config() const { return config_; }
  const EmbeddedUniverse& universe() const { return *universe_; }
  const Embedder& embedder() const { return *embedder_; }
  const PhraseExtractor& extractor() const { return *extractor_; }

 private:
  std::shared_ptr<const EmbeddedUniverse> universe_;
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const PhraseExtractor> extractor_;
  SbfConfig config_;
};

SbfReport score_pair(std::string_view candidate, std::string_view reference,
                     const TagUniverse& universe, const SbfConfig& config);

}  // namespace sbf

#endif  // SBF_SBF_HPP_
