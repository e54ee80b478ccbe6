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

#include "sbf/sbf.hpp"

#include <algorithm>
#include <numeric>

#include "sbf/errors.hpp"

namespace sbf {

namespace {

const EmbeddingVector& tag_embedding(const DetectedTag& t) { return t.embedding; }

void check_threshold(const char* name, double v) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ConfigError(std::string(name) + " must lie strictly inside (0, 1), got " +
                      std::to_string(v));
  }
}

}  // namespace

void SbfConfig::validate() const {
  check_threshold("tag_t", tag_t);
  check_threshold("sim_t", sim_t);
  check_threshold("rep_t", rep_t);
  backend.validate();
}

EmbeddedUniverse::EmbeddedUniverse(TagUniverse universe, std::vector<EmbeddingVector> embeddings)
    : universe_(std::move(universe)), embeddings_(std::move(embeddings)) {
  if (embeddings_.size() != universe_.size()) {
    throw ValidationError("universe has " + std::to_string(universe_.size()) + " tags but " +
                          std::to_string(embeddings_.size()) + " embeddings");
  }
  for (const auto& e : embeddings_) {
    if (e.dim() != embeddings_.front().dim()) {
      throw DimensionMismatchError(embeddings_.front().dim(), e.dim());
    }
  }
}

EmbeddedUniverse EmbeddedUniverse::build(TagUniverse universe, const Embedder& embedder) {
  std::vector<std::string> names;
  names.reserve(universe.size());
  for (const auto& c : universe.classes()) names.push_back(c.name);
  auto embs = embedder.embed_batch(names);
  return EmbeddedUniverse(std::move(universe), std::move(embs));
}

std::vector<DetectedTag> ground_tags(std::span<const EmbeddingVector> phrase_embs,
                                     std::span<const std::string> phrase_texts,
                                     const EmbeddedUniverse& universe, double tag_t) {
  if (phrase_texts.size() != phrase_embs.size()) {
    throw ValidationError("ground_tags: phrase text and embedding counts differ");
  }
  std::vector<DetectedTag> found;
  if (phrase_embs.empty()) return found;
  for (const auto& p : phrase_embs) {
    if (p.dim() != universe.dim()) throw DimensionMismatchError(p.dim(), universe.dim());
  }
  const auto& embs = universe.embeddings();
  for (std::size_t a = 0; a < universe.size(); ++a) {
    std::size_t best = 0;
    double best_sim = cos_sim(embs[a], phrase_embs[0]);
    for (std::size_t p = 1; p < phrase_embs.size(); ++p) {
      double s = cos_sim(embs[a], phrase_embs[p]);
      if (s > best_sim) {
        best_sim = s;
        best = p;
      }
    }
    if (best_sim > tag_t) {
      const auto& cls = universe.universe()[a];
      found.push_back({cls.id, cls.name, embs[a], phrase_texts[best], best_sim, a});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const DetectedTag& x, const DetectedTag& y) {
    return x.best_sim > y.best_sim;
  });
  return found;
}

std::vector<DetectedTag> dedup(std::span<const DetectedTag> tags, double rep_t) {
  return dedup_by(tags, rep_t, tag_embedding);
}

MatchResult soft_match(std::span<const DetectedTag> a_c, std::span<const DetectedTag> a_r,
                       double sim_t) {
  MatchResult m;
  for (const auto& t : a_r) {
    const DetectedTag* best = nullptr;
    double best_sim = 0.0;
    bool all_below = true;
    for (const auto& u : a_c) {
      double s = cos_sim(t.embedding, u.embedding);
      if (best == nullptr || s > best_sim) {
        best = &u;
        best_sim = s;
      }
      if (!(s < sim_t)) all_below = false;
    }
    if (best != nullptr && best_sim > sim_t) {
      m.tp.push_back({t, best->class_id, best->name, best_sim});
    }
    if (all_below) m.fn.push_back(t);
  }
  for (const auto& t : a_c) {
    bool all_below = std::all_of(a_r.begin(), a_r.end(), [&](const DetectedTag& u) {
      return cos_sim(t.embedding, u.embedding) < sim_t;
    });
    if (all_below) m.fp.push_back(t);
  }
  return m;
}

MatchResult match_sets(std::span<const DetectedTag> a_c, std::span<const DetectedTag> a_r,
                       double sim_t, double rep_t) {
  MatchResult raw = soft_match(a_c, a_r, sim_t);
  MatchResult out;
  out.tp = dedup_by(std::span<const TruePositive>(raw.tp), rep_t,
                    [](const TruePositive& t) -> const EmbeddingVector& { return t.tag.embedding; });
  out.fp = dedup(raw.fp, rep_t);
  out.fn = dedup(raw.fn, rep_t);
  return out;
}

Prf prf(std::size_t n_tp, std::size_t n_fp, std::size_t n_fn) {
  if (n_tp == 0 && n_fp == 0 && n_fn == 0) return {1.0, 1.0, 1.0};
  if (n_tp == 0) return {0.0, 0.0, 0.0};
  double tp = static_cast<double>(n_tp);
  double p = tp / (tp + static_cast<double>(n_fp));
  double r = tp / (tp + static_cast<double>(n_fn));
  return {p, r, 2.0 * p * r / (p + r)};
}

Scorer::Scorer(std::shared_ptr<const EmbeddedUniverse> universe,
               std::shared_ptr<const Embedder> embedder, SbfConfig config)
    : universe_(std::move(universe)), embedder_(std::move(embedder)), config_(std::move(config)) {
  if (!universe_ || !embedder_) throw ConfigError("scorer needs a universe and an embedder");
  check_threshold("tag_t", config_.tag_t);
  check_threshold("sim_t", config_.sim_t);
  check_threshold("rep_t", config_.rep_t);
  auto tagger = config_.phrases.lexicon_path.empty()
                    ? std::make_shared<LexiconTagger>()
                    : std::make_shared<LexiconTagger>(Lexicon::load_file(config_.phrases.lexicon_path));
  extractor_ = std::make_shared<PhraseExtractor>(std::move(tagger), config_.phrases);
}

Scorer Scorer::create(std::vector<AudioClass> classes, SbfConfig config) {
  config.validate();
  auto embedder = make_embedder(config.backend);
  return create(std::move(classes), std::move(config), std::move(embedder));
}

Scorer Scorer::create(std::vector<AudioClass> classes, SbfConfig config,
                      std::shared_ptr<const Embedder> embedder) {
  auto universe = std::make_shared<EmbeddedUniverse>(EmbeddedUniverse::build(
      TagUniverse(std::move(classes), config.exclude_restrictions), *embedder));
  return Scorer(std::move(universe), std::move(embedder), std::move(config));
}

Scorer Scorer::with_thresholds(double tag_t, double sim_t, double rep_t) const {
  SbfConfig c = config_;
  c.tag_t = tag_t;
  c.sim_t = sim_t;
  c.rep_t = rep_t;
  Scorer s(universe_, embedder_, std::move(c));
  s.extractor_ = extractor_;
  return s;
}

SbfReport Scorer::score_pair(std::string_view candidate, std::string_view reference) const {
  SbfReport r;
  r.candidate = std::string(candidate);
  r.reference = std::string(reference);
  r.config = config_;
  r.candidate_phrases = extractor_->extract(candidate);
  r.reference_phrases = extractor_->extract(reference);

  std::vector<std::string> c_texts = phrase_texts(r.candidate_phrases);
  std::vector<std::string> r_texts = phrase_texts(r.reference_phrases);
  std::vector<std::string> all = c_texts;
  all.insert(all.end(), r_texts.begin(), r_texts.end());
  std::vector<EmbeddingVector> embs;
  if (!all.empty()) embs = embedder_->embed_batch(all);
  std::span<const EmbeddingVector> c_embs(embs.data(), c_texts.size());
  std::span<const EmbeddingVector> r_embs(embs.data() + c_texts.size(), r_texts.size());

  r.grounded_candidate = ground_tags(c_embs, c_texts, *universe_, config_.tag_t);
  r.grounded_reference = ground_tags(r_embs, r_texts, *universe_, config_.tag_t);
  r.a_c = dedup(r.grounded_candidate, config_.rep_t);
  r.a_r = dedup(r.grounded_reference, config_.rep_t);

  MatchResult m = match_sets(r.a_c, r.a_r, config_.sim_t, config_.rep_t);
  r.tp = std::move(m.tp);
  r.fp = std::move(m.fp);
  r.fn = std::move(m.fn);
  r.scores = prf(r.tp.size(), r.fp.size(), r.fn.size());
  return r;
}

SbfReport score_pair(std::string_view candidate, std::string_view reference,
                     const TagUniverse& universe, const SbfConfig& config) {
  config.validate();
  auto embedder = make_embedder(config.backend);
  auto embedded = std::make_shared<EmbeddedUniverse>(EmbeddedUniverse::build(universe, *embedder));
  Scorer scorer(std::move(embedded), std::move(embedder), config);
  return scorer.score_pair(candidate, reference);
}

}  // namespace sbf
