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

#include <doctest.h>

#include <cmath>
#include <random>

#include "criteria.hpp"
#include "sbf/errors.hpp"
#include "sbf/sbf.hpp"
#include "test_util.hpp"

using namespace sbf;
using testing::basis;
using testing::make_tag;
using testing::names_of;

namespace {

EmbeddedUniverse one_hot_universe(const std::vector<std::string>& names) {
  std::vector<AudioClass> classes;
  std::vector<EmbeddingVector> embs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    classes.push_back({"id" + std::to_string(i), names[i], "", {}, {}});
    embs.push_back(basis(names.size(), i));
  }
  return EmbeddedUniverse(TagUniverse(classes, {}), embs);
}

std::vector<std::string> texts(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("config: thresholds must lie strictly inside (0, 1)") {
  SbfConfig c;
  c.backend.kind = BackendKind::kFixture;
  c.backend.model_id.clear();
  c.backend.fixture_path = "x";
  CHECK_NOTHROW(c.validate());
  for (double bad : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    SbfConfig t = c;
    t.tag_t = bad;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = c;
    t.sim_t = bad;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = c;
    t.rep_t = bad;
    CHECK_THROWS_AS(t.validate(), ConfigError);
  }
  SbfConfig d;
  CHECK(d.tag_t == 0.4);
  CHECK(d.sim_t == 0.45);
  CHECK(d.rep_t == 0.45);
}

TEST_CASE("ground_tags: one-hot example") {
  auto u = one_hot_universe({"Bell", "Bird", "Conversation"});
  std::vector<EmbeddingVector> p = {basis(3, 0), basis(3, 1)};
  auto g = ground_tags(p, texts(2), u, 0.5);
  CHECK(names_of(g) == std::vector<std::string>{"Bell", "Bird"});
  CHECK(g[0].best_phrase == "p0");
  CHECK(g[1].best_phrase == "p1");
  CHECK(g[0].best_sim == 1.0);
}

TEST_CASE("ground_tags: empty phrase list and dimension mismatch") {
  auto u = one_hot_universe({"Bell", "Bird"});
  std::vector<EmbeddingVector> none;
  std::vector<std::string> no_text;
  CHECK(ground_tags(none, no_text, u, 0.4).empty());
  std::vector<EmbeddingVector> p = {basis(3, 0)};
  CHECK_THROWS_AS(ground_tags(p, texts(1), u, 0.4), DimensionMismatchError);
}

TEST_CASE("ground_tags: strict threshold boundary") {
  // cos = 3/5 exactly.
  auto u = one_hot_universe({"A", "B"});
  std::vector<EmbeddingVector> p = {EmbeddingVector({3.0, 4.0}).normalized()};
  CHECK(ground_tags(p, texts(1), u, 0.6).size() == 1);  // B at 0.8 only
  CHECK(names_of(ground_tags(p, texts(1), u, 0.6)) == std::vector<std::string>{"B"});
  CHECK(ground_tags(p, texts(1), u, 0.5999999).size() == 2);
  CHECK(ground_tags(p, texts(1), u, 0.8).empty());
}

TEST_CASE("ground_tags: descending best_sim, ties in universe order") {
  auto u = one_hot_universe({"A", "B", "C"});
  std::vector<EmbeddingVector> p = {EmbeddingVector({1.0, 2.0, 2.0}).normalized()};
  auto g = ground_tags(p, texts(1), u, 0.2);
  CHECK(names_of(g) == std::vector<std::string>{"B", "C", "A"});
}

TEST_CASE("ground_tags: brute-force agreement on random universes") {
  CHECK(criteria::soft_ops_brute_force(60, 99) == "");
}

TEST_CASE("dedup: church bell collapses into bell") {
  auto bell = make_tag("Bell", basis(3, 0), 0.9);
  auto church = make_tag("Church bell", EmbeddingVector({0.8, 0.6, 0.0}).normalized(), 0.8);
  auto bird = make_tag("Bird", basis(3, 2), 0.7);
  std::vector<DetectedTag> tags = {bell, church, bird};
  CHECK(names_of(dedup(tags, 0.45)) == std::vector<std::string>{"Bell", "Bird"});
  // Greedy keep-first: order decides the representative.
  std::vector<DetectedTag> flipped = {church, bell, bird};
  CHECK(names_of(dedup(flipped, 0.45)) == std::vector<std::string>{"Church bell", "Bird"});
}

TEST_CASE("dedup: separated input is unchanged; rep_t is strict") {
  std::vector<DetectedTag> tags = {make_tag("A", basis(3, 0)), make_tag("B", basis(3, 1)),
                                   make_tag("C", basis(3, 2))};
  CHECK(names_of(dedup(tags, 0.45)) == std::vector<std::string>{"A", "B", "C"});
  std::vector<DetectedTag> edge = {make_tag("A", basis(2, 0)),
                                   make_tag("B", EmbeddingVector({3.0, 4.0}).normalized())};
  CHECK(dedup(edge, 0.6).size() == 1);
  CHECK(dedup(edge, 0.6000001).size() == 2);
  CHECK(dedup(std::vector<DetectedTag>{}, 0.45).empty());
}

TEST_CASE("dedup: separation property") { CHECK(criteria::dedup_separation(300, 5) == ""); }

TEST_CASE("match_sets: one-hot example") {
  auto u = one_hot_universe({"Bell", "Bird", "Conversation"});
  std::vector<DetectedTag> a_c = {make_tag("Bell", u.embeddings()[0]), make_tag("Bird", u.embeddings()[1])};
  std::vector<DetectedTag> a_r = {make_tag("Bell", u.embeddings()[0]),
                                  make_tag("Conversation", u.embeddings()[2])};
  auto m = match_sets(a_c, a_r, 0.45, 0.45);
  CHECK(names_of(m.tp) == std::vector<std::string>{"Bell"});
  CHECK(m.tp[0].matched_name == "Bell");
  CHECK(m.tp[0].match_sim == 1.0);
  CHECK(names_of(m.fp) == std::vector<std::string>{"Bird"});
  CHECK(names_of(m.fn) == std::vector<std::string>{"Conversation"});
}

TEST_CASE("match_sets: identical sets are a perfect match") {
  std::vector<DetectedTag> a = {make_tag("Waves (surf)", basis(2, 0)), make_tag("Ocean", basis(2, 1))};
  auto m = match_sets(a, a, 0.45, 0.45);
  CHECK(m.tp.size() == 2);
  CHECK(m.fp.empty());
  CHECK(m.fn.empty());
}

TEST_CASE("match_sets: tp is drawn from the reference side") {
  auto rain = make_tag("Rain", basis(2, 0));
  auto raindrop = make_tag("Raindrop", EmbeddingVector({0.8, 0.6}).normalized());
  std::vector<DetectedTag> a_c = {rain}, a_r = {raindrop};
  auto m = match_sets(a_c, a_r, 0.45, 0.45);
  REQUIRE(m.tp.size() == 1);
  CHECK(m.tp[0].tag.name == "Raindrop");
  CHECK(m.tp[0].matched_name == "Rain");
  CHECK(m.tp[0].match_sim == doctest::Approx(0.8));
}

TEST_CASE("match_sets: empty inputs") {
  std::vector<DetectedTag> none;
  std::vector<DetectedTag> a = {make_tag("A", basis(2, 0)), make_tag("B", basis(2, 1))};
  auto m = match_sets(none, a, 0.45, 0.45);
  CHECK(m.tp.empty());
  CHECK(m.fp.empty());
  CHECK(names_of(m.fn) == std::vector<std::string>{"A", "B"});
  auto m2 = match_sets(a, none, 0.45, 0.45);
  CHECK(names_of(m2.fp) == std::vector<std::string>{"A", "B"});
  CHECK(m2.tp.empty());
  CHECK(m2.fn.empty());
}

TEST_CASE("match_sets: cosine exactly sim_t is neither tp nor fn") {
  std::vector<DetectedTag> a_c = {make_tag("A", basis(2, 0))};
  std::vector<DetectedTag> a_r = {make_tag("B", EmbeddingVector({3.0, 4.0}).normalized())};
  auto m = soft_match(a_c, a_r, 0.6);
  CHECK(m.tp.empty());
  CHECK(m.fn.empty());
  CHECK(m.fp.empty());
}

TEST_CASE("match_sets: membership discipline on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<DetectedTag> a_c, a_r;
    for (std::size_t i = 0; i < 6; ++i) a_c.push_back(make_tag("c" + std::to_string(i), testing::random_unit(rng, 3)));
    for (std::size_t i = 0; i < 6; ++i) a_r.push_back(make_tag("r" + std::to_string(i), testing::random_unit(rng, 3)));
    auto m = soft_match(a_c, a_r, 0.5);
    for (const auto& t : m.tp) CHECK(t.tag.name[0] == 'r');
    for (const auto& t : m.fn) CHECK(t.name[0] == 'r');
    for (const auto& t : m.fp) CHECK(t.name[0] == 'c');
    for (const auto& t : m.tp) {
      for (const auto& f : m.fn) CHECK(t.tag.name != f.name);
    }
    auto d = match_sets(a_c, a_r, 0.5, 0.45);
    CHECK(d.tp.size() <= m.tp.size());
    CHECK(d.fp.size() <= m.fp.size());
    CHECK(d.fn.size() <= m.fn.size());
  }
}

TEST_CASE("threshold monotonicity at set level") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AudioClass> classes;
    std::vector<EmbeddingVector> embs;
    for (std::size_t i = 0; i < 12; ++i) {
      classes.push_back({"id" + std::to_string(i), "t" + std::to_string(i), "", {}, {}});
      embs.push_back(testing::random_unit(rng, 4));
    }
    EmbeddedUniverse u(TagUniverse(classes, {}), embs);
    std::vector<EmbeddingVector> p = {testing::random_unit(rng, 4), testing::random_unit(rng, 4)};
    std::size_t prev = 1000;
    for (double t : {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
      auto g = ground_tags(p, texts(2), u, t);
      CHECK(g.size() <= prev);
      prev = g.size();
    }
    std::vector<DetectedTag> a_c, a_r;
    for (std::size_t i = 0; i < 6; ++i) a_c.push_back(make_tag("c", embs[i]));
    for (std::size_t i = 6; i < 12; ++i) a_r.push_back(make_tag("r", embs[i]));
    prev = 1000;
    for (double s : {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
      auto m = soft_match(a_c, a_r, s);
      CHECK(m.tp.size() <= prev);
      prev = m.tp.size();
    }
  }
}

TEST_CASE("prf: arithmetic and degenerate cases") {
  CHECK(prf(1, 1, 1) == Prf{0.5, 0.5, 0.5});
  CHECK(prf(2, 0, 0) == Prf{1, 1, 1});
  CHECK(prf(0, 0, 0) == Prf{1, 1, 1});
  CHECK(prf(0, 3, 0) == Prf{0, 0, 0});
  CHECK(prf(0, 0, 2) == Prf{0, 0, 0});
  auto s = prf(3, 1, 2);
  CHECK(s.precision == doctest::Approx(0.75));
  CHECK(s.recall == doctest::Approx(0.6));
  CHECK(s.fscore == doctest::Approx(2 * 0.75 * 0.6 / 1.35));
}

TEST_CASE("one-hot exhaustive equivalence") { CHECK(criteria::one_hot_exhaustive() == ""); }

TEST_CASE("score_pair: fixture reproduces the worked examples") {
  auto scorer = testing::fixture_scorer();
  CHECK(criteria::pair_set_goldens(scorer) == "");

  auto r = scorer.score_pair("A bell is ringing while birds are chirping in the background",
                             "A bell rings while people talk in a courtyard");
  CHECK(phrase_texts(r.candidate_phrases) ==
        std::vector<std::string>{"a bell is ringing", "birds are chirping in the background"});
  CHECK(names_of(r.grounded_candidate) == std::vector<std::string>{"Bell", "Bird", "Church bell"});
  CHECK(names_of(r.a_c) == std::vector<std::string>{"Bell", "Bird"});
  CHECK(names_of(r.a_r) == std::vector<std::string>{"Bell", "Conversation"});
  CHECK(r.a_c[0].best_phrase == "a bell is ringing");
  CHECK(r.tp[0].matched_name == "Bell");
  CHECK(r.scores == Prf{0.5, 0.5, 0.5});

  auto w = scorer.score_pair("The waves are crashing against the shore and splashing",
                             "Ocean waves roll in and out from the shore");
  auto wc = names_of(w.a_c);
  CHECK(std::set<std::string>{"Splash, splatter", "Waves (surf)", "Water"} == std::set<std::string>(wc.begin(), wc.end()));
  CHECK(w.scores == Prf{1, 1, 1});
}

TEST_CASE("score_pair: degenerate inputs") {
  auto scorer = testing::fixture_scorer();
  CHECK(criteria::degenerate_inputs(scorer) == "");
  CHECK_THROWS_AS(scorer.score_pair("", "a bell rings"), EmptyCaptionError);
  CHECK_THROWS_AS(scorer.score_pair("a bell rings", "   "), EmptyCaptionError);
}

TEST_CASE("score_pair: determinism and threshold variants") {
  auto scorer = testing::fixture_scorer();
  const std::string c = "Rain is pouring down the street with traffic sounds";
  const std::string ref = "A river is flowing relatively swiftly and a waterfall flows";
  auto a = scorer.score_pair(c, ref);
  auto b = scorer.score_pair(c, ref);
  CHECK(names_of(a.a_c) == names_of(b.a_c));
  CHECK(a.scores == b.scores);
  CHECK(a.a_c[0].best_sim == b.a_c[0].best_sim);
  auto strict = scorer.with_thresholds(0.95, 0.45, 0.45);
  CHECK(strict.config().tag_t == 0.95);
  auto s = strict.score_pair(c, ref);
  CHECK(s.grounded_candidate.size() <= a.grounded_candidate.size());
  CHECK_THROWS_AS(scorer.with_thresholds(1.0, 0.45, 0.45), ConfigError);
}

TEST_CASE("score_pair: missing fixture text surfaces as an error") {
  auto scorer = testing::fixture_scorer();
  CHECK_THROWS_AS(scorer.score_pair("A cat meows", "a bell rings"), MissingFixtureError);
}
