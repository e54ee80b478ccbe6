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

#include <sstream>

#include "sbf/errors.hpp"
#include "sbf/phrase.hpp"

using namespace sbf;

namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> phrases(std::string_view caption) {
  return phrase_texts(extract_phrases(caption));
}

Pos tag_of(const std::string& caption, std::size_t index) {
  return pos_tag(tokenize(caption)).at(index).pos;
}

}  // namespace

TEST_CASE("tokenize: punctuation is split off") {
  auto t = tokenize("A bell rings.");
  CHECK(texts(t) == std::vector<std::string>{"A", "bell", "rings", "."});
  for (const auto& tok : t) CHECK(tok.pos == Pos::kUnset);
}

TEST_CASE("tokenize: single token and counts") {
  CHECK(texts(tokenize("splashing")) == std::vector<std::string>{"splashing"});
  CHECK(tokenize("birds are chirping in the background").size() == 6);
  CHECK(texts(tokenize("\"Hello,\" she said!")) ==
        std::vector<std::string>{"\"", "Hello", ",", "\"", "she", "said", "!"});
}

TEST_CASE("tokenize: offsets are ordered and reconstruct the caption") {
  const std::string caption = "  Rain,  pouring (down) the street... ";
  auto t = tokenize(caption);
  std::size_t prev_end = 0;
  for (const auto& tok : t) {
    CHECK(tok.begin >= prev_end);
    CHECK(tok.end > tok.begin);
    CHECK(caption.substr(tok.begin, tok.end - tok.begin) == tok.text);
    for (std::size_t i = prev_end; i < tok.begin; ++i) CHECK(std::isspace(static_cast<unsigned char>(caption[i])));
    prev_end = tok.end;
  }
}

TEST_CASE("tokenize: empty caption is an error") {
  CHECK_THROWS_AS(tokenize(""), EmptyCaptionError);
  CHECK_THROWS_AS(tokenize(" \t\n "), EmptyCaptionError);
}

TEST_CASE("pos_tag: lexicon, closed class, suffix and fallback rules") {
  CHECK(tag_of("A bell rings while birds sing", 1) == Pos::kNoun);
  CHECK(tag_of("A bell rings while birds sing", 2) == Pos::kVerb);
  CHECK(tag_of("A bell rings while birds sing", 3) == Pos::kSconj);
  CHECK(tag_of("A bell rings while birds sing", 0) == Pos::kDet);
  CHECK(tag_of("zzzgrk", 0) == Pos::kNoun);
  CHECK(tag_of("chirping", 0) == Pos::kVerb);
  CHECK(tag_of("blorped", 0) == Pos::kVerb);
  CHECK(tag_of("glorply", 0) == Pos::kAdv);
  CHECK(tag_of("and", 0) == Pos::kCc);
  CHECK(tag_of("with", 0) == Pos::kAdp);
  CHECK(tag_of("it", 0) == Pos::kPron);
  CHECK(tag_of("3", 0) == Pos::kNum);
  CHECK(tag_of("!", 0) == Pos::kPunct);
}

TEST_CASE("pos_tag: coarse tags on a full sentence") {
  auto t = pos_tag(tokenize("A bell is ringing while birds are chirping in the background"));
  std::vector<Pos> want = {Pos::kDet, Pos::kNoun, Pos::kVerb, Pos::kVerb, Pos::kSconj, Pos::kNoun,
                           Pos::kVerb, Pos::kVerb, Pos::kAdp, Pos::kDet, Pos::kNoun};
  REQUIRE(t.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(t[i].pos == want[i]);
}

TEST_CASE("pos names round-trip") {
  for (Pos p : {Pos::kNoun, Pos::kVerb, Pos::kAdj, Pos::kAdv, Pos::kDet, Pos::kPron, Pos::kAdp, Pos::kCc,
                Pos::kSconj, Pos::kNum, Pos::kPunct, Pos::kOther}) {
    CHECK(parse_pos(pos_name(p)) == p);
  }
  CHECK_FALSE(parse_pos("BOGUS").has_value());
}

TEST_CASE("lexicon: parse and errors") {
  std::istringstream ok("# comment\nfoo\tVERB\n\nbar\tADJ\n");
  auto lex = Lexicon::parse(ok);
  CHECK(lex.size() == 2);
  CHECK(lex.lookup("foo") == Pos::kVerb);
  CHECK(lex.lookup("foos") == Pos::kVerb);
  std::istringstream bad("foo VERB\n");
  CHECK_THROWS_AS(Lexicon::parse(bad), ParseError);
  std::istringstream bad_tag("foo\tWAT\n");
  CHECK_THROWS_AS(Lexicon::parse(bad_tag), ParseError);
  CHECK(Lexicon::builtin().size() > 500);
}

TEST_CASE("extract_phrases: caption goldens") {
  using V = std::vector<std::string>;
  CHECK(phrases("A bell is ringing while birds are chirping in the background") ==
        V{"a bell is ringing", "birds are chirping in the background"});
  CHECK(phrases("A bell rings while people talk in a courtyard") == V{"a bell rings", "people talk in a courtyard"});
  CHECK(phrases("The waves are crashing against the shore and splashing") ==
        V{"the waves are crashing against the shore", "splashing"});
  CHECK(phrases("Ocean waves roll in and out from the shore") == V{"ocean waves roll in", "out from the shore"});
  CHECK(phrases("Rain is pouring down the street with traffic sounds") ==
        V{"rain is pouring down the street", "traffic sounds"});
  CHECK(phrases("A river is flowing relatively swiftly and a waterfall flows") ==
        V{"a river is flowing", "a waterfall flows"});
}

TEST_CASE("extract_phrases: no boundary gives the whole trimmed caption") {
  CHECK(phrases("A dog barks loudly in the distance.") == std::vector<std::string>{"a dog barks loudly in the distance"});
  CHECK(phrases("\"Splashing!\"") == std::vector<std::string>{"splashing"});
}

TEST_CASE("extract_phrases: weak segments merge") {
  // "and loudly" has neither noun nor verb and joins the preceding phrase.
  CHECK(phrases("A dog barks, and very loud") == std::vector<std::string>{"a dog barks very loud"});
  CHECK(phrases("Very loud and a dog barks") == std::vector<std::string>{"very loud a dog barks"});
  CHECK(phrases("and , or") == std::vector<std::string>{});
}

TEST_CASE("extract_phrases: boundary words are configuration") {
  PhraseConfig cfg;
  cfg.boundary_words = {};
  PhraseExtractor ex(std::make_shared<LexiconTagger>(), cfg);
  CHECK(phrase_texts(ex.extract("Rain is pouring down the street with traffic sounds")) ==
        std::vector<std::string>{"rain is pouring down the street with traffic sounds"});
  cfg.boundary_words = {"with", "near"};
  PhraseExtractor ex2(std::make_shared<LexiconTagger>(), cfg);
  CHECK(phrase_texts(ex2.extract("A dog barks near a road")) == std::vector<std::string>{"a dog barks", "a road"});
}

TEST_CASE("extract_phrases: adverb trimming can be disabled") {
  PhraseConfig cfg;
  cfg.trim_trailing_adverbs = false;
  PhraseExtractor ex(std::make_shared<LexiconTagger>(), cfg);
  CHECK(phrase_texts(ex.extract("A river is flowing relatively swiftly and a waterfall flows")) ==
        std::vector<std::string>{"a river is flowing relatively swiftly", "a waterfall flows"});
}

TEST_CASE("extract_phrases: structural invariants") {
  const std::vector<std::string> captions = {
      "A bell is ringing while birds are chirping in the background",
      "Ocean waves roll in and out from the shore",
      "People are talking, and a car passes by while rain falls with thunder.",
      "Loud, and then quiet",
      "Water flows; a man speaks and birds chirp until the end",
  };
  for (const auto& c : captions) {
    CAPTURE(c);
    auto tokens = PhraseExtractor().tagged_tokens(c);
    auto ps = extract_phrases(c);
    std::string lower = c;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    std::size_t prev_last = 0;
    for (const auto& p : ps) {
      CHECK_FALSE(p.text.empty());
      CHECK(p.first_token < p.last_token);
      CHECK(p.last_token <= tokens.size());
      CHECK(p.first_token >= prev_last);
      prev_last = p.last_token;
      // Every word of the phrase occurs in order in the lowercased caption.
      std::size_t pos = 0;
      std::istringstream words(p.text);
      std::string w;
      while (words >> w) {
        pos = lower.find(w, pos);
        CHECK(pos != std::string::npos);
        if (pos == std::string::npos) break;
        pos += w.size();
      }
    }
    CHECK(phrase_texts(extract_phrases(c)) == phrase_texts(ps));
  }
}
