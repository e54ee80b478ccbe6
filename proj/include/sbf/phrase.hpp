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

#ifndef SBF_PHRASE_HPP_
#define SBF_PHRASE_HPP_

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sbf {

// Coarse part-of-speech tag set.
enum class Pos {
  kUnset,
  kNoun,
  kVerb,
  kAdj,
  kAdv,
  kDet,
  kPron,
  kAdp,
  kCc,
  kSconj,
  kNum,
  kPunct,
  kOther,
};

std::string_view pos_name(Pos pos);
std::optional<Pos> parse_pos(std::string_view name);

struct Token {
  std::string text;
  Pos pos = Pos::kUnset;
  std::size_t begin = 0;  // byte offsets into the caption, [begin, end)
  std::size_t end = 0;
};

struct Phrase {
  std::string text;
  std::size_t first_token = 0;  // [first_token, last_token)
  std::size_t last_token = 0;

  friend bool operator==(const Phrase&, const Phrase&) = default;
};

// Splits on ASCII whitespace and peels leading/trailing punctuation off each
// chunk into single-character tokens. Throws EmptyCaptionError.
std::vector<Token> tokenize(std::string_view caption);

// word -> coarse tag table for open-class words. File format: one
// `word<TAB>TAG` per line; blank lines and lines starting with '#' skipped.
class Lexicon {
 public:
  static Lexicon parse(std::istream& in);
  static Lexicon load_file(const std::string& path);
  // The lexicon compiled into the library from data/lexicon.tsv.
  static const Lexicon& builtin();

  // Exact match first, then the bare stem of a plural/3rd-person "-s"/"-es"
  // form.
  std::optional<Pos> lookup(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  void insert(std::string word, Pos pos) { entries_[std::move(word)] = pos; }

 private:
  std::unordered_map<std::string, Pos> entries_;
};

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // `word` is already lowercased.
  virtual Pos tag_word(std::string_view word) const = 0;
  void tag(std::vector<Token>& tokens) const;
};

// Closed-class table, then lexicon, then suffix rules, then NOUN.
class LexiconTagger : public PosTagger {
 public:
  LexiconTagger();
  explicit LexiconTagger(Lexicon lexicon);
  Pos tag_word(std::string_view word) const override;

  static std::optional<Pos> closed_class(std::string_view word);

 private:
  Lexicon lexicon_;
};

std::vector<Token> pos_tag(std::vector<Token> tokens);

struct PhraseConfig {
  // Prepositions that introduce an accompanying sound and act as phrase
  // boundaries in addition to CC/SCONJ tokens.
  std::set<std::string> boundary_words = {"with"};
  // Drop trailing adverbs from each segment ("flowing relatively swiftly").
  bool trim_trailing_adverbs = true;
  // Replacement for the built-in lexicon; empty keeps the built-in one.
  std::string lexicon_path;
};

class PhraseExtractor {
 public:
  PhraseExtractor();
  PhraseExtractor(std::shared_ptr<const PosTagger> tagger, PhraseConfig config);

  std::vector<Token> tagged_tokens(std::string_view caption) const;
  std::vector<Phrase> extract(std::string_view caption) const;

  const PhraseConfig& config() const { return config_; }

 private:
  std::shared_ptr<const PosTagger> tagger_;
  PhraseConfig config_;
};

std::vector<Phrase> extract_phrases(std::string_view caption);
std::vector<std::string> phrase_texts(const std::vector<Phrase>& phrases);

}  // namespace sbf

#endif  // SBF_PHRASE_HPP_
