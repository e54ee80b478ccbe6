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

#include "sbf/phrase.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "sbf/errors.hpp"

namespace sbf {

// Generated from data/lexicon.tsv at configure time.
extern const char* const kBuiltinLexicon;

namespace {

constexpr std::array<std::pair<Pos, std::string_view>, 13> kPosNames{{
    {Pos::kUnset, "UNSET"},
    {Pos::kNoun, "NOUN"},
    {Pos::kVerb, "VERB"},
    {Pos::kAdj, "ADJ"},
    {Pos::kAdv, "ADV"},
    {Pos::kDet, "DET"},
    {Pos::kPron, "PRON"},
    {Pos::kAdp, "ADP"},
    {Pos::kCc, "CC"},
    {Pos::kSconj, "SCONJ"},
    {Pos::kNum, "NUM"},
    {Pos::kPunct, "PUNCT"},
    {Pos::kOther, "OTHER"},
}};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct ClosedClassEntry {
  std::string_view word;
  Pos pos;
};

// Function words. Order is irrelevant; looked up linearly once per token.
constexpr ClosedClassEntry kClosedClass[] = {
    // determiners
    {"a", Pos::kDet}, {"an", Pos::kDet}, {"the", Pos::kDet},
    {"this", Pos::kDet}, {"that", Pos::kDet}, {"these", Pos::kDet},
    {"those", Pos::kDet}, {"some", Pos::kDet}, {"any", Pos::kDet},
    {"each", Pos::kDet}, {"every", Pos::kDet}, {"another", Pos::kDet},
    {"several", Pos::kDet}, {"many", Pos::kDet}, {"few", Pos::kDet},
    {"both", Pos::kDet}, {"all", Pos::kDet}, {"no", Pos::kDet},
    {"its", Pos::kDet}, {"his", Pos::kDet}, {"her", Pos::kDet},
    {"their", Pos::kDet}, {"our", Pos::kDet}, {"my", Pos::kDet},
    {"your", Pos::kDet}, {"much", Pos::kDet}, {"more", Pos::kDet},
    {"most", Pos::kDet}, {"other", Pos::kDet}, {"such", Pos::kDet},
    // pronouns
    {"it", Pos::kPron}, {"he", Pos::kPron}, {"she", Pos::kPron},
    {"they", Pos::kPron}, {"we", Pos::kPron}, {"you", Pos::kPron},
    {"i", Pos::kPron}, {"him", Pos::kPron}, {"them", Pos::kPron},
    {"us", Pos::kPron}, {"me", Pos::kPron}, {"itself", Pos::kPron},
    {"himself", Pos::kPron}, {"herself", Pos::kPron},
    {"themselves", Pos::kPron}, {"someone", Pos::kPron},
    {"somebody", Pos::kPron}, {"something", Pos::kPron},
    {"everyone", Pos::kPron}, {"everybody", Pos::kPron},
    {"everything", Pos::kPron}, {"anyone", Pos::kPron},
    {"anything", Pos::kPron}, {"nothing", Pos::kPron},
    {"nobody", Pos::kPron}, {"one", Pos::kPron}, {"who", Pos::kPron},
    {"which", Pos::kPron}, {"what", Pos::kPron}, {"whom", Pos::kPron},
    // coordinating conjunctions
    {"and", Pos::kCc}, {"or", Pos::kCc}, {"but", Pos::kCc},
    {"nor", Pos::kCc},
    // subordinating conjunctions
    {"while", Pos::kSconj}, {"whilst", Pos::kSconj}, {"when", Pos::kSconj},
    {"whenever", Pos::kSconj}, {"whereas", Pos::kSconj},
    {"although", Pos::kSconj}, {"though", Pos::kSconj},
    {"because", Pos::kSconj}, {"until", Pos::kSconj},
    {"unless", Pos::kSconj}, {"as", Pos::kSconj}, {"before", Pos::kSconj},
    {"after", Pos::kSconj}, {"once", Pos::kSconj}, {"if", Pos::kSconj},
    // adpositions
    {"in", Pos::kAdp}, {"on", Pos::kAdp}, {"at", Pos::kAdp},
    {"from", Pos::kAdp}, {"to", Pos::kAdp}, {"of", Pos::kAdp},
    {"with", Pos::kAdp}, {"by", Pos::kAdp}, {"for", Pos::kAdp},
    {"against", Pos::kAdp}, {"into", Pos::kAdp}, {"onto", Pos::kAdp},
    {"over", Pos::kAdp}, {"under", Pos::kAdp}, {"through", Pos::kAdp},
    {"down", Pos::kAdp}, {"up", Pos::kAdp}, {"out", Pos::kAdp},
    {"off", Pos::kAdp}, {"near", Pos::kAdp}, {"around", Pos::kAdp},
    {"across", Pos::kAdp}, {"along", Pos::kAdp}, {"behind", Pos::kAdp},
    {"beside", Pos::kAdp}, {"between", Pos::kAdp}, {"during", Pos::kAdp},
    {"above", Pos::kAdp}, {"below", Pos::kAdp}, {"inside", Pos::kAdp},
    {"outside", Pos::kAdp}, {"towards", Pos::kAdp}, {"toward", Pos::kAdp},
    {"past", Pos::kAdp}, {"via", Pos::kAdp}, {"within", Pos::kAdp},
    {"without", Pos::kAdp}, {"like", Pos::kAdp}, {"about", Pos::kAdp},
    {"upon", Pos::kAdp}, {"amid", Pos::kAdp}, {"among", Pos::kAdp},
    {"beyond", Pos::kAdp}, {"underneath", Pos::kAdp},
    {"throughout", Pos::kAdp}, {"than", Pos::kAdp},
    // numerals
    {"two", Pos::kNum}, {"three", Pos::kNum}, {"four", Pos::kNum},
    {"five", Pos::kNum}, {"six", Pos::kNum}, {"seven", Pos::kNum},
    {"eight", Pos::kNum}, {"nine", Pos::kNum}, {"ten", Pos::kNum},
    {"dozen", Pos::kNum}, {"hundred", Pos::kNum},
    // particles and negation
    {"not", Pos::kOther}, {"n't", Pos::kOther},
};

}  // namespace

std::string_view pos_name(Pos pos) {
  for (const auto& [p, name] : kPosNames) {
    if (p == pos) return name;
  }
  return "UNSET";
}

std::optional<Pos> parse_pos(std::string_view name) {
  for (const auto& [p, n] : kPosNames) {
    if (n == name && p != Pos::kUnset) return p;
  }
  return std::nullopt;
}

std::vector<Token> tokenize(std::string_view caption) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = caption.size();
  while (i < n) {
    while (i < n && is_space(caption[i])) ++i;
    if (i >= n) break;
    std::size_t start = i;
    while (i < n && !is_space(caption[i])) ++i;
    std::size_t stop = i;

    std::size_t word_begin = start;
    while (word_begin < stop && is_punct(caption[word_begin])) ++word_begin;
    std::size_t word_end = stop;
    while (word_end > word_begin && is_punct(caption[word_end - 1])) --word_end;

    for (std::size_t k = start; k < word_begin; ++k) {
      tokens.push_back({std::string(1, caption[k]), Pos::kUnset, k, k + 1});
    }
    if (word_begin < word_end) {
      tokens.push_back({std::string(caption.substr(word_begin, word_end - word_begin)),
                        Pos::kUnset, word_begin, word_end});
    }
    for (std::size_t k = word_end; k < stop; ++k) {
      tokens.push_back({std::string(1, caption[k]), Pos::kUnset, k, k + 1});
    }
  }
  if (tokens.empty()) throw EmptyCaptionError();
  return tokens;
}

Lexicon Lexicon::parse(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError("lexicon line " + std::to_string(line_no) +
                           ": expected word<TAB>TAG",
                       line_no);
    }
    auto pos = parse_pos(std::string_view(line).substr(tab + 1));
    if (!pos) {
      throw ParseError("lexicon line " + std::to_string(line_no) +
                           ": unknown tag '" + line.substr(tab + 1) + "'",
                       line_no);
    }
    lex.insert(ascii_lower(std::string_view(line).substr(0, tab)), *pos);
  }
  return lex;
}

Lexicon Lexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path);
  return parse(in);
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = [] {
    std::istringstream in(kBuiltinLexicon);
    return parse(in);
  }();
  return lex;
}

std::optional<Pos> Lexicon::lookup(std::string_view word) const {
  auto find = [&](std::string_view w) -> std::optional<Pos> {
    auto it = entries_.find(std::string(w));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  };
  if (auto p = find(word)) return p;
  if (word.size() > 3 && ends_with(word, "es")) {
    if (auto p = find(word.substr(0, word.size() - 2))) return p;
  }
  if (word.size() > 2 && ends_with(word, "s") && !ends_with(word, "ss")) {
    if (auto p = find(word.substr(0, word.size() - 1))) return p;
  }
  return std::nullopt;
}

void PosTagger::tag(std::vector<Token>& tokens) const {
  for (auto& t : tokens) {
    bool all_punct = !t.text.empty() &&
                     std::all_of(t.text.begin(), t.text.end(), is_punct);
    t.pos = all_punct ? Pos::kPunct : tag_word(ascii_lower(t.text));
  }
}

LexiconTagger::LexiconTagger() : lexicon_(Lexicon::builtin()) {}

LexiconTagger::LexiconTagger(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

std::optional<Pos> LexiconTagger::closed_class(std::string_view word) {
  for (const auto& e : kClosedClass) {
    if (e.word == word) return e.pos;
  }
  return std::nullopt;
}

Pos LexiconTagger::tag_word(std::string_view word) const {
  if (auto p = closed_class(word)) return *p;
  if (!word.empty() &&
      std::all_of(word.begin(), word.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
               c == ',';
      }) &&
      std::isdigit(static_cast<unsigned char>(word.front()))) {
    return Pos::kNum;
  }
  if (auto p = lexicon_.lookup(word)) return *p;
  if (word.size() > 4 && ends_with(word, "ing")) return Pos::kVerb;
  if (word.size() > 3 && ends_with(word, "ed")) return Pos::kVerb;
  if (word.size() > 3 && ends_with(word, "ly")) return Pos::kAdv;
  if (word.size() > 1 && ends_with(word, "s")) return Pos::kNoun;
  return Pos::kNoun;
}

std::vector<Token> pos_tag(std::vector<Token> tokens) {
  static const LexiconTagger tagger;
  tagger.tag(tokens);
  return tokens;
}

PhraseExtractor::PhraseExtractor()
    : PhraseExtractor(std::make_shared<LexiconTagger>(), PhraseConfig{}) {}

PhraseExtractor::PhraseExtractor(std::shared_ptr<const PosTagger> tagger,
                                 PhraseConfig config)
    : tagger_(std::move(tagger)), config_(std::move(config)) {
  if (!tagger_) throw ConfigError("phrase extractor needs a POS tagger");
}

std::vector<Token> PhraseExtractor::tagged_tokens(std::string_view caption) const {
  auto tokens = tokenize(caption);
  tagger_->tag(tokens);
  return tokens;
}

std::vector<Phrase> PhraseExtractor::extract(std::string_view caption) const {
  const auto tokens = tagged_tokens(caption);

  auto is_boundary = [&](const Token& t) {
    return t.pos == Pos::kCc || t.pos == Pos::kSconj ||
           config_.boundary_words.count(ascii_lower(t.text)) > 0;
  };

  struct Segment {
    std::size_t first;
    std::size_t last;  // exclusive
    bool strong;
  };
  std::vector<Segment> segments;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (is_boundary(tokens[i])) {
      ++i;
      continue;
    }
    std::size_t first = i;
    while (i < tokens.size() && !is_boundary(tokens[i])) ++i;
    std::size_t last = i;

    while (first < last && tokens[first].pos == Pos::kPunct) ++first;
    while (last > first &&
           (tokens[last - 1].pos == Pos::kPunct ||
            (config_.trim_trailing_adverbs && tokens[last - 1].pos == Pos::kAdv))) {
      --last;
    }
    if (first == last) continue;
    bool strong = std::any_of(tokens.begin() + first, tokens.begin() + last,
                              [](const Token& t) {
                                return t.pos == Pos::kNoun || t.pos == Pos::kVerb;
                              });
    segments.push_back({first, last, strong});
  }

  // Each group becomes one phrase: a strong segment plus any weak neighbours
  // merged into it.
  std::vector<std::vector<Segment>> groups;
  std::vector<Segment> pending;
  for (const auto& seg : segments) {
    if (seg.strong) {
      groups.emplace_back(std::move(pending));
      pending.clear();
      groups.back().push_back(seg);
    } else if (!groups.empty()) {
      groups.back().push_back(seg);
    } else {
      pending.push_back(seg);
    }
  }

  std::vector<Phrase> phrases;
  phrases.reserve(groups.size());
  for (const auto& group : groups) {
    std::string text;
    for (const auto& seg : group) {
      if (!text.empty()) text += ' ';
      std::size_t b = tokens[seg.first].begin;
      std::size_t e = tokens[seg.last - 1].end;
      text += ascii_lower(caption.substr(b, e - b));
    }
    phrases.push_back({std::move(text), group.front().first, group.back().last});
  }
  return phrases;
}

std::vector<Phrase> extract_phrases(std::string_view caption) {
  static const PhraseExtractor extractor;
  return extractor.extract(caption);
}

std::vector<std::string> phrase_texts(const std::vector<Phrase>& phrases) {
  std::vector<std::string> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(p.text);
  return out;
}

}  // namespace sbf
