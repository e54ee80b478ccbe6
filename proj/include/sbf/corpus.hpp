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

#ifndef SBF_CORPUS_HPP_
#define SBF_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sbf/sbf.hpp"

namespace sbf {

enum class Aggregation { kMean, kMax };
std::string aggregation_name(Aggregation a);
Aggregation parse_aggregation(const std::string& name);

struct CaptionItem {
  std::string item_id;
  std::string candidate;
  std::vector<std::string> references;
};

// Human-judgment pair categories: two correct human captions (HC), one
// incorrect human caption (HI), human vs machine (HM), machine vs machine.
enum class Category { kHC, kHI, kHM, kMM };
inline constexpr std::array<Category, 4> kCategories = {Category::kHC, Category::kHI,
                                                        Category::kHM, Category::kMM};
std::string category_name(Category c);
Category parse_category(const std::string& name);

enum class Choice { kA, kB, kTie };
std::string choice_name(Choice c);

struct JudgmentPair {
  std::string pair_id;
  std::string caption_a;
  std::string caption_b;
  std::vector<std::string> references;
  Category category = Category::kHC;
  Choice human_choice = Choice::kA;  // never kTie
};

struct MultiRefScore {
  Prf scores;
  std::vector<SbfReport> per_reference;
};

// Scores against each reference and aggregates P, R and F component-wise.
MultiRefScore score_multi_reference(const Scorer& scorer, std::string_view candidate,
                                    std::span<const std::string> references,
                                    Aggregation aggregation = Aggregation::kMean);

struct ItemResult {
  std::string item_id;
  std::optional<MultiRefScore> score;
  std::string error;  // set when score is empty
};

struct CorpusReport {
  std::vector<ItemResult> items;  // input order
  Prf mean;                       // over successfully scored items
  std::size_t n_scored = 0;
  std::size_t n_failed = 0;
};

// Items are scored independently on up to `workers` threads; per-item
// failures are recorded and excluded from the means.
CorpusReport evaluate_corpus(const Scorer& scorer, std::span<const CaptionItem> items,
                             Aggregation aggregation = Aggregation::kMean,
                             std::size_t workers = 1);

struct CategoryStats {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t tie = 0;

  std::size_t incorrect() const { return total - correct - tie; }
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
  friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

struct PairOutcome {
  std::string pair_id;
  Category category = Category::kHC;
  Choice human_choice = Choice::kA;
  double fscore_a = 0.0;
  double fscore_b = 0.0;
  Choice metric_choice = Choice::kTie;
  bool correct = false;
};

struct BenchmarkResult {
  std::array<CategoryStats, 4> categories{};  // indexed like kCategories
  CategoryStats overall;
  std::vector<PairOutcome> pairs;  // input order

  const CategoryStats& stats(Category c) const { return categories[static_cast<std::size_t>(c)]; }
};

// The metric prefers the caption with the higher aggregated F-score; equal
// scores are ties and count as incorrect.
BenchmarkResult pairwise_benchmark(const Scorer& scorer, std::span<const JudgmentPair> pairs,
                                   Aggregation aggregation = Aggregation::kMean,
                                   std::size_t workers = 1);

std::vector<std::pair<double, BenchmarkResult>> sweep_tag_t(
    const Scorer& scorer, std::span<const JudgmentPair> pairs, std::span<const double> values,
    Aggregation aggregation = Aggregation::kMean, std::size_t workers = 1);

enum class InputFormat { kCsv, kJsonl };
// Picks the format from the file extension (.csv, .jsonl/.json).
InputFormat format_for_path(const std::string& path);

std::vector<CaptionItem> load_caption_items(std::istream& in, InputFormat format);
std::vector<CaptionItem> load_caption_items_file(const std::string& path);
std::vector<JudgmentPair> load_judgment_pairs(std::istream& in, InputFormat format);
std::vector<JudgmentPair> load_judgment_pairs_file(const std::string& path);

// RFC 4180 reader. Each record carries the 1-based line on which it starts.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRecord> read_csv(std::istream& in);

}  // namespace sbf

#endif  // SBF_CORPUS_HPP_
