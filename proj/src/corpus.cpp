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

#include "sbf/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "sbf/errors.hpp"

namespace sbf {

using nlohmann::json;

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string aggregation_name(Aggregation a) { return a == Aggregation::kMax ? "max" : "mean"; }

Aggregation parse_aggregation(const std::string& name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "max") return Aggregation::kMax;
  throw ConfigError("unknown aggregation '" + name + "' (expected mean or max)");
}

std::string category_name(Category c) {
  switch (c) {
    case Category::kHC: return "HC";
    case Category::kHI: return "HI";
    case Category::kHM: return "HM";
    case Category::kMM: return "MM";
  }
  return "HC";
}

Category parse_category(const std::string& name) {
  std::string u = upper(name);
  for (auto c : kCategories) {
    if (category_name(c) == u) return c;
  }
  throw ValidationError("unknown category '" + name + "' (expected HC, HI, HM or MM)");
}

std::string choice_name(Choice c) {
  switch (c) {
    case Choice::kA: return "A";
    case Choice::kB: return "B";
    case Choice::kTie: return "tie";
  }
  return "tie";
}

MultiRefScore score_multi_reference(const Scorer& scorer, std::string_view candidate,
                                    std::span<const std::string> references,
                                    Aggregation aggregation) {
  if (references.empty()) throw ValidationError("score_multi_reference: no references");
  MultiRefScore out;
  out.per_reference.reserve(references.size());
  for (std::size_t i = 0; i < references.size(); ++i) {
    try {
      out.per_reference.push_back(scorer.score_pair(candidate, references[i]));
    } catch (const std::exception& e) {
      throw Error("reference #" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (aggregation == Aggregation::kMax) {
    out.scores = {0.0, 0.0, 0.0};
    for (const auto& r : out.per_reference) {
      out.scores.precision = std::max(out.scores.precision, r.scores.precision);
      out.scores.recall = std::max(out.scores.recall, r.scores.recall);
      out.scores.fscore = std::max(out.scores.fscore, r.scores.fscore);
    }
  } else {
    double n = static_cast<double>(out.per_reference.size());
    for (const auto& r : out.per_reference) {
      out.scores.precision += r.scores.precision;
      out.scores.recall += r.scores.recall;
      out.scores.fscore += r.scores.fscore;
    }
    out.scores.precision /= n;
    out.scores.recall /= n;
    out.scores.fscore /= n;
  }
  return out;
}

CorpusReport evaluate_corpus(const Scorer& scorer, std::span<const CaptionItem> items,
                             Aggregation aggregation, std::size_t workers) {
  if (items.empty()) throw ValidationError("evaluate_corpus: no items");
  CorpusReport report;
  report.items.resize(items.size());
  parallel_for(items.size(), workers, [&](std::size_t i) {
    auto& slot = report.items[i];
    slot.item_id = items[i].item_id;
    try {
      slot.score = score_multi_reference(scorer, items[i].candidate, items[i].references, aggregation);
    } catch (const std::exception& e) {
      slot.error = "item " + items[i].item_id + ": " + e.what();
    }
  });

  for (const auto& it : report.items) {
    if (!it.score) {
      ++report.n_failed;
      continue;
    }
    ++report.n_scored;
    report.mean.precision += it.score->scores.precision;
    report.mean.recall += it.score->scores.recall;
    report.mean.fscore += it.score->scores.fscore;
  }
  if (report.n_scored > 0) {
    double n = static_cast<double>(report.n_scored);
    report.mean.precision /= n;
    report.mean.recall /= n;
    report.mean.fscore /= n;
  }
  return report;
}

BenchmarkResult pairwise_benchmark(const Scorer& scorer, std::span<const JudgmentPair> pairs,
                                   Aggregation aggregation, std::size_t workers) {
  if (pairs.empty()) throw ValidationError("pairwise_benchmark: no pairs");
  BenchmarkResult result;
  result.pairs.resize(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());

  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    const auto& p = pairs[i];
    auto& o = result.pairs[i];
    o.pair_id = p.pair_id;
    o.category = p.category;
    o.human_choice = p.human_choice;
    try {
      o.fscore_a = score_multi_reference(scorer, p.caption_a, p.references, aggregation).scores.fscore;
      o.fscore_b = score_multi_reference(scorer, p.caption_b, p.references, aggregation).scores.fscore;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("pair " + pairs[i].pair_id + ": " + e.what());
    }
  }

  for (auto& o : result.pairs) {
    o.metric_choice = o.fscore_a > o.fscore_b   ? Choice::kA
                      : o.fscore_b > o.fscore_a ? Choice::kB
                                                : Choice::kTie;
    o.correct = o.metric_choice == o.human_choice;
    for (CategoryStats* s : {&result.categories[static_cast<std::size_t>(o.category)], &result.overall}) {
      ++s->total;
      if (o.metric_choice == Choice::kTie) {
        ++s->tie;
      } else if (o.correct) {
        ++s->correct;
      }
    }
  }
  return result;
}

std::vector<std::pair<double, BenchmarkResult>> sweep_tag_t(const Scorer& scorer,
                                                            std::span<const JudgmentPair> pairs,
                                                            std::span<const double> values,
                                                            Aggregation aggregation,
                                                            std::size_t workers) {
  if (values.empty()) throw ValidationError("sweep_tag_t: no tag_t values");
  for (double v : values) {
    if (!(v > 0.0 && v < 1.0)) {
      throw ConfigError("tag_t values must lie strictly inside (0, 1), got " + std::to_string(v));
    }
  }
  std::vector<std::pair<double, BenchmarkResult>> out;
  out.reserve(values.size());
  for (double v : values) {
    Scorer s = scorer.with_thresholds(v, scorer.config().sim_t, scorer.config().rep_t);
    out.emplace_back(v, pairwise_benchmark(s, pairs, aggregation, workers));
  }
  return out;
}

// ---- ingestion ----

std::vector<CsvRecord> read_csv(std::istream& in) {
  std::vector<CsvRecord> records;
  std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < data.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool record_done = false;
    while (i < data.size() && !record_done) {
      char c = data[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < data.size() && data[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        ++i;
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          break;
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          record_done = true;
          break;
        default:
          field += c;
      }
      ++i;
    }
    if (in_quotes) throw ParseError("csv: unterminated quoted field starting at line " + std::to_string(rec.line), rec.line);
    rec.fields.push_back(std::move(field));
    bool empty_line = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!empty_line) records.push_back(std::move(rec));
  }
  return records;
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRecord> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError(name, 1);
    return static_cast<std::size_t>(it - header.begin());
  }
};

CsvTable read_table(std::istream& in) {
  auto records = read_csv(in);
  if (records.empty()) throw ParseError("csv: missing header row", 1);
  CsvTable t;
  t.header = std::move(records.front().fields);
  for (auto& h : t.header) {
    while (!h.empty() && std::isspace(static_cast<unsigned char>(h.back()))) h.pop_back();
    while (!h.empty() && std::isspace(static_cast<unsigned char>(h.front()))) h.erase(h.begin());
  }
  if (!t.header.empty() && t.header[0].rfind("\xEF\xBB\xBF", 0) == 0) t.header[0].erase(0, 3);
  t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  return t;
}

const std::string& cell(const CsvRecord& r, std::size_t col, const std::string& name) {
  if (col >= r.fields.size()) throw SchemaError(name, r.line);
  return r.fields[col];
}

std::string nonempty(std::string value, const std::string& what, std::size_t line) {
  if (blank(value)) {
    throw ValidationError("line " + std::to_string(line) + ": empty " + what);
  }
  return value;
}

Choice parse_choice(const std::string& s, std::size_t line) {
  std::string u = upper(s);
  if (u == "A") return Choice::kA;
  if (u == "B") return Choice::kB;
  throw ValidationError("line " + std::to_string(line) + ": human_choice must be A or B, got '" + s + "'");
}

json parse_json_line(const std::string& text, std::size_t line) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ValidationError("line " + std::to_string(line) + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ParseError("jsonl line " + std::to_string(line) + ": " + e.what(), line);
  }
}

std::string json_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw SchemaError(key, line);
  return it->get<std::string>();
}

std::vector<std::string> json_strings(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) throw SchemaError(key, line);
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw ValidationError("line " + std::to_string(line) + ": '" + key + "' must hold strings");
    out.push_back(nonempty(v.get<std::string>(), "reference", line));
  }
  if (out.empty()) throw ValidationError("line " + std::to_string(line) + ": no references");
  return out;
}

template <typename Fn>
void for_each_jsonl(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    fn(parse_json_line(text, line), line);
  }
}

JudgmentPair validated(JudgmentPair p, std::size_t line) {
  if (p.caption_a == p.caption_b) {
    throw ValidationError("line " + std::to_string(line) + ": pair " + p.pair_id +
                          " has identical captions");
  }
  return p;
}

}  // namespace

InputFormat format_for_path(const std::string& original) {
  std::string path = original;
  for (auto& ch : path) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto ends = [&](const char* s) {
    std::string suffix(s);
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends(".csv")) return InputFormat::kCsv;
  if (ends(".jsonl") || ends(".json") || ends(".ndjson")) return InputFormat::kJsonl;
  throw ConfigError("cannot infer input format of " + original + " (use .csv or .jsonl)");
}

std::vector<CaptionItem> load_caption_items(std::istream& in, InputFormat format) {
  std::vector<CaptionItem> items;
  if (format == InputFormat::kJsonl) {
    for_each_jsonl(in, [&](const json& j, std::size_t line) {
      CaptionItem it;
      it.item_id = json_string(j, "item_id", line);
      it.candidate = nonempty(json_string(j, "candidate", line), "candidate", line);
      it.references = json_strings(j, "references", line);
      items.push_back(std::move(it));
    });
    return items;
  }

  CsvTable t = read_table(in);
  std::size_t c_id = t.column("item_id");
  std::size_t c_cand = t.column("candidate");
  std::size_t c_ref = t.column("reference");
  std::map<std::string, std::size_t> index;
  for (const auto& row : t.rows) {
    std::string id = cell(row, c_id, "item_id");
    std::string cand = nonempty(cell(row, c_cand, "candidate"), "candidate", row.line);
    std::string ref = nonempty(cell(row, c_ref, "reference"), "reference", row.line);
    auto [pos, inserted] = index.emplace(id, items.size());
    if (inserted) {
      items.push_back({id, cand, {}});
    } else if (items[pos->second].candidate != cand) {
      throw ValidationError("line " + std::to_string(row.line) + ": item " + id +
                            " repeats with a different candidate caption");
    }
    items[pos->second].references.push_back(std::move(ref));
  }
  return items;
}

std::vector<JudgmentPair> load_judgment_pairs(std::istream& in, InputFormat format) {
  std::vector<JudgmentPair> pairs;
  if (format == InputFormat::kJsonl) {
    for_each_jsonl(in, [&](const json& j, std::size_t line) {
      JudgmentPair p;
      p.pair_id = json_string(j, "pair_id", line);
      p.caption_a = nonempty(json_string(j, "caption_a", line), "caption_a", line);
      p.caption_b = nonempty(json_string(j, "caption_b", line), "caption_b", line);
      p.references = json_strings(j, "references", line);
      try {
        p.category = parse_category(json_string(j, "category", line));
      } catch (const ValidationError& e) {
        throw ValidationError("line " + std::to_string(line) + ": " + e.what());
      }
      p.human_choice = parse_choice(json_string(j, "human_choice", line), line);
      pairs.push_back(validated(std::move(p), line));
    });
    return pairs;
  }

  CsvTable t = read_table(in);
  std::size_t c_id = t.column("pair_id");
  std::size_t c_a = t.column("caption_a");
  std::size_t c_b = t.column("caption_b");
  std::size_t c_cat = t.column("category");
  std::size_t c_choice = t.column("human_choice");
  std::vector<std::size_t> ref_cols;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i].rfind("ref_", 0) == 0) ref_cols.push_back(i);
  }
  if (ref_cols.empty()) throw SchemaError("ref_1", 1);
  for (const auto& row : t.rows) {
    JudgmentPair p;
    p.pair_id = cell(row, c_id, "pair_id");
    p.caption_a = nonempty(cell(row, c_a, "caption_a"), "caption_a", row.line);
    p.caption_b = nonempty(cell(row, c_b, "caption_b"), "caption_b", row.line);
    try {
      p.category = parse_category(cell(row, c_cat, "category"));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(row.line) + ": " + e.what());
    }
    p.human_choice = parse_choice(cell(row, c_choice, "human_choice"), row.line);
    for (auto col : ref_cols) {
      if (col < row.fields.size() && !blank(row.fields[col])) p.references.push_back(row.fields[col]);
    }
    if (p.references.empty()) {
      throw ValidationError("line " + std::to_string(row.line) + ": pair " + p.pair_id + " has no references");
    }
    pairs.push_back(validated(std::move(p), row.line));
  }
  return pairs;
}

std::vector<CaptionItem> load_caption_items_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_caption_items(in, format_for_path(path));
}

std::vector<JudgmentPair> load_judgment_pairs_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_judgment_pairs(in, format_for_path(path));
}

}  // namespace sbf
