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

#include "sbf/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "sbf/sha256.hpp"

namespace sbf {

using nlohmann::json;

namespace {

json phrases_json(const std::vector<Phrase>& phrases) {
  json out = json::array();
  for (const auto& p : phrases) out.push_back(p.text);
  return out;
}

json tags_json(const std::vector<DetectedTag>& tags) {
  json out = json::array();
  for (const auto& t : tags) out.push_back(tag_json(t));
  return out;
}

json stats_json(const CategoryStats& s) {
  return {{"total", s.total},
          {"correct", s.correct},
          {"tie", s.tie},
          {"incorrect", s.incorrect()},
          {"accuracy", s.total == 0 ? json(nullptr) : json(s.accuracy())}};
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json config_json(const SbfConfig& c) {
  json backend = {{"kind", backend_kind_name(c.backend.kind)}, {"normalize", c.backend.normalize}};
  if (c.backend.kind != BackendKind::kFixture) backend["model"] = c.backend.model_id;
  if (!c.backend.endpoint.empty()) backend["endpoint"] = c.backend.endpoint;
  if (!c.backend.fixture_path.empty()) backend["fixture_path"] = c.backend.fixture_path;
  if (!c.backend.model_dir.empty()) backend["model_dir"] = c.backend.model_dir;
  return {{"tag_t", c.tag_t},
          {"sim_t", c.sim_t},
          {"rep_t", c.rep_t},
          {"backend", backend},
          {"exclude_restrictions", c.exclude_restrictions},
          {"boundary_words", c.phrases.boundary_words},
          {"trim_trailing_adverbs", c.phrases.trim_trailing_adverbs},
          {"lexicon", c.phrases.lexicon_path.empty() ? json("builtin") : json(c.phrases.lexicon_path)}};
}

json tag_json(const DetectedTag& t) {
  return {{"class_id", t.class_id}, {"name", t.name}, {"best_phrase", t.best_phrase}, {"best_sim", t.best_sim}};
}

json tp_json(const TruePositive& tp) {
  json j = tag_json(tp.tag);
  j["matched_class_id"] = tp.matched_class_id;
  j["matched_name"] = tp.matched_name;
  j["match_sim"] = tp.match_sim;
  return j;
}

json pair_report_json(const SbfReport& r) {
  json tp = json::array();
  for (const auto& t : r.tp) tp.push_back(tp_json(t));
  return {{"candidate", r.candidate},
          {"reference", r.reference},
          {"phrases_candidate", phrases_json(r.candidate_phrases)},
          {"phrases_reference", phrases_json(r.reference_phrases)},
          {"grounded_candidate", tags_json(r.grounded_candidate)},
          {"grounded_reference", tags_json(r.grounded_reference)},
          {"tags_candidate", tags_json(r.a_c)},
          {"tags_reference", tags_json(r.a_r)},
          {"tp", tp},
          {"fp", tags_json(r.fp)},
          {"fn", tags_json(r.fn)},
          {"precision", r.scores.precision},
          {"recall", r.scores.recall},
          {"fscore", r.scores.fscore}};
}

json corpus_items_json(const CorpusReport& report, std::span<const CaptionItem> items) {
  json out = json::array();
  for (std::size_t i = 0; i < report.items.size(); ++i) {
    const auto& it = report.items[i];
    json j = {{"item_id", it.item_id}};
    if (i < items.size()) {
      j["candidate"] = items[i].candidate;
      j["references"] = items[i].references;
    }
    if (it.score) {
      j["precision"] = it.score->scores.precision;
      j["recall"] = it.score->scores.recall;
      j["fscore"] = it.score->scores.fscore;
      json refs = json::array();
      for (const auto& r : it.score->per_reference) refs.push_back(pair_report_json(r));
      j["per_reference"] = std::move(refs);
    } else {
      j["error"] = it.error;
    }
    out.push_back(std::move(j));
  }
  return out;
}

json corpus_summary_json(const CorpusReport& report) {
  return {{"precision", report.mean.precision},
          {"recall", report.mean.recall},
          {"fscore", report.mean.fscore},
          {"items_scored", report.n_scored},
          {"items_failed", report.n_failed},
          {"has_failures", report.n_failed > 0}};
}

json benchmark_pairs_json(const BenchmarkResult& result) {
  json out = json::array();
  for (const auto& p : result.pairs) {
    out.push_back({{"pair_id", p.pair_id},
                   {"category", category_name(p.category)},
                   {"human_choice", choice_name(p.human_choice)},
                   {"fscore_a", p.fscore_a},
                   {"fscore_b", p.fscore_b},
                   {"metric_choice", choice_name(p.metric_choice)},
                   {"correct", p.correct}});
  }
  return out;
}

json benchmark_summary_json(const BenchmarkResult& result) {
  json cats = json::object();
  for (auto c : kCategories) cats[category_name(c)] = stats_json(result.stats(c));
  return {{"categories", cats}, {"overall", stats_json(result.overall)}};
}

json make_manifest(const std::string& command, const json& resolved_config,
                   const std::vector<ManifestInput>& inputs) {
  json digests = json::array();
  for (const auto& in : inputs) {
    digests.push_back({{"role", in.role}, {"path", in.path}, {"sha256", sha256_file_hex(in.path)}});
  }
  return {{"command", command},
          {"config", resolved_config},
          {"inputs", digests},
          {"tool", "sbf"},
          {"tool_version", kToolVersion},
          {"timestamp", utc_now()}};
}

std::string sweep_csv(const std::vector<std::pair<double, BenchmarkResult>>& sweep) {
  std::ostringstream out;
  out << "tag_t,category,total,correct,tie,accuracy\n";
  auto row = [&](double v, const std::string& name, const CategoryStats& s) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%g", v);
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.6f", s.accuracy());
    out << tag << ',' << name << ',' << s.total << ',' << s.correct << ',' << s.tie << ','
        << (s.total == 0 ? std::string() : std::string(acc)) << '\n';
  };
  for (const auto& [v, r] : sweep) {
    for (auto c : kCategories) row(v, category_name(c), r.stats(c));
    row(v, "overall", r.overall);
  }
  return out.str();
}

std::string explain(const SbfReport& r) {
  std::ostringstream out;
  auto phrase_line = [&](const std::vector<Phrase>& ps) {
    std::string s;
    for (const auto& p : ps) s += (s.empty() ? "" : "; ") + p.text;
    return s.empty() ? std::string("(none)") : s;
  };
  auto tag_lines = [&](const std::vector<DetectedTag>& tags) {
    if (tags.empty()) out << "    (none)\n";
    for (const auto& t : tags) {
      out << "    " << t.name << "  [" << fixed3(t.best_sim) << " via \"" << t.best_phrase << "\"]\n";
    }
  };
  out << "Candidate: " << r.candidate << "\n";
  out << "  phrases: " << phrase_line(r.candidate_phrases) << "\n";
  out << "  tags:\n";
  tag_lines(r.a_c);
  out << "Reference: " << r.reference << "\n";
  out << "  phrases: " << phrase_line(r.reference_phrases) << "\n";
  out << "  tags:\n";
  tag_lines(r.a_r);

  out << "True Positives:\n";
  if (r.tp.empty()) out << "    (none)\n";
  for (const auto& t : r.tp) {
    out << "    " << t.tag.name << "  [matches \"" << t.matched_name << "\", " << fixed3(t.match_sim) << "]\n";
  }
  out << "False Positives:\n";
  if (r.fp.empty()) out << "    (none)\n";
  for (const auto& t : r.fp) out << "    " << t.name << "\n";
  out << "False Negatives:\n";
  if (r.fn.empty()) out << "    (none)\n";
  for (const auto& t : r.fn) out << "    " << t.name << "\n";
  if (r.fp.empty() && r.fn.empty()) out << "no false alarms, no misses\n";
  out << "P=" << fixed3(r.scores.precision) << " R=" << fixed3(r.scores.recall)
      << " F=" << fixed3(r.scores.fscore) << "\n";
  return out.str();
}

}  // namespace sbf
