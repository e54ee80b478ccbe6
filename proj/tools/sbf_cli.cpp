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

// sbf: explainable audio-caption evaluation from the command line.
//
//   sbf score "a bell rings" "a bell is ringing while birds chirp"
//   sbf eval-corpus captions.csv --out corpus.json
//   sbf benchmark pairs.csv --workers 8
//   sbf sweep pairs.csv --tag-t-values 0.3,0.35,0.4,0.45,0.5 --csv sweep.csv
//   sbf cache info
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbf/bert.hpp"
#include "sbf/corpus.hpp"
#include "sbf/errors.hpp"
#include "sbf/report.hpp"
#include "sbf/sbf.hpp"

namespace {

// Config files may spell keys with underscores (tag_t) or dashes (tag-t).
class KeyValueConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    for (auto& item : items) std::replace(item.name.begin(), item.name.end(), '_', '-');
    return items;
  }
};

using nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
  double tag_t = 0.4;
  double sim_t = 0.45;
  double rep_t = 0.45;
  std::string model = "all-MiniLM-L6-v2";
  std::string backend = "local";
  std::string endpoint;
  std::string fixture;
  std::string model_dir;
  std::string ontology;
  std::string aggregation = "mean";
  std::string cache_dir;
  std::string lexicon;
  std::vector<std::string> exclude_restrictions{"abstract"};
  std::vector<std::string> boundary_words{"with"};
  bool no_normalize = false;
  bool no_trim_adverbs = false;
  bool json_out = false;
  std::string out;
  std::size_t workers = 1;
};

sbf::SbfConfig build_config(const Options& o) {
  sbf::SbfConfig c;
  c.tag_t = o.tag_t;
  c.sim_t = o.sim_t;
  c.rep_t = o.rep_t;
  c.backend.kind = sbf::parse_backend_kind(o.backend);
  c.backend.model_id = o.model;
  c.backend.endpoint = o.endpoint;
  c.backend.fixture_path = o.fixture;
  c.backend.model_dir = o.model_dir;
  c.backend.normalize = !o.no_normalize;
  c.backend.cache_dir = o.cache_dir;
  c.exclude_restrictions = {o.exclude_restrictions.begin(), o.exclude_restrictions.end()};
  c.exclude_restrictions.erase("");
  c.phrases.boundary_words = {o.boundary_words.begin(), o.boundary_words.end()};
  c.phrases.boundary_words.erase("");
  c.phrases.trim_trailing_adverbs = !o.no_trim_adverbs;
  c.phrases.lexicon_path = o.lexicon;
  c.validate();
  return c;
}

std::string ontology_path(const Options& o) {
  if (!o.ontology.empty()) return o.ontology;
  if (const char* env = std::getenv("SBF_ONTOLOGY"); env && *env) return env;
  return "ontology.json";
}

json resolved_config(const Options& o, const sbf::SbfConfig& c) {
  json j = sbf::config_json(c);
  j["ontology"] = ontology_path(o);
  j["aggregation"] = o.aggregation;
  return j;
}

sbf::Scorer make_scorer(const Options& o, const sbf::SbfConfig& c) {
  return sbf::Scorer::create(sbf::load_ontology_file(ontology_path(o)), c);
}

std::vector<sbf::ManifestInput> manifest_inputs(const Options& o, const sbf::SbfConfig& c,
                                                std::vector<sbf::ManifestInput> extra) {
  std::vector<sbf::ManifestInput> inputs{{"ontology", ontology_path(o)}};
  if (c.backend.kind == sbf::BackendKind::kFixture) inputs.push_back({"fixture", c.backend.fixture_path});
  if (c.backend.kind == sbf::BackendKind::kLocalModel) {
    auto dir = sbf::resolve_model_dir(c.backend.model_id, c.backend.model_dir);
    for (const char* f : {"config.json", "vocab.txt", "model.safetensors"}) {
      std::error_code ec;
      if (std::filesystem::exists(dir / f, ec)) inputs.push_back({std::string("model:") + f, (dir / f).string()});
    }
  }
  if (!c.phrases.lexicon_path.empty()) inputs.push_back({"lexicon", c.phrases.lexicon_path});
  for (auto& e : extra) inputs.push_back(std::move(e));
  return inputs;
}

void emit(const Options& o, const json& doc, bool to_stdout) {
  std::string text = doc.dump(2) + "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw sbf::Error("cannot write " + o.out);
    f << text;
  }
  if (to_stdout) std::cout << text;
}

void print_benchmark_table(std::ostream& os, const sbf::BenchmarkResult& r) {
  os << "category  total  correct  tie  accuracy\n";
  auto row = [&](const std::string& name, const sbf::CategoryStats& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-8s  %5zu  %7zu  %3zu  %8.3f\n", name.c_str(), s.total, s.correct,
                  s.tie, s.accuracy());
    os << buf;
  };
  for (auto c : sbf::kCategories) row(sbf::category_name(c), r.stats(c));
  row("overall", r.overall);
}

int run_score(const Options& o, const std::string& candidate, const std::vector<std::string>& refs) {
  auto config = build_config(o);
  auto scorer = make_scorer(o, config);
  auto agg = sbf::parse_aggregation(o.aggregation);
  auto multi = sbf::score_multi_reference(scorer, candidate, refs, agg);

  json items = json::array();
  for (const auto& r : multi.per_reference) items.push_back(sbf::pair_report_json(r));
  json doc = {{"manifest", sbf::make_manifest("score", resolved_config(o, config), manifest_inputs(o, config, {}))},
              {"config", resolved_config(o, config)},
              {"items", items},
              {"summary",
               {{"precision", multi.scores.precision},
                {"recall", multi.scores.recall},
                {"fscore", multi.scores.fscore}}}};

  if (!o.json_out) {
    for (std::size_t i = 0; i < multi.per_reference.size(); ++i) {
      if (multi.per_reference.size() > 1) std::cout << "== reference " << i + 1 << "\n";
      std::cout << sbf::explain(multi.per_reference[i]);
    }
    if (multi.per_reference.size() > 1) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "aggregate (%s): P=%.3f R=%.3f F=%.3f\n", o.aggregation.c_str(),
                    multi.scores.precision, multi.scores.recall, multi.scores.fscore);
      std::cout << buf;
    }
  }
  emit(o, doc, o.json_out);
  return 0;
}

int run_eval_corpus(const Options& o, const std::string& dataset) {
  auto config = build_config(o);
  auto agg = sbf::parse_aggregation(o.aggregation);
  auto items = sbf::load_caption_items_file(dataset);
  auto scorer = make_scorer(o, config);
  auto report = sbf::evaluate_corpus(scorer, items, agg, o.workers);

  json doc = {{"manifest", sbf::make_manifest("eval-corpus", resolved_config(o, config),
                                              manifest_inputs(o, config, {{"dataset", dataset}}))},
              {"config", resolved_config(o, config)},
              {"items", sbf::corpus_items_json(report, items)},
              {"summary", sbf::corpus_summary_json(report)}};
  emit(o, doc, o.out.empty() || o.json_out);
  if (report.n_failed > 0) {
    std::cerr << "warning: " << report.n_failed << " of " << items.size() << " item(s) failed and were skipped\n";
    for (const auto& it : report.items) {
      if (!it.score) std::cerr << "  " << it.error << "\n";
    }
  }
  if (!o.out.empty() && !o.json_out) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "items=%zu P=%.3f R=%.3f F=%.3f\n", report.n_scored, report.mean.precision,
                  report.mean.recall, report.mean.fscore);
    std::cout << buf;
  }
  return report.n_scored == 0 ? kExitRuntime : 0;
}

int run_benchmark(const Options& o, const std::string& pairs_path) {
  auto config = build_config(o);
  auto agg = sbf::parse_aggregation(o.aggregation);
  auto pairs = sbf::load_judgment_pairs_file(pairs_path);
  auto scorer = make_scorer(o, config);
  auto result = sbf::pairwise_benchmark(scorer, pairs, agg, o.workers);

  json doc = {{"manifest", sbf::make_manifest("benchmark", resolved_config(o, config),
                                              manifest_inputs(o, config, {{"pairs", pairs_path}}))},
              {"config", resolved_config(o, config)},
              {"pairs", sbf::benchmark_pairs_json(result)},
              {"summary", sbf::benchmark_summary_json(result)}};
  emit(o, doc, o.out.empty() || o.json_out);
  if (!o.out.empty() && !o.json_out) print_benchmark_table(std::cout, result);
  return 0;
}

int run_sweep(const Options& o, const std::string& pairs_path, const std::vector<double>& values,
              const std::string& csv_path) {
  auto config = build_config(o);
  auto agg = sbf::parse_aggregation(o.aggregation);
  auto pairs = sbf::load_judgment_pairs_file(pairs_path);
  auto scorer = make_scorer(o, config);
  auto sweep = sbf::sweep_tag_t(scorer, pairs, values, agg, o.workers);

  json runs = json::array();
  for (const auto& [v, r] : sweep) {
    runs.push_back({{"tag_t", v}, {"summary", sbf::benchmark_summary_json(r)}});
  }
  json cfg = resolved_config(o, config);
  cfg["tag_t_values"] = values;
  json doc = {{"manifest", sbf::make_manifest("sweep", cfg, manifest_inputs(o, config, {{"pairs", pairs_path}}))},
              {"config", cfg},
              {"sweep", runs}};
  std::string csv = sbf::sweep_csv(sweep);
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary | std::ios::trunc);
    if (!f) throw sbf::Error("cannot write " + csv_path);
    f << csv;
  }
  emit(o, doc, o.json_out);
  if (!o.json_out && csv_path.empty()) std::cout << csv;
  return 0;
}

int run_cache(const Options& o, const std::string& action) {
  auto dir = sbf::resolve_cache_dir(o.cache_dir);
  if (!dir) {
    std::cerr << "error: no disk cache configured (set SBF_CACHE_DIR or --cache-dir)\n";
    return kExitUsage;
  }
  if (action == "clear") {
    std::cout << "removed " << sbf::clear_disk_cache(*dir) << " cached embedding(s) from " << dir->string() << "\n";
    return 0;
  }
  auto stats = sbf::disk_cache_stats(*dir);
  json doc = {{"cache_dir", dir->string()}, {"entries", stats.entries}, {"bytes", stats.bytes},
              {"namespaces", stats.per_namespace}};
  if (o.json_out) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "cache: " << dir->string() << "\n" << "entries: " << stats.entries << " (" << stats.bytes
              << " bytes)\n";
    for (const auto& [ns, n] : stats.per_namespace) std::cout << "  " << ns << ": " << n << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity-based F-score for audio captions: reports false alarms and misses"};
  app.set_version_flag("--version", std::string(sbf::kToolVersion));
  app.set_config("--config", "", "TOML-style key = value configuration file (flags override it)");
  app.config_formatter(std::make_shared<KeyValueConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  auto unit = CLI::Range(0.0, 1.0);
  app.add_option("--tag-t", o.tag_t, "phrase-to-tag grounding threshold")->check(unit)->capture_default_str();
  app.add_option("--sim-t", o.sim_t, "candidate/reference tag matching threshold")->check(unit)->capture_default_str();
  app.add_option("--rep-t", o.rep_t, "redundant-tag threshold")->check(unit)->capture_default_str();
  app.add_option("--model", o.model, "embedding model id")->capture_default_str();
  app.add_option("--backend", o.backend, "embedding backend")
      ->check(CLI::IsMember({"local", "remote", "fixture"}))
      ->capture_default_str();
  app.add_option("--endpoint", o.endpoint, "embedding service base URL (remote backend)");
  app.add_option("--fixture", o.fixture, "text->vector JSON table (fixture backend)");
  app.add_option("--model-dir", o.model_dir, "directory with config.json, vocab.txt, model.safetensors");
  app.add_option("--ontology", o.ontology, "AudioSet ontology JSON (default $SBF_ONTOLOGY or ./ontology.json)");
  app.add_option("--aggregation", o.aggregation, "multi-reference aggregation")
      ->check(CLI::IsMember({"mean", "max"}))
      ->capture_default_str();
  app.add_option("--exclude-restrictions", o.exclude_restrictions, "ontology restrictions to drop")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--boundary-words", o.boundary_words, "extra phrase-boundary words")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--lexicon", o.lexicon, "replacement POS lexicon (word<TAB>TAG per line)");
  app.add_option("--cache-dir", o.cache_dir, "embedding disk cache (default $SBF_CACHE_DIR)");
  app.add_flag("--no-normalize", o.no_normalize, "keep raw embedding magnitudes");
  app.add_flag("--no-trim-adverbs", o.no_trim_adverbs, "keep trailing adverbs in phrases");
  app.add_flag("--json", o.json_out, "print the JSON report to stdout");
  app.add_option("--out", o.out, "write the JSON report to this file");
  app.add_option("--workers", o.workers, "parallel workers for corpus/benchmark runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string candidate;
  std::vector<std::string> references;
  auto* score = app.add_subcommand("score", "explain one candidate caption against reference(s)");
  score->add_option("candidate", candidate, "candidate caption")->required();
  score->add_option("references", references, "reference caption(s)")->required();

  std::string dataset;
  auto* eval = app.add_subcommand("eval-corpus", "score a caption corpus (csv or jsonl)");
  eval->add_option("dataset", dataset, "caption items file")->required()->check(CLI::ExistingFile);

  std::string pairs_path;
  auto* bench = app.add_subcommand("benchmark", "agreement with pairwise human judgments");
  bench->add_option("pairs", pairs_path, "judgment pairs file")->required()->check(CLI::ExistingFile);

  std::vector<double> sweep_values;
  std::string csv_path;
  auto* sweep = app.add_subcommand("sweep", "benchmark accuracy across tag_t values");
  sweep->add_option("pairs", pairs_path, "judgment pairs file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--tag-t-values", sweep_values, "comma-separated tag_t values")
      ->required()
      ->delimiter(',')
      ->check(unit);
  sweep->add_option("--csv", csv_path, "write (tag_t, category, accuracy) rows here");

  std::string cache_action = "info";
  auto* cache = app.add_subcommand("cache", "inspect or clear the embedding disk cache");
  cache->add_option("action", cache_action, "info or clear")->check(CLI::IsMember({"info", "clear"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*score) return run_score(o, candidate, references);
    if (*eval) return run_eval_corpus(o, dataset);
    if (*bench) return run_benchmark(o, pairs_path);
    if (*sweep) return run_sweep(o, pairs_path, sweep_values, csv_path);
    if (*cache) return run_cache(o, cache_action);
  } catch (const sbf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
