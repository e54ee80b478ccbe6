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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>
#include <string>
#include <vector>

#include "sbf/corpus.hpp"
#include "sbf/errors.hpp"
#include "sbf/phrase.hpp"
#include "sbf/report.hpp"
#include "sbf/sbf.hpp"

namespace py = pybind11;

namespace {

sbf::SbfConfig make_config(const std::string& backend, const std::string& model, const std::string& endpoint,
                           const std::string& fixture, const std::string& model_dir, double tag_t, double sim_t,
                           double rep_t, const std::vector<std::string>& exclude) {
  sbf::SbfConfig c;
  c.tag_t = tag_t;
  c.sim_t = sim_t;
  c.rep_t = rep_t;
  c.backend.kind = sbf::parse_backend_kind(backend);
  c.backend.model_id = model;
  c.backend.endpoint = endpoint;
  c.backend.fixture_path = fixture;
  c.backend.model_dir = model_dir;
  c.exclude_restrictions = std::set<std::string>(exclude.begin(), exclude.end());
  return c;
}

// Python-side handle; JSON strings cross the boundary and the package
// wrapper turns them into dicts.
class PyScorer {
 public:
  PyScorer(const std::string& ontology, const std::string& backend, const std::string& model,
           const std::string& endpoint, const std::string& fixture, const std::string& model_dir, double tag_t,
           double sim_t, double rep_t, const std::vector<std::string>& exclude)
      : scorer_(sbf::Scorer::create(
            sbf::load_ontology_file(ontology),
            make_config(backend, model, endpoint, fixture, model_dir, tag_t, sim_t, rep_t, exclude))) {}

  std::string score(const std::string& candidate, const std::string& reference) const {
    py::gil_scoped_release release;
    return sbf::pair_report_json(scorer_.score_pair(candidate, reference)).dump();
  }

  std::string score_multi(const std::string& candidate, const std::vector<std::string>& references,
                          const std::string& aggregation) const {
    py::gil_scoped_release release;
    auto m = sbf::score_multi_reference(scorer_, candidate, references, sbf::parse_aggregation(aggregation));
    nlohmann::json items = nlohmann::json::array();
    for (const auto& r : m.per_reference) items.push_back(sbf::pair_report_json(r));
    return nlohmann::json{{"precision", m.scores.precision},
                          {"recall", m.scores.recall},
                          {"fscore", m.scores.fscore},
                          {"items", items}}
        .dump();
  }

  std::string benchmark(const std::string& pairs_path, const std::string& aggregation, std::size_t workers) const {
    py::gil_scoped_release release;
    auto pairs = sbf::load_judgment_pairs_file(pairs_path);
    auto r = sbf::pairwise_benchmark(scorer_, pairs, sbf::parse_aggregation(aggregation), workers);
    return nlohmann::json{{"pairs", sbf::benchmark_pairs_json(r)}, {"summary", sbf::benchmark_summary_json(r)}}
        .dump();
  }

  std::string evaluate_corpus(const std::string& path, const std::string& aggregation, std::size_t workers) const {
    py::gil_scoped_release release;
    auto items = sbf::load_caption_items_file(path);
    auto r = sbf::evaluate_corpus(scorer_, items, sbf::parse_aggregation(aggregation), workers);
    return nlohmann::json{{"items", sbf::corpus_items_json(r, items)}, {"summary", sbf::corpus_summary_json(r)}}
        .dump();
  }

  std::size_t universe_size() const { return scorer_.universe().size(); }

 private:
  sbf::Scorer scorer_;
};

}  // namespace

PYBIND11_MODULE(_sbf, m) {
  m.doc() = "Similarity-based F-score for audio captions (C++ core)";

  py::register_exception<sbf::Error>(m, "SbfError", PyExc_RuntimeError);
  py::register_exception<sbf::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("extract_phrases", [](const std::string& caption) { return sbf::phrase_texts(sbf::extract_phrases(caption)); },
        py::arg("caption"));
  m.def(
      "pos_tag",
      [](const std::string& caption) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& t : sbf::pos_tag(sbf::tokenize(caption))) {
          out.emplace_back(t.text, std::string(sbf::pos_name(t.pos)));
        }
        return out;
      },
      py::arg("caption"));
  m.def(
      "cos_sim",
      [](const std::vector<double>& u, const std::vector<double>& v) {
        return sbf::cos_sim(sbf::EmbeddingVector(u), sbf::EmbeddingVector(v));
      },
      py::arg("u"), py::arg("v"));
  m.def(
      "prf",
      [](std::size_t tp, std::size_t fp, std::size_t fn) {
        auto s = sbf::prf(tp, fp, fn);
        return py::make_tuple(s.precision, s.recall, s.fscore);
      },
      py::arg("n_tp"), py::arg("n_fp"), py::arg("n_fn"));
  m.def(
      "load_ontology",
      [](const std::string& path) {
        py::list out;
        for (const auto& c : sbf::load_ontology_file(path)) {
          py::dict d;
          d["id"] = c.id;
          d["name"] = c.name;
          d["description"] = c.description;
          d["child_ids"] = c.child_ids;
          d["restrictions"] = c.restrictions;
          out.append(d);
        }
        return out;
      },
      py::arg("path"));

  py::class_<PyScorer>(m, "_Scorer")
      .def(py::init<const std::string&, const std::string&, const std::string&, const std::string&,
                    const std::string&, const std::string&, double, double, double,
                    const std::vector<std::string>&>(),
           py::arg("ontology"), py::arg("backend") = "local", py::arg("model") = "all-MiniLM-L6-v2",
           py::arg("endpoint") = "", py::arg("fixture") = "", py::arg("model_dir") = "", py::arg("tag_t") = 0.4,
           py::arg("sim_t") = 0.45, py::arg("rep_t") = 0.45,
           py::arg("exclude_restrictions") = std::vector<std::string>{"abstract"})
      .def("score", &PyScorer::score)
      .def("score_multi", &PyScorer::score_multi)
      .def("benchmark", &PyScorer::benchmark)
      .def("evaluate_corpus", &PyScorer::evaluate_corpus)
      .def_property_readonly("universe_size", &PyScorer::universe_size);

  m.attr("__version__") = sbf::kToolVersion;
}
