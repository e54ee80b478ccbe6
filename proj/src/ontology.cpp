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

#include "sbf/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "sbf/errors.hpp"

namespace sbf {

using nlohmann::json;

namespace {

std::vector<std::string> string_array(const json& entry, const char* key,
                                      const std::string& id) {
  std::vector<std::string> out;
  auto it = entry.find(key);
  if (it == entry.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw ValidationError("ontology entry '" + id + "': field '" + key +
                          "' must be an array of strings");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ValidationError("ontology entry '" + id + "': field '" + key +
                            "' must be an array of strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string required_string(const json& entry, const char* key,
                            std::size_t index) {
  auto it = entry.find(key);
  if (it == entry.end() || !it->is_string()) {
    throw ValidationError("ontology entry #" + std::to_string(index) +
                          " lacks string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

bool AudioClass::has_restriction(const std::string& r) const {
  return std::find(restrictions.begin(), restrictions.end(), r) !=
         restrictions.end();
}

std::vector<AudioClass> load_ontology(std::istream& source) {
  std::string bytes{std::istreambuf_iterator<char>(source),
                    std::istreambuf_iterator<char>()};
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("ontology: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) {
    throw ValidationError("ontology: top-level value must be an array");
  }

  std::vector<AudioClass> classes;
  classes.reserve(doc.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    if (!entry.is_object()) {
      throw ValidationError("ontology entry #" + std::to_string(i) +
                            " is not an object");
    }
    AudioClass c;
    c.id = required_string(entry, "id", i);
    c.name = required_string(entry, "name", i);
    if (c.id.empty()) {
      throw ValidationError("ontology entry #" + std::to_string(i) +
                            " has an empty id");
    }
    if (auto d = entry.find("description"); d != entry.end() && d->is_string()) {
      c.description = d->get<std::string>();
    }
    c.child_ids = string_array(entry, "child_ids", c.id);
    c.restrictions = string_array(entry, "restrictions", c.id);
    if (!seen.insert(c.id).second) {
      throw ValidationError("ontology: duplicate id '" + c.id + "'");
    }
    classes.push_back(std::move(c));
  }

  for (const auto& c : classes) {
    for (const auto& child : c.child_ids) {
      if (!seen.count(child)) {
        throw ValidationError("ontology: class '" + c.id +
                              "' references unknown child '" + child + "'");
      }
    }
  }
  return classes;
}

std::vector<AudioClass> load_ontology_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ontology file: " + path);
  return load_ontology(in);
}

std::string serialize_ontology(std::span<const AudioClass> classes) {
  json doc = json::array();
  for (const auto& c : classes) {
    json entry = {{"id", c.id},
                  {"name", c.name},
                  {"child_ids", c.child_ids},
                  {"restrictions", c.restrictions}};
    if (!c.description.empty()) entry["description"] = c.description;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2);
}

std::set<std::string> default_excluded_restrictions() { return {"abstract"}; }

TagUniverse::TagUniverse(std::vector<AudioClass> classes,
                         const std::set<std::string>& exclude) {
  for (auto& c : classes) {
    bool excluded = std::any_of(
        c.restrictions.begin(), c.restrictions.end(),
        [&](const std::string& r) { return exclude.count(r) > 0; });
    if (!excluded) classes_.push_back(std::move(c));
  }
  if (classes_.empty()) {
    throw ValidationError(
        "tag universe is empty after applying restriction filter");
  }
}

TagUniverse tag_universe(std::vector<AudioClass> classes,
                         const std::set<std::string>& exclude) {
  return TagUniverse(std::move(classes), exclude);
}

}  // namespace sbf
