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

#ifndef SBF_ONTOLOGY_HPP_
#define SBF_ONTOLOGY_HPP_

#include <istream>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sbf {

// One entry of the AudioSet ontology file.
struct AudioClass {
  std::string id;
  std::string name;
  std::string description;
  std::vector<std::string> child_ids;
  std::vector<std::string> restrictions;

  bool has_restriction(const std::string& r) const;
  friend bool operator==(const AudioClass&, const AudioClass&) = default;
};

// Parses an ontology JSON array. Entries keep file order; unknown fields are
// ignored. Throws ParseError on malformed JSON and ValidationError on a
// duplicate id or a child_id without a matching entry.
std::vector<AudioClass> load_ontology(std::istream& source);
std::vector<AudioClass> load_ontology_file(const std::string& path);

// Inverse of load_ontology; emits only the fields the loader understands.
std::string serialize_ontology(std::span<const AudioClass> classes);

std::set<std::string> default_excluded_restrictions();

// The classes admitted to tag matching. Immutable once built.
class TagUniverse {
 public:
  // Keeps classes whose restrictions do not intersect `exclude`, in order.
  // Throws ValidationError if nothing survives.
  TagUniverse(std::vector<AudioClass> classes,
              const std::set<std::string>& exclude);

  const std::vector<AudioClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  const AudioClass& operator[](std::size_t i) const { return classes_[i]; }

 private:
  std::vector<AudioClass> classes_;
};

TagUniverse tag_universe(std::vector<AudioClass> classes,
                         const std::set<std::string>& exclude =
                             default_excluded_restrictions());

}  // namespace sbf

#endif  // SBF_ONTOLOGY_HPP_
