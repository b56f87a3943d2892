// Copyright 2026 The gnmverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gnm/group.hpp"

namespace gnm {

/// A group plus named subgroups (each a list of generator element names).
struct GroupDefinition {
  std::shared_ptr<const FiniteGroup> group;
  std::map<std::string, std::vector<std::string>> subgroups;
  std::string source;
};

/// Accepts {"table": [[...]], "names": [...]} or
/// {"permutation_generators": [[[cycle], ...], ...], "generator_names": [...]},
/// each optionally carrying "subgroups": {"S": ["A"], ...}.
GroupDefinition parse_group_json(const nlohmann::json& doc,
                                 std::size_t max_order = kDefaultMaxGroupOrder);
GroupDefinition load_group_file(const std::filesystem::path& path,
                                std::size_t max_order = kDefaultMaxGroupOrder);

/// Built-in groups: trivial, klein, c6, s3, d4.
GroupDefinition bundled_group(std::string_view name);
std::vector<std::string> bundled_group_names();

/// A bundled name, or otherwise a path resolved against base_dir.
GroupDefinition resolve_group(std::string_view ref, const std::filesystem::path& base_dir = {});

/// Closure of a named or inline (list of element names) subgroup.
Subgroup resolve_subgroup(const GroupDefinition& def, const std::vector<std::string>& generator_names);
Subgroup resolve_named_subgroup(const GroupDefinition& def, const std::string& subgroup_name);

nlohmann::json group_summary_json(const GroupDefinition& def);

}  // namespace gnm
