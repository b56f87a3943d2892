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

#include "gnm/group_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gnm {

namespace {

std::map<std::string, std::vector<std::string>> parse_subgroups(const nlohmann::json& doc) {
  std::map<std::string, std::vector<std::string>> out;
  if (!doc.contains("subgroups")) return out;
  for (const auto& [key, gens] : doc.at("subgroups").items()) {
    out[key] = gens.get<std::vector<std::string>>();
  }
  return out;
}

}  // namespace

GroupDefinition parse_group_json(const nlohmann::json& doc, std::size_t max_order) {
  if (!doc.is_object()) throw std::invalid_argument("group definition must be a JSON object");
  GroupDefinition def;
  if (doc.contains("table")) {
    auto table = doc.at("table").get<FiniteGroup::Table>();
    std::vector<std::string> names;
    if (doc.contains("names")) names = doc.at("names").get<std::vector<std::string>>();
    def.group = std::make_shared<const FiniteGroup>(
        FiniteGroup::from_table(table, std::move(names), max_order));
  } else if (doc.contains("permutation_generators")) {
    auto gens = doc.at("permutation_generators").get<std::vector<CycleNotation>>();
    std::vector<std::string> gen_names;
    if (doc.contains("generator_names")) {
      gen_names = doc.at("generator_names").get<std::vector<std::string>>();
    }
    def.group = std::make_shared<const FiniteGroup>(
        build_from_permutations(gens, std::move(gen_names), max_order));
  } else {
    throw std::invalid_argument(
        "group definition needs either \"table\" or \"permutation_generators\"");
  }
  def.subgroups = parse_subgroups(doc);
  for (const auto& [name, gens] : def.subgroups) {
    for (const auto& g : gens) def.group->element(g);
  }
  return def;
}

GroupDefinition load_group_file(const std::filesystem::path& path, std::size_t max_order) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open group file " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in);
  GroupDefinition def = parse_group_json(doc, max_order);
  def.source = path.string();
  return def;
}

GroupDefinition bundled_group(std::string_view name) {
  GroupDefinition def;
  def.source = "bundled:" + std::string(name);
  if (name == "trivial") {
    def.group = std::make_shared<const FiniteGroup>(FiniteGroup::from_table({{0}}, {"e"}));
    def.subgroups = {{"S", {}}};
  } else if (name == "klein") {
    def.group = std::make_shared<const FiniteGroup>(build_klein());
    def.subgroups = {{"S", {"A"}}, {"S'", {"AB"}}, {"SB", {"B"}}};
  } else if (name == "c6") {
    def.group = std::make_shared<const FiniteGroup>(build_cyclic(6));
    def.subgroups = {{"S", {"a^3"}}, {"T", {"a^2"}}};
  } else if (name == "s3") {
    def.group = std::make_shared<const FiniteGroup>(
        build_from_permutations({{{0, 1, 2}}, {{0, 1}}}, {"r", "s"}));
    def.subgroups = {{"R", {"r"}}, {"F", {"s"}}};
  } else if (name == "d4") {
    def.group = std::make_shared<const FiniteGroup>(
        build_from_permutations({{{0, 1, 2, 3}}, {{1, 3}}}, {"r", "s"}));
    def.subgroups = {{"R", {"r"}}, {"F", {"s"}}, {"V", {"r*r", "s"}}};
  } else {
    throw std::invalid_argument("unknown bundled group '" + std::string(name) + "'");
  }
  return def;
}

std::vector<std::string> bundled_group_names() { return {"trivial", "klein", "c6", "s3", "d4"}; }

GroupDefinition resolve_group(std::string_view ref, const std::filesystem::path& base_dir) {
  for (const auto& n : bundled_group_names()) {
    if (ref == n) return bundled_group(ref);
  }
  std::filesystem::path p(ref);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return load_group_file(p);
}

Subgroup resolve_subgroup(const GroupDefinition& def, const std::vector<std::string>& generator_names) {
  std::vector<Element> gens;
  gens.reserve(generator_names.size());
  for (const auto& n : generator_names) gens.push_back(def.group->element(n));
  return subgroup_closure(def.group, gens);
}

Subgroup resolve_named_subgroup(const GroupDefinition& def, const std::string& subgroup_name) {
  auto it = def.subgroups.find(subgroup_name);
  if (it == def.subgroups.end()) {
    throw std::invalid_argument("group has no subgroup named '" + subgroup_name + "'");
  }
  return resolve_subgroup(def, it->second);
}

nlohmann::json group_summary_json(const GroupDefinition& def) {
  const FiniteGroup& G = *def.group;
  nlohmann::json out;
  out["order"] = G.order();
  out["label_bits"] = G.label_bits();
  out["identity"] = G.name(G.identity());
  std::ostringstream fp;
  fp << std::hex << G.fingerprint();
  out["fingerprint"] = fp.str();
  nlohmann::json elems = nlohmann::json::array();
  for (Element e : G.elements()) {
    elems.push_back({{"index", e.index}, {"name", G.name(e)}, {"order", G.element_order(e)},
                     {"inverse", G.name(G.inverse(e))}});
  }
  out["elements"] = elems;
  nlohmann::json subs = nlohmann::json::object();
  for (const auto& [name, gens] : def.subgroups) {
    Subgroup s = resolve_subgroup(def, gens);
    nlohmann::json js;
    js["generators"] = gens;
    std::vector<std::string> members;
    for (Element e : s.elements()) members.push_back(G.name(e));
    js["elements"] = members;
    nlohmann::json cosets = nlohmann::json::array();
    for (const auto& block : s.cosets()) {
      std::vector<std::string> b;
      for (Element e : block) b.push_back(G.name(e));
      cosets.push_back(b);
    }
    js["cosets"] = cosets;
    subs[name] = js;
  }
  out["subgroups"] = subs;
  return out;
}

}  // namespace gnm
