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

#include "gnm/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace gnm {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

Eigen::VectorXcd parse_amplitudes(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("amplitudes must be an array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& a = j[i];
    v[static_cast<Eigen::Index>(i)] = a.is_array() ? std::complex<double>(a.at(0).get<double>(), a.at(1).get<double>())
                                                   : std::complex<double>(a.get<double>(), 0.0);
  }
  return v;
}

std::size_t parse_label(const nlohmann::json& j, const FiniteGroup& group, std::size_t junk_dims) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  const auto s = j.get<std::string>();
  if (s.rfind("junk:", 0) == 0) {
    const std::size_t k = std::stoul(s.substr(5));
    if (k >= junk_dims) throw std::invalid_argument("junk label " + s + " exceeds junk_dims");
    return group.order() + k;
  }
  return group.element(s).index;
}

}  // namespace

SamplerSpec parse_sampler(const nlohmann::json& j) {
  reject_unknown_keys(j, {"kind", "epsilon", "length", "seed"}, "sampler");
  SamplerSpec s;
  if (j.contains("kind")) s.kind = sampler_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("epsilon")) s.epsilon = j.at("epsilon").get<double>();
  if (j.contains("length")) s.subproduct_length = j.at("length").get<std::uint32_t>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

NoiseSpec parse_noise(const nlohmann::json& j) {
  reject_unknown_keys(j, {"visibility", "state_fidelity_mix"}, "noise");
  NoiseSpec n;
  if (j.contains("visibility")) n.visibility = j.at("visibility").get<double>();
  if (j.contains("state_fidelity_mix")) n.state_fidelity_mix = j.at("state_fidelity_mix").get<double>();
  n.validate();
  return n;
}

ProverStrategy parse_strategy(const nlohmann::json& j, const FiniteGroup& group, std::size_t junk_dims) {
  if (j.is_string()) return parse_strategy(nlohmann::json{{"kind", j}}, group, junk_dims);
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("strategy needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "honest") {
    reject_unknown_keys(j, {"kind", "alpha"}, "strategy");
    return HonestCoset{j.contains("alpha") ? group.element(j.at("alpha").get<std::string>()) : group.identity()};
  }
  if (kind == "basis") {
    reject_unknown_keys(j, {"kind", "label"}, "strategy");
    return BasisBogus{parse_label(j.at("label"), group, junk_dims)};
  }
  if (kind == "pure") {
    reject_unknown_keys(j, {"kind", "amplitudes"}, "strategy");
    return PureBogus{parse_amplitudes(j.at("amplitudes"))};
  }
  if (kind == "product") {
    reject_unknown_keys(j, {"kind", "registers"}, "strategy");
    ProductJoint p;
    for (const auto& r : j.at("registers")) p.registers.push_back(parse_amplitudes(r));
    return p;
  }
  if (kind == "joint") {
    reject_unknown_keys(j, {"kind", "state"}, "strategy");
    const auto& st = j.at("state");
    if (st.contains("matrix")) return ArbitraryJoint{density_state_from_json(st)};
    return ArbitraryJoint{pure_state_from_json(st)};
  }
  if (kind == "optimal") {
    reject_unknown_keys(j, {"kind"}, "strategy");
    return OptimalAdversary{};
  }
  throw std::invalid_argument("unknown strategy kind '" + kind + "'");
}

RunSpec parse_run_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  reject_unknown_keys(doc,
                      {"description", "group", "subgroup", "g", "strategy", "m", "sampler", "noise", "junk_dims",
                       "trials", "seed", "test_elements", "m_range", "threads"},
                      "run config");
  RunSpec spec;
  spec.group_ref = doc.at("group").get<std::string>();
  spec.group = resolve_group(spec.group_ref, base_dir);
  const FiniteGroup& G = *spec.group.group;

  const auto& sub = doc.contains("subgroup") ? doc.at("subgroup") : nlohmann::json("S");
  if (sub.is_string()) {
    spec.subgroup_name = sub.get<std::string>();
    spec.subgroup = resolve_named_subgroup(spec.group, spec.subgroup_name);
    spec.subgroup_generators = spec.group.subgroups.at(spec.subgroup_name);
  } else {
    spec.subgroup_generators = sub.get<std::vector<std::string>>();
    spec.subgroup = resolve_subgroup(spec.group, spec.subgroup_generators);
  }

  ProtocolConfig& c = spec.protocol;
  if (doc.contains("m")) c.m = doc.at("m").get<std::size_t>();
  if (doc.contains("sampler")) c.sampler = parse_sampler(doc.at("sampler"));
  if (doc.contains("noise")) c.noise = parse_noise(doc.at("noise"));
  if (doc.contains("junk_dims")) c.junk_dims = doc.at("junk_dims").get<std::size_t>();
  if (doc.contains("trials")) c.trials = doc.at("trials").get<std::uint64_t>();
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("test_elements")) c.test_elements = test_elements_from_string(doc.at("test_elements").get<std::string>());
  if (doc.contains("threads")) c.threads = doc.at("threads").get<unsigned>();
  c.validate();

  spec.g = doc.contains("g") ? G.element(doc.at("g").get<std::string>()) : G.identity();
  spec.strategy = doc.contains("strategy") ? parse_strategy(doc.at("strategy"), G, c.junk_dims)
                                           : ProverStrategy{HonestCoset{G.identity()}};
  spec.m_lo = spec.m_hi = c.m;
  if (doc.contains("m_range")) {
    const auto range = doc.at("m_range").get<std::vector<std::size_t>>();
    if (range.size() != 2 || range[0] < 2 || range[0] > range[1]) {
      throw std::invalid_argument("m_range must be [lo, hi] with 2 <= lo <= hi");
    }
    spec.m_lo = range[0];
    spec.m_hi = range[1];
  }
  return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in);
  RunSpec spec = parse_run_spec(doc, path.parent_path());
  spec.config_path = path;
  return spec;
}

nlohmann::json to_json(const SamplerSpec& s) {
  return {{"kind", to_string(s.kind)}, {"epsilon", s.epsilon}, {"length", s.subproduct_length}, {"seed", s.seed}};
}

nlohmann::json to_json(const NoiseSpec& n) {
  return {{"visibility", n.visibility}, {"state_fidelity_mix", n.state_fidelity_mix}};
}

nlohmann::json to_json(const ProtocolConfig& c) {
  return {{"m", c.m},
          {"sampler", to_json(c.sampler)},
          {"noise", c.noise ? to_json(*c.noise) : nlohmann::json(nullptr)},
          {"junk_dims", c.junk_dims},
          {"seed", c.seed},
          {"trials", c.trials},
          {"test_elements", to_string(c.test_elements)},
          {"dim_cap", c.cap()}};
}

nlohmann::json to_json(const RunSpec& spec) {
  const FiniteGroup& G = spec.grp();
  nlohmann::json elems = nlohmann::json::array();
  for (Element s : spec.sub().elements()) elems.push_back(G.name(s));
  return {{"group", spec.group_ref},
          {"subgroup_generators", spec.subgroup_generators},
          {"subgroup_elements", elems},
          {"g", G.name(spec.g)},
          {"strategy", describe(spec.strategy, G)},
          {"protocol", to_json(spec.protocol)},
          {"m_range", {spec.m_lo, spec.m_hi}}};
}

}  // namespace gnm
