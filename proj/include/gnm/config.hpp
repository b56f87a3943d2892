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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gnm/group_io.hpp"
#include "gnm/protocol.hpp"

namespace gnm {

/// A parsed run-config file: the group, the subgroup, the multiplier g, the
/// prover strategy and the protocol parameters.
struct RunSpec {
  std::filesystem::path config_path;
  std::string group_ref;
  GroupDefinition group;
  /// Generator names of the subgroup, and its name when it was referenced
  /// by name.
  std::vector<std::string> subgroup_generators;
  std::string subgroup_name;
  std::optional<Subgroup> subgroup;
  Element g;
  ProverStrategy strategy = HonestCoset{};
  ProtocolConfig protocol;
  std::size_t m_lo = 2;
  std::size_t m_hi = 2;

  const Subgroup& sub() const { return *subgroup; }
  const FiniteGroup& grp() const { return *group.group; }
};

/// Relative group paths resolve against base_dir. Unknown keys are errors.
RunSpec parse_run_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunSpec load_run_spec(const std::filesystem::path& path);

ProverStrategy parse_strategy(const nlohmann::json& j, const FiniteGroup& group, std::size_t junk_dims);
SamplerSpec parse_sampler(const nlohmann::json& j);
NoiseSpec parse_noise(const nlohmann::json& j);

nlohmann::json to_json(const SamplerSpec& s);
nlohmann::json to_json(const NoiseSpec& n);
nlohmann::json to_json(const ProtocolConfig& c);
/// The resolved run, suitable for a manifest.
nlohmann::json to_json(const RunSpec& spec);

}  // namespace gnm
