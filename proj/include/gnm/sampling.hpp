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

#include <cstdint>
#include <string>
#include <vector>

#include "gnm/group.hpp"
#include "gnm/rng.hpp"

namespace gnm {

enum class SamplerKind { ExactUniform, BabaiSubproduct };

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& s);

/// Classical subgroup-element sampler configuration.
///
/// BabaiSubproduct draws a lazy random subproduct over the subgroup
/// generators: each of `subproduct_length` steps either skips (probability
/// 1/2) or right-multiplies by a uniformly chosen generator. `epsilon` is the
/// deviation target used when calibrating the length.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::ExactUniform;
  double epsilon = 1.0 / 16.0;
  std::uint32_t subproduct_length = 16;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr std::size_t kMaxExactSubgroupSize = 256;
inline constexpr std::uint32_t kMaxExactSubproductLength = 24;

Element exact_uniform_sample(const Subgroup& subgroup, Philox4x32& rng);
Element babai_sample(const Subgroup& subgroup, const SamplerSpec& spec, Philox4x32& rng);
/// Dispatches on spec.kind.
Element draw_sample(const Subgroup& subgroup, const SamplerSpec& spec, Philox4x32& rng);

/// Exact output distribution, indexed like subgroup.elements(). Throws
/// TooLargeForExact when |S| > 256 or a subproduct length > 24 is requested.
std::vector<double> sampler_distribution(const Subgroup& subgroup, const SamplerSpec& spec);

/// Exact subproduct distribution by iterated convolution, without the size
/// caps of sampler_distribution (used for calibration).
std::vector<double> subproduct_distribution(const Subgroup& subgroup, std::uint32_t length);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);
double max_deviation_from_uniform(const std::vector<double>& p);

struct EmpiricalDistribution {
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  /// Binomial standard error of each frequency.
  std::vector<double> std_errors;
  std::uint64_t draws = 0;
  double tv_to_uniform = 0.0;
  /// Largest 95% Wilson half-width over the elements.
  double max_wilson_halfwidth = 0.0;
};

/// Draws `draws` samples from Philox4x32(spec.seed).
EmpiricalDistribution sample_empirically(const Subgroup& subgroup, const SamplerSpec& spec,
                                         std::uint64_t draws);

enum class UniformityMetric { MaxDeviation, TotalVariation };

struct SubproductCalibration {
  bool reached = false;
  std::uint32_t length = 0;
  double max_deviation = 0.0;
  double tv = 0.0;
  double target = 0.0;
};

/// Smallest subproduct length <= max_length whose exact distance from
/// uniform (per `metric`) is below `target` (default: the group's 2^{-2n}
/// window).
SubproductCalibration calibrate_subproduct_length(
    const Subgroup& subgroup, std::uint32_t max_length = 64, double target = 0.0,
    UniformityMetric metric = UniformityMetric::MaxDeviation);

}  // namespace gnm
