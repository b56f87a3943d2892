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

#include "gnm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

std::vector<Element> generator_pool(const Subgroup& s) {
  std::vector<Element> pool;
  for (Element g : s.generators()) {
    if (g != s.parent().identity()) pool.push_back(g);
  }
  return pool;
}

}  // namespace

std::string to_string(SamplerKind kind) {
  return kind == SamplerKind::ExactUniform ? "exact_uniform" : "babai_subproduct";
}

SamplerKind sampler_kind_from_string(const std::string& s) {
  if (s == "exact_uniform" || s == "ExactUniform") return SamplerKind::ExactUniform;
  if (s == "babai_subproduct" || s == "BabaiSubproduct" || s == "babai") {
    return SamplerKind::BabaiSubproduct;
  }
  throw std::invalid_argument("unknown sampler kind '" + s + "'");
}

void SamplerSpec::validate() const {
  if (kind == SamplerKind::BabaiSubproduct) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("sampler epsilon must lie in (0, 1)");
    if (subproduct_length < 1) throw std::invalid_argument("subproduct length must be >= 1");
  }
}

Element exact_uniform_sample(const Subgroup& subgroup, Philox4x32& rng) {
  const auto& elems = subgroup.elements();
  return elems[rng.uniform_index(elems.size())];
}

Element babai_sample(const Subgroup& subgroup, const SamplerSpec& spec, Philox4x32& rng) {
  if (spec.kind != SamplerKind::BabaiSubproduct) {
    throw std::invalid_argument("babai_sample requires a BabaiSubproduct spec");
  }
  const FiniteGroup& G = subgroup.parent();
  const auto pool = generator_pool(subgroup);
  Element x = G.identity();
  if (pool.empty()) return x;
  for (std::uint32_t step = 0; step < spec.subproduct_length; ++step) {
    if (rng() & 1u) continue;
    x = G.mult(x, pool[rng.uniform_index(pool.size())]);
  }
  return x;
}

Element draw_sample(const Subgroup& subgroup, const SamplerSpec& spec, Philox4x32& rng) {
  return spec.kind == SamplerKind::ExactUniform ? exact_uniform_sample(subgroup, rng)
                                                : babai_sample(subgroup, spec, rng);
}

std::vector<double> subproduct_distribution(const Subgroup& subgroup, std::uint32_t length) {
  const FiniteGroup& G = subgroup.parent();
  const auto pool = generator_pool(subgroup);
  std::vector<double> mu(G.order(), 0.0);
  mu[G.identity().index] = 1.0;
  if (!pool.empty()) {
    std::vector<double> next(G.order());
    const double move = 0.5 / static_cast<double>(pool.size());
    for (std::uint32_t step = 0; step < length; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (Element x : subgroup.elements()) {
        const double w = mu[x.index];
        if (w == 0.0) continue;
        next[x.index] += 0.5 * w;
        for (Element p : pool) next[G.mult(x, p).index] += move * w;
      }
      mu.swap(next);
    }
  }
  std::vector<double> out;
  out.reserve(subgroup.size());
  for (Element x : subgroup.elements()) out.push_back(mu[x.index]);
  return out;
}

std::vector<double> sampler_distribution(const Subgroup& subgroup, const SamplerSpec& spec) {
  if (subgroup.size() > kMaxExactSubgroupSize) {
    throw TooLargeForExact("subgroup of size " + std::to_string(subgroup.size()) +
                           " is too large for an exact sampler distribution");
  }
  if (spec.kind == SamplerKind::ExactUniform) {
    return std::vector<double>(subgroup.size(), 1.0 / static_cast<double>(subgroup.size()));
  }
  if (spec.subproduct_length > kMaxExactSubproductLength) {
    throw TooLargeForExact("subproduct length " + std::to_string(spec.subproduct_length) +
                           " exceeds the exact-convolution cap; request empirical mode");
  }
  return subproduct_distribution(subgroup, spec.subproduct_length);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double max_deviation_from_uniform(const std::vector<double>& p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double m = 0.0;
  for (double v : p) m = std::max(m, std::abs(v - u));
  return m;
}

EmpiricalDistribution sample_empirically(const Subgroup& subgroup, const SamplerSpec& spec,
                                         std::uint64_t draws) {
  if (draws == 0) throw std::invalid_argument("need at least one draw");
  Philox4x32 rng(spec.seed);
  std::vector<std::size_t> slot(subgroup.parent().order(), 0);
  for (std::size_t i = 0; i < subgroup.size(); ++i) slot[subgroup.elements()[i].index] = i;

  EmpiricalDistribution out;
  out.draws = draws;
  out.counts.assign(subgroup.size(), 0);
  for (std::uint64_t t = 0; t < draws; ++t) ++out.counts[slot[draw_sample(subgroup, spec, rng).index]];

  const double n = static_cast<double>(draws);
  const double z = 1.959963984540054;
  std::vector<double> uniform(subgroup.size(), 1.0 / static_cast<double>(subgroup.size()));
  for (std::uint64_t c : out.counts) {
    const double f = static_cast<double>(c) / n;
    out.frequencies.push_back(f);
    out.std_errors.push_back(std::sqrt(f * (1.0 - f) / n));
    const double half = z / (1.0 + z * z / n) * std::sqrt(f * (1.0 - f) / n + z * z / (4.0 * n * n));
    out.max_wilson_halfwidth = std::max(out.max_wilson_halfwidth, half);
  }
  out.tv_to_uniform = total_variation(out.frequencies, uniform);
  return out;
}

SubproductCalibration calibrate_subproduct_length(const Subgroup& subgroup, std::uint32_t max_length,
                                                  double target, UniformityMetric metric) {
  SubproductCalibration cal;
  cal.target = target > 0.0 ? target : subgroup.parent().uniformity_window();
  std::vector<double> uniform(subgroup.size(), 1.0 / static_cast<double>(subgroup.size()));
  for (std::uint32_t len = 1; len <= max_length; ++len) {
    const auto mu = subproduct_distribution(subgroup, len);
    cal.length = len;
    cal.max_deviation = max_deviation_from_uniform(mu);
    cal.tv = total_variation(mu, uniform);
    const double d = metric == UniformityMetric::MaxDeviation ? cal.max_deviation : cal.tv;
    if (d < cal.target) {
      cal.reached = true;
      break;
    }
  }
  return cal;
}

}  // namespace gnm
