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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "gnm/errors.hpp"
#include "gnm/group_io.hpp"
#include "gnm/rng.hpp"
#include "gnm/sampling.hpp"

using namespace gnm;

namespace {

std::shared_ptr<const FiniteGroup> klein() { return std::make_shared<const FiniteGroup>(build_klein()); }

SamplerSpec babai(std::uint32_t length, std::uint64_t seed = 0) {
  SamplerSpec s;
  s.kind = SamplerKind::BabaiSubproduct;
  s.subproduct_length = length;
  s.seed = seed;
  return s;
}

// Lazy-walk distribution by enumerating every path: each step either skips
// (weight 1/2) or multiplies by one of the k non-identity generators
// (weight 1/(2k) each).
std::vector<double> enumerate_walk(const Subgroup& s, std::uint32_t length) {
  const FiniteGroup& g = s.parent();
  std::vector<Element> pool;
  for (Element x : s.generators()) {
    if (x != g.identity()) pool.push_back(x);
  }
  std::map<Element, double> dist{{g.identity(), 1.0}};
  if (!pool.empty()) {
    for (std::uint32_t step = 0; step < length; ++step) {
      std::map<Element, double> next;
      for (const auto& [x, p] : dist) {
        next[x] += 0.5 * p;
        for (Element y : pool) next[g.mult(x, y)] += 0.5 * p / static_cast<double>(pool.size());
      }
      dist = std::move(next);
    }
  }
  std::vector<double> out;
  for (Element x : s.elements()) out.push_back(dist.count(x) ? dist[x] : 0.0);
  return out;
}

std::vector<Subgroup> bundled_subgroups() {
  std::vector<Subgroup> out;
  for (const auto& name : bundled_group_names()) {
    const GroupDefinition def = bundled_group(name);
    for (const auto& [sub, gens] : def.subgroups) out.push_back(resolve_subgroup(def, gens));
  }
  return out;
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate_block({0, 0, 0, 0}, {0, 0}),
            (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate_block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate_block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  Philox4x32 a(5, 1), b(5, 1), c(5, 2);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
  Philox4x32 r(9);
  EXPECT_EQ(r.split(3)(), Philox4x32(9).split(3)());
  EXPECT_NE(r.split(3)(), r.split(4)());
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.uniform_index(7), 7u);
  }
}

TEST(ExactUniform, Singleton) {
  const auto g = klein();
  const Subgroup s = subgroup_closure(g, {});
  Philox4x32 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(exact_uniform_sample(s, rng), g->identity());
}

TEST(ExactUniform, FrequenciesSeed7) {
  const auto g = klein();
  const Subgroup s = subgroup_closure(g, {g->element("A")});
  Philox4x32 rng(7);
  std::map<Element, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Element x = exact_uniform_sample(s, rng);
    ASSERT_TRUE(s.contains(x));
    ++counts[x];
  }
  for (Element x : s.elements()) EXPECT_NEAR(counts[x] / double(draws), 0.5, 0.01);
}

TEST(Babai, SingletonAndRange) {
  const auto g = klein();
  const Subgroup t = subgroup_closure(g, {});
  Philox4x32 rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(babai_sample(t, babai(5), rng), g->identity());
  for (const Subgroup& s : bundled_subgroups()) {
    Philox4x32 r(11);
    for (int i = 0; i < 100000 / 10; ++i) ASSERT_TRUE(s.contains(babai_sample(s, babai(7), r)));
  }
}

TEST(Babai, KleinLength16TotalVariation) {
  const auto g = klein();
  const Subgroup s = subgroup_closure(g, {g->element("A")});
  const EmpiricalDistribution e = sample_empirically(s, babai(16, 21), 100000);
  EXPECT_LT(e.tv_to_uniform, 0.01);
  EXPECT_LT(total_variation(sampler_distribution(s, babai(16)), {0.5, 0.5}), 0.01);
}

TEST(Babai, Deterministic) {
  const Subgroup s = resolve_named_subgroup(bundled_group("d4"), "V");
  Philox4x32 a(99), b(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(babai_sample(s, babai(9), a), babai_sample(s, babai(9), b));
}

TEST(SamplerDistribution, Examples) {
  const auto g = klein();
  const Subgroup s = subgroup_closure(g, {g->element("A")});
  EXPECT_EQ(sampler_distribution(s, SamplerSpec{}), (std::vector<double>{0.5, 0.5}));
  const auto one = sampler_distribution(s, babai(1));
  EXPECT_NEAR(one[0], 0.5, 1e-15);
  EXPECT_NEAR(one[1], 0.5, 1e-15);
}

TEST(SamplerDistribution, MatchesPathEnumeration) {
  for (const Subgroup& s : bundled_subgroups()) {
    for (std::uint32_t len : {1u, 2u, 3u, 5u, 8u}) {
      const auto exact = sampler_distribution(s, babai(len));
      const auto oracle = enumerate_walk(s, len);
      ASSERT_EQ(exact.size(), oracle.size());
      EXPECT_NEAR(std::accumulate(exact.begin(), exact.end(), 0.0), 1.0, 1e-12);
      for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(exact[i], oracle[i], 1e-12);
    }
  }
}

TEST(SamplerDistribution, SizeCaps) {
  const auto g = klein();
  const Subgroup s = subgroup_closure(g, {g->element("A")});
  EXPECT_THROW(sampler_distribution(s, babai(kMaxExactSubproductLength + 1)), TooLargeForExact);
  EXPECT_NO_THROW(subproduct_distribution(s, 40));
}

TEST(SamplerDistribution, EmpiricalConsistencyWithinFourSigma) {
  const Subgroup s = resolve_named_subgroup(bundled_group("d4"), "V");
  const SamplerSpec spec = babai(3, 1234);
  const auto exact = sampler_distribution(s, spec);
  const EmpiricalDistribution e = sample_empirically(s, spec, 1000000);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double se = std::sqrt(exact[i] * (1.0 - exact[i]) / 1e6);
    EXPECT_LE(std::abs(e.frequencies[i] - exact[i]), 4.0 * se + 1e-12) << i;
  }
}

TEST(Calibration, ReachesWindowForBundledSubgroups) {
  for (const Subgroup& s : bundled_subgroups()) {
    for (UniformityMetric metric : {UniformityMetric::MaxDeviation, UniformityMetric::TotalVariation}) {
      const SubproductCalibration c = calibrate_subproduct_length(s, 64, 0.0, metric);
      EXPECT_TRUE(c.reached);
      EXPECT_LE(c.length, 64u);
      EXPECT_DOUBLE_EQ(c.target, s.parent().uniformity_window());
      if (metric == UniformityMetric::MaxDeviation) {
        EXPECT_LT(c.max_deviation, c.target);
      } else {
        EXPECT_LT(c.tv, c.target);
      }
    }
  }
}

TEST(SamplerSpec, Validation) {
  SamplerSpec s = babai(0);
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = babai(4);
  s.epsilon = 1.5;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_EQ(sampler_kind_from_string("babai_subproduct"), SamplerKind::BabaiSubproduct);
  EXPECT_THROW(sampler_kind_from_string("nope"), std::invalid_argument);
}
