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
#include <numbers>

#include "gnm/analysis.hpp"
#include "gnm/errors.hpp"
#include "gnm/rng.hpp"

using namespace gnm;

TEST(Bounds, Examples) {
  EXPECT_DOUBLE_EQ(soundness_bound(2), 4.0);
  EXPECT_DOUBLE_EQ(soundness_bound(16), 0.5);
  EXPECT_DOUBLE_EQ(klein_soundness_bound(2), 16.0 / 7.0);
  EXPECT_DOUBLE_EQ(klein_soundness_bound(14), 16.0 / 91.0);
  EXPECT_DOUBLE_EQ(klein_soundness_bound(19), 16.0 / 126.0);
  EXPECT_THROW(klein_soundness_bound(1), std::invalid_argument);
}

TEST(Bounds, KFactor) {
  EXPECT_DOUBLE_EQ(k_factor(2), 0.5);
  EXPECT_NEAR(k_factor(3), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(k_factor(1), IdentityOrder);
  for (std::uint64_t q = 2; q <= 200; ++q) {
    const double direct = 1.0 / (1.0 - std::cos(std::ceil(q / 2.0) * 2.0 * std::numbers::pi / static_cast<double>(q)));
    EXPECT_NEAR(k_factor(q), direct, 1e-12);
    EXPECT_GE(k_factor(q), 0.5);
  }
}

TEST(Bounds, PassSoundness) {
  EXPECT_NEAR(pass_soundness_bound(0.9, 2, 2, 2), 0.1 / (0.5 * 7.0 / 8.0), 1e-12);
  EXPECT_NEAR(pass_soundness_bound(0.9, 2, 2, 2), 0.2286, 1e-4);
  EXPECT_THROW(pass_soundness_bound(0.9, 2, 16, 2), DegenerateDenominator);
  EXPECT_DOUBLE_EQ(relaxed_pass_soundness_bound(0.75), 1.0);
  for (std::uint64_t q = 2; q <= 12; ++q) {
    for (unsigned n = 1; n <= 6; ++n) {
      for (std::size_t s = 1; s <= (std::size_t{1} << n); ++s) {
        for (double p : {0.0, 0.3, 0.9, 1.0}) {
          EXPECT_GE(relaxed_pass_soundness_bound(p) + 1e-15, pass_soundness_bound(p, q, s, n));
        }
      }
    }
  }
}

TEST(Bounds, ChainMatchesKlein) {
  for (std::size_t m = 2; m <= 40; ++m) {
    EXPECT_NEAR(soundness_chain_bound(2, 2, 2, m), klein_soundness_bound(m), 1e-15);
  }
}

TEST(Bounds, ReservedPass) {
  EXPECT_NEAR(reserved_pass_bound(0.9, 10), 1.0 - (1.0 / 0.9 - 1.0) / 9.0, 1e-15);
  EXPECT_NEAR(reserved_pass_bound(0.9, 10), 0.98765, 1e-5);
  EXPECT_DOUBLE_EQ(reserved_pass_bound(1.0, 7), 1.0);
  EXPECT_GT(reserved_pass_bound(0.5, 1000000), reserved_pass_bound(0.5, 1000));
  EXPECT_NEAR(reserved_pass_bound(0.5, 1000000), 1.0, 1e-5);
  EXPECT_THROW(reserved_pass_bound(0.0, 3), ZeroPassProbability);
}

TEST(Bounds, Report) {
  const BoundReport r = bound_report(14, 0.496, 0.949);
  EXPECT_NEAR(r.p_c, 0.496 * std::pow(0.949, 13), 1e-15);
  EXPECT_NEAR(r.gap_value, r.p_c - 16.0 / 91.0, 1e-15);
  EXPECT_EQ(r.completeness, 0.5);
}

TEST(Omax, Examples) {
  for (double b : {-0.5, 0.0, 0.3, 1.0}) {
    EXPECT_NEAR(omax_closed_form({2, b, 1.0}), b + 1.0, 1e-12);
  }
  EXPECT_NEAR(omax_closed_form({3, 1.0, 1.0}), 3.0, 1e-12);
  EXPECT_NEAR(omax_closed_form({3, 0.0, 1.0}), 1.0, 1e-12);
  EXPECT_NEAR(omax_bruteforce({4, 1.0, 1.0}).value, 4.0, 1e-6);
  EXPECT_NEAR(omax_bruteforce({3, 0.0, 1.0}).value, 1.0, 1e-6);
  EXPECT_THROW(omax_closed_form({1, 0.0, 1.0}), InfeasibleInstance);
  EXPECT_THROW(omax_closed_form({3, 0.0, 0.0}), InfeasibleInstance);
  EXPECT_THROW(omax_closed_form({3, 1.5, 1.0}), InfeasibleInstance);
}

TEST(Omax, MinCorrelation) {
  EXPECT_NEAR(omax_min_correlation(2), -1.0, 1e-15);
  EXPECT_NEAR(omax_min_correlation(4), -1.0, 1e-15);
  EXPECT_NEAR(omax_min_correlation(3), -0.5, 1e-15);
}

TEST(Omax, BruteForceResidualsAndArgmax) {
  const OmaxSearchResult r = omax_bruteforce({5, 0.2, 0.7});
  EXPECT_LE(r.residual_l, 1e-10);
  EXPECT_LE(r.residual_b, 1e-10);
  EXPECT_NEAR(r.argmax.squaredNorm(), 0.7, 1e-10);
  EXPECT_NEAR(r.argmax.sum() * r.argmax.sum(), r.value, 1e-12);
  EXPECT_GE(r.converged_starts, 1u);
}

TEST(Omax, BruteForceAgreesOnRandomInstances) {
  Philox4x32 rng(3);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int i = 0; i < 8; ++i) {
      const double l = 0.05 + 0.95 * rng.uniform01();
      const double c = omax_min_correlation(n);
      const double b = l * (c + (1.0 - c) * rng.uniform01());
      const OmaxInstance inst{n, b, l};
      EXPECT_NEAR(omax_bruteforce(inst).value, omax_closed_form(inst), 1e-5) << n << " " << b << " " << l;
    }
  }
}

TEST(Gap, KleinOptima) {
  const GapResult a = gap_optimize(0.496, 0.949, klein_soundness_bound);
  EXPECT_EQ(a.m_star, 14u);
  EXPECT_NEAR(a.gap_star, 0.075, 0.001);
  const GapResult b = gap_optimize(0.481, 0.980, klein_soundness_bound);
  EXPECT_EQ(b.m_star, 19u);
  EXPECT_NEAR(b.gap_star, 0.207, 0.001);
}

TEST(Gap, MatchesScan) {
  for (double p : {0.3, 0.481, 0.496, 0.9}) {
    for (double q : {0.9, 0.949, 0.98, 0.999}) {
      std::size_t best_m = 0;
      double best = -1e300;
      for (std::size_t m = 2; m <= 200; ++m) {
        const double v = p * std::pow(q, static_cast<double>(m - 1)) - 16.0 / (7.0 * static_cast<double>(m - 1));
        if (v > best) {
          best = v;
          best_m = m;
        }
      }
      const GapResult r = gap_optimize(p, q, klein_soundness_bound);
      EXPECT_EQ(r.m_star, best_m);
      EXPECT_NEAR(r.gap_star, best, 1e-15);
      EXPECT_NEAR(r.gap_star, r.p_c - r.p_s, 1e-15);
    }
  }
}

TEST(Gap, DegenerateBound) {
  const GapResult r = gap_optimize(0.4, 1.0, [](std::size_t) { return 0.0; }, 3, 50);
  EXPECT_EQ(r.m_star, 3u);
  EXPECT_DOUBLE_EQ(r.gap_star, 0.4);
  EXPECT_THROW(gap_optimize(0.4, 0.9, klein_soundness_bound, 10, 5), EmptyRange);
}
