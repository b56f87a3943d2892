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
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace gnm {

/// 8/m.
double soundness_bound(std::size_t m);
/// 16/(7(m-1)), the Klein-group specialization.
double klein_soundness_bound(std::size_t m);
/// K = 1/(1 - cos(ceil(q/2) * 2 pi / q)). Throws IdentityOrder for q = 1.
double k_factor(std::uint64_t order);
/// (1 - p_pass) / (K (1 - |S| / 2^{2n})). Throws DegenerateDenominator when
/// |S| >= 2^{2n}.
double pass_soundness_bound(double test_pass_prob, std::uint64_t order, std::size_t subgroup_size, unsigned n);
/// 4 (1 - p_pass).
double relaxed_pass_soundness_bound(double test_pass_prob);
/// 1 / (K (1 - |S| / 2^{2n}) (m - 1)): the reserved-register bound chained
/// with the pass-soundness bound. Equals 16/(7(m-1)) for the Klein group.
double soundness_chain_bound(std::uint64_t order, std::size_t subgroup_size, unsigned n, std::size_t m);
/// 1 - (1/p - 1)/(m - 1). Throws ZeroPassProbability for p = 0.
double reserved_pass_bound(double overall_pass, std::size_t m);

struct BoundReport {
  std::size_t m = 0;
  double soundness_8_over_m = 0.0;
  double klein_bound = 0.0;
  double completeness = 0.5;
  double p_prove = 0.0;
  double q_test = 0.0;
  /// p_prove * q_test^{m-1}.
  double p_c = 0.0;
  /// p_c minus the Klein bound.
  double gap_value = 0.0;
};

BoundReport bound_report(std::size_t m, double p_prove, double q_test);

struct OmaxInstance {
  std::size_t n = 2;
  double b = 0.0;
  double l = 1.0;
};

/// Smallest attainable b/l for the cyclic correlation sum, cos(2 pi floor(n/2) / n).
double omax_min_correlation(std::size_t n);

/// Maximum of (sum R_i)^2 over R in R^n with sum R_i^2 = l and
/// sum R_i R_{i+1 mod n} = b. Throws InfeasibleInstance unless n >= 2,
/// 0 < l <= 1 and |b| <= l.
double omax_closed_form(const OmaxInstance& inst);

struct OmaxSearchResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
  /// Constraint residuals at the argmax.
  double residual_l = 0.0;
  double residual_b = 0.0;
  std::size_t starts = 0;
  std::size_t converged_starts = 0;
};

/// Multi-start projected gradient ascent. Throws ConstraintProjectionFailure
/// when no start can be projected onto the constraint set within tol.
OmaxSearchResult omax_bruteforce(const OmaxInstance& inst, double tol = 1e-10, std::size_t starts = 64,
                                 std::uint64_t seed = 1);

struct GapResult {
  std::size_t m_star = 0;
  double gap_star = 0.0;
  double p_c = 0.0;
  double p_s = 0.0;
};

/// Maximizes p_prove * q_test^{m-1} - bound(m) over m in [m_lo, m_hi];
/// ties go to the smaller m. Throws EmptyRange when m_lo > m_hi.
GapResult gap_optimize(double p_prove, double q_test, const std::function<double(std::size_t)>& bound,
                       std::size_t m_lo = 2, std::size_t m_hi = 200);

}  // namespace gnm
