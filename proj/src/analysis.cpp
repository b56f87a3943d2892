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

#include "gnm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gnm/errors.hpp"
#include "gnm/rng.hpp"

namespace gnm {

namespace {

void require_m(std::size_t m) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

double pow4(unsigned n) { return std::ldexp(1.0, 2 * static_cast<int>(n)); }

// Constraint values sum R_i^2 - l and sum R_i R_{i+1} - b.
Eigen::Vector2d constraints(const Eigen::VectorXd& r, const OmaxInstance& inst) {
  const auto n = r.size();
  double cyc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) cyc += r[i] * r[(i + 1) % n];
  return {r.squaredNorm() - inst.l, cyc - inst.b};
}

Eigen::MatrixXd constraint_jacobian(const Eigen::VectorXd& r) {
  const auto n = r.size();
  Eigen::MatrixXd j(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    j(0, i) = 2.0 * r[i];
    j(1, i) = r[(i + 1) % n] + r[(i + n - 1) % n];
  }
  return j;
}

// Gauss-Newton minimum-norm steps onto the constraint set.
bool project(Eigen::VectorXd& r, const OmaxInstance& inst, double tol) {
  for (int it = 0; it < 200; ++it) {
    const Eigen::Vector2d h = constraints(r, inst);
    if (h.cwiseAbs().maxCoeff() <= tol) return true;
    const Eigen::MatrixXd j = constraint_jacobian(r);
    const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-h);
    if (!step.allFinite()) return false;
    r += step;
  }
  return constraints(r, inst).cwiseAbs().maxCoeff() <= tol;
}

double objective(const Eigen::VectorXd& r) {
  const double s = r.sum();
  return s * s;
}

}  // namespace

double soundness_bound(std::size_t m) {
  require_m(m);
  return 8.0 / static_cast<double>(m);
}

double klein_soundness_bound(std::size_t m) {
  require_m(m);
  return 16.0 / (7.0 * static_cast<double>(m - 1));
}

double k_factor(std::uint64_t order) {
  if (order == 0) throw std::invalid_argument("element order must be positive");
  if (order == 1) throw IdentityOrder("the identity has no K-factor");
  const double q = static_cast<double>(order);
  const double half = static_cast<double>((order + 1) / 2);
  return 1.0 / (1.0 - std::cos(half * 2.0 * std::numbers::pi / q));
}

double pass_soundness_bound(double test_pass_prob, std::uint64_t order, std::size_t subgroup_size, unsigned n) {
  require_probability(test_pass_prob, "test_pass_prob");
  const double window = pow4(n);
  if (static_cast<double>(subgroup_size) >= window) {
    throw DegenerateDenominator("|S| >= 2^{2n} leaves no room for the bound");
  }
  return (1.0 - test_pass_prob) / (k_factor(order) * (1.0 - static_cast<double>(subgroup_size) / window));
}

double relaxed_pass_soundness_bound(double test_pass_prob) {
  require_probability(test_pass_prob, "test_pass_prob");
  return 4.0 * (1.0 - test_pass_prob);
}

double soundness_chain_bound(std::uint64_t order, std::size_t subgroup_size, unsigned n, std::size_t m) {
  require_m(m);
  const double window = pow4(n);
  if (static_cast<double>(subgroup_size) >= window) {
    throw DegenerateDenominator("|S| >= 2^{2n} leaves no room for the bound");
  }
  return 1.0 / (k_factor(order) * (1.0 - static_cast<double>(subgroup_size) / window) * static_cast<double>(m - 1));
}

double reserved_pass_bound(double overall_pass, std::size_t m) {
  require_m(m);
  require_probability(overall_pass, "overall_pass");
  if (overall_pass == 0.0) throw ZeroPassProbability("conditional bound undefined at zero pass probability");
  return 1.0 - (1.0 / overall_pass - 1.0) / static_cast<double>(m - 1);
}

BoundReport bound_report(std::size_t m, double p_prove, double q_test) {
  require_probability(p_prove, "p_prove");
  require_probability(q_test, "q_test");
  BoundReport r;
  r.m = m;
  r.soundness_8_over_m = soundness_bound(m);
  r.klein_bound = klein_soundness_bound(m);
  r.p_prove = p_prove;
  r.q_test = q_test;
  r.p_c = p_prove * std::pow(q_test, static_cast<double>(m - 1));
  r.gap_value = r.p_c - r.klein_bound;
  return r;
}

double omax_min_correlation(std::size_t n) {
  if (n < 2) throw InfeasibleInstance("n must be at least 2");
  return std::cos(2.0 * std::numbers::pi * static_cast<double>(n / 2) / static_cast<double>(n));
}

double omax_closed_form(const OmaxInstance& inst) {
  if (inst.n < 2) throw InfeasibleInstance("n must be at least 2");
  if (!(inst.l > 0.0 && inst.l <= 1.0)) throw InfeasibleInstance("l must lie in (0, 1]");
  if (!(std::abs(inst.b) <= inst.l)) throw InfeasibleInstance("|b| must not exceed l");
  const double n = static_cast<double>(inst.n);
  const double half = static_cast<double>((inst.n + 1) / 2);
  return n / (1.0 - std::cos(half * 2.0 * std::numbers::pi / n)) * (inst.b - inst.l) + n * inst.l;
}

OmaxSearchResult omax_bruteforce(const OmaxInstance& inst, double tol, std::size_t starts, std::uint64_t seed) {
  if (inst.n < 2 || inst.n > 10) throw std::invalid_argument("brute force supports 2 <= n <= 10");
  if (!(inst.l > 0.0)) throw InfeasibleInstance("l must be positive");
  const auto n = static_cast<Eigen::Index>(inst.n);
  Philox4x32 rng(seed, 0x0aa11);
  OmaxSearchResult best;
  best.starts = starts;
  best.value = -1.0;

  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      // Box-Muller gives an isotropic start direction.
      const double u1 = std::max(rng.uniform01(), 1e-300);
      const double u2 = rng.uniform01();
      r[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    r *= std::sqrt(inst.l) / r.norm();
    if (!project(r, inst, tol)) continue;

    double f = objective(r);
    double eta = 0.1;
    for (int it = 0; it < 4000 && eta > 1e-14; ++it) {
      const Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, 2.0 * r.sum());
      const Eigen::MatrixXd j = constraint_jacobian(r);
      const Eigen::VectorXd tangent = grad - j.transpose() * (j * j.transpose()).completeOrthogonalDecomposition().solve(j * grad);
      if (tangent.norm() < 1e-13) break;
      Eigen::VectorXd trial = r + eta * tangent;
      if (project(trial, inst, tol) && objective(trial) > f) {
        r = std::move(trial);
        f = objective(r);
        eta *= 1.5;
      } else {
        eta *= 0.5;
      }
    }
    ++best.converged_starts;
    if (f > best.value) {
      const Eigen::Vector2d h = constraints(r, inst);
      best.value = f;
      best.argmax = r;
      best.residual_l = std::abs(h[0]);
      best.residual_b = std::abs(h[1]);
    }
  }
  if (best.converged_starts == 0) {
    throw ConstraintProjectionFailure("no start reached the constraint set (n=" + std::to_string(inst.n) +
                                      ", b=" + std::to_string(inst.b) + ", l=" + std::to_string(inst.l) + ")");
  }
  return best;
}

GapResult gap_optimize(double p_prove, double q_test, const std::function<double(std::size_t)>& bound,
                       std::size_t m_lo, std::size_t m_hi) {
  require_probability(p_prove, "p_prove");
  require_probability(q_test, "q_test");
  if (m_lo > m_hi) throw EmptyRange("empty m range");
  GapResult best;
  bool first = true;
  for (std::size_t m = m_lo; m <= m_hi; ++m) {
    const double pc = p_prove * std::pow(q_test, static_cast<double>(m - 1));
    const double ps = bound(m);
    const double gap = pc - ps;
    if (first || gap > best.gap_star) {
      best = {m, gap, pc, ps};
      first = false;
    }
  }
  return best;
}

}  // namespace gnm
