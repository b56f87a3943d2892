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

#include "gnm/analysis.hpp"
#include "gnm/errors.hpp"
#include "gnm/group_io.hpp"
#include "gnm/protocol.hpp"
#include "test_support.hpp"

using namespace gnm;
using gnm::testing::perturbed;
using gnm::testing::random_density;
using gnm::testing::random_pure;
using gnm::testing::random_vector;

namespace {

struct Klein {
  std::shared_ptr<const FiniteGroup> g = std::make_shared<const FiniteGroup>(build_klein());
  Element E = g->element("E"), A = g->element("A"), B = g->element("B"), AB = g->element("AB");
  Subgroup S = subgroup_closure(g, {A});
  Subgroup Sp = subgroup_closure(g, {AB});
};

ProtocolConfig config_with(std::size_t m, std::uint64_t seed = 0) {
  ProtocolConfig c;
  c.m = m;
  c.seed = seed;
  return c;
}

// Single-register effects written out directly from the circuit: the
// projector onto group labels P, and M(x) as a permutation matrix.
Eigen::MatrixXd span_projector(std::size_t order, std::size_t dim) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < order; ++i) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return p;
}

Eigen::MatrixXd perm(const FiniteGroup& g, Element x, std::size_t dim) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Element a : g.elements()) {
    m(a.index, a.index) = 0.0;
  }
  for (Element a : g.elements()) {
    m(g.mult(a, x).index, a.index) = 1.0;
  }
  return m;
}

Eigen::MatrixXd noisy_effect(const Eigen::MatrixXd& ideal, const Eigen::MatrixXd& p, double v, double f,
                             std::size_t order) {
  const Eigen::MatrixXd seen = v * ideal + (1.0 - v) / 2.0 * p;
  return f * seen + (1.0 - f) * seen.trace() / static_cast<double>(order) * p;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

Eigen::MatrixXd oracle_accept_operator(const FiniteGroup& g, const Subgroup& s, Element x, std::size_t m,
                                       std::size_t junk, double v, double f) {
  const std::size_t dim = g.order() + junk;
  const Eigen::MatrixXd p = span_projector(g.order(), dim);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::MatrixXd pass = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Element e : s.elements()) {
    const Eigen::MatrixXd ms = perm(g, e, dim);
    pass += p * (2.0 * id + ms + ms.transpose()) / 4.0 * p / static_cast<double>(s.size());
  }
  const Eigen::MatrixXd mg = perm(g, x, dim);
  const Eigen::MatrixXd prove = p * (2.0 * id - mg - mg.transpose()) / 4.0 * p;
  const Eigen::MatrixXd pass_n = noisy_effect(pass, p, v, f, g.order());
  const Eigen::MatrixXd prove_n = noisy_effect(prove, p, v, f, g.order());
  const Eigen::Index total = static_cast<Eigen::Index>(std::pow(dim, m));
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(total, total);
  for (std::size_t r = 0; r < m; ++r) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t j = 0; j < m; ++j) t = kron(t, j == r ? prove_n : pass_n);
    e += t / static_cast<double>(m);
  }
  return e;
}

double rayleigh_ascent(const Eigen::MatrixXd& e, Philox4x32& rng, int starts) {
  double best = 0.0;
  for (int k = 0; k < starts; ++k) {
    Eigen::VectorXd x(e.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gnm::testing::normal(rng);
    x.normalize();
    for (int it = 0; it < 2000; ++it) {
      const Eigen::VectorXd grad = e * x - x.dot(e * x) * x;
      x = (x + 0.5 * grad).normalized();
    }
    best = std::max(best, x.dot(e * x));
  }
  return best;
}

}  // namespace

TEST(TestChannel, BasisStatePassesThreeQuarters) {
  Klein k;
  const QuantumState b = PureState::basis(4, k.B.index).tensor_power(2);
  EXPECT_NEAR(exact_rsi_accept_probability(b, k.S, config_with(2)), 0.75, 1e-12);
  const RsiPassStatistics stats = rsi_pass_statistics(b, k.S, config_with(2));
  EXPECT_NEAR(stats.p_test, 0.75, 1e-12);
  EXPECT_NEAR(stats.p_joint, 0.75 * 0.75, 1e-12);
}

TEST(TestChannel, HonestAlwaysPassesJunkAlwaysFails) {
  Klein k;
  ProtocolConfig c = config_with(3, 5);
  c.junk_dims = 1;
  const QuantumState honest = coset_proof_state(k.S, k.B, 1).tensor_power(3);
  const QuantumState junk = PureState::basis(5, 4).tensor_power(3);
  for (std::uint64_t t = 0; t < 200; ++t) {
    TrialStreams s1 = TrialStreams::for_trial(c, t);
    const TestChannelResult h = test_channel(honest, t % 3, k.S, c, s1);
    EXPECT_EQ(h.output, 0);
    EXPECT_TRUE(h.span_pass);
    TrialStreams s2 = TrialStreams::for_trial(c, t);
    const TestChannelResult j = test_channel(junk, t % 3, k.S, c, s2);
    EXPECT_EQ(j.output, 1);
    EXPECT_FALSE(j.span_pass);
  }
  EXPECT_EQ(exact_rsi_accept_probability(junk, k.S, c), 0.0);
}

TEST(TestChannel, NonIdentityDistribution) {
  Klein k;
  ProtocolConfig c;
  c.test_elements = TestElements::NonIdentity;
  const auto d = test_distribution(k.S, c);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].element, k.A);
  EXPECT_EQ(d[0].weight, 1.0);
  EXPECT_EQ(test_distribution(k.S, ProtocolConfig{}).size(), 2u);
}

TEST(ExactEngine, Completeness) {
  for (const auto& name : bundled_group_names()) {
    const GroupDefinition def = bundled_group(name);
    for (const auto& [sub, gens] : def.subgroups) {
      const Subgroup s = resolve_subgroup(def, gens);
      for (Element x : def.group->elements()) {
        for (std::size_t m : {2u, 3u}) {
          if (regops::Layout{m, def.group->order()}.total() > 512) continue;
          const double p = exact_accept_probability(HonestCoset{x}, x, s, config_with(m));
          if (s.contains(x)) {
            EXPECT_EQ(p, 0.0) << name << " " << sub;
          } else {
            EXPECT_NEAR(p, 0.5, 1e-12) << name << " " << sub;
          }
        }
      }
    }
  }
}

TEST(ExactEngine, BasisBogusGolden) {
  Klein k;
  EXPECT_NEAR(exact_accept_probability(BasisBogus{k.B.index}, k.A, k.S, config_with(2)), 0.375, 1e-12);
}

TEST(ExactEngine, IdentityShortCircuits) {
  Klein k;
  EXPECT_EQ(exact_accept_probability(HonestCoset{k.B}, k.E, k.S, config_with(3)), 0.0);
  const OptimalAdversaryResult r = optimal_adversary(k.E, k.S, config_with(3));
  EXPECT_TRUE(r.short_circuit);
  EXPECT_EQ(r.value, 0.0);
  TrialStreams s = TrialStreams::for_trial(config_with(3), 0);
  const TrialRecord rec = verify_gnm(HonestCoset{k.B}, k.E, k.S, config_with(3), s);
  EXPECT_TRUE(rec.short_circuit);
  EXPECT_FALSE(rec.accepted);
}

TEST(ExactEngine, DimensionMismatch) {
  Klein k;
  EXPECT_THROW(materialize(PureBogus{Eigen::VectorXcd::Ones(3).normalized()}, k.A, k.S, config_with(2)),
               StrategyDimensionMismatch);
  EXPECT_THROW(materialize(ProductJoint{{Eigen::VectorXcd::Ones(4).normalized()}}, k.A, k.S, config_with(2)),
               StrategyDimensionMismatch);
  EXPECT_THROW(materialize(BasisBogus{7}, k.A, k.S, config_with(2)), StrategyDimensionMismatch);
}

TEST(AcceptOperator, MatchesDirectConstruction) {
  Klein k;
  const struct {
    std::size_t m, junk;
    double v, f;
  } cases[] = {{2, 0, 1.0, 1.0}, {3, 0, 1.0, 1.0}, {2, 1, 1.0, 1.0}, {3, 0, 0.963, 0.959}, {2, 1, 0.9, 0.8}};
  for (const auto& tc : cases) {
    ProtocolConfig c = config_with(tc.m);
    c.junk_dims = tc.junk;
    if (tc.v != 1.0 || tc.f != 1.0) c.noise = NoiseSpec{tc.v, tc.f};
    for (const Subgroup* s : {&k.S, &k.Sp}) {
      for (Element x : {k.A, k.B, k.AB}) {
        const AcceptOperator op = build_accept_operator(x, *s, c);
        const Eigen::MatrixXd oracle = oracle_accept_operator(*k.g, *s, x, tc.m, tc.junk, tc.v, tc.f);
        EXPECT_LE((op.op->dense() - oracle).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(AcceptOperator, HermitianWithUnitSpectrum) {
  Klein k;
  for (std::size_t m : {2u, 3u, 4u}) {
    const Eigen::MatrixXd e = build_accept_operator(k.A, k.S, config_with(m)).op->dense();
    EXPECT_LE((e - e.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-9);
  }
}

TEST(AcceptOperator, HonestExpectation) {
  Klein k;
  for (std::size_t m : {2u, 3u, 4u, 5u}) {
    const AcceptOperator op = build_accept_operator(k.B, k.S, config_with(m));
    EXPECT_NEAR(op.op->expectation(coset_proof_state(k.S, k.B).tensor_power(m)), 0.5, 1e-12);
  }
}

TEST(AcceptOperator, AgreesWithEnumerationOnRandomStates) {
  Klein k;
  Philox4x32 rng(11);
  const struct {
    std::size_t m, junk;
    std::optional<NoiseSpec> noise;
  } cases[] = {{2, 0, std::nullopt}, {3, 0, std::nullopt}, {2, 1, std::nullopt}, {3, 0, NoiseSpec{0.963, 0.959}}};
  for (const auto& tc : cases) {
    ProtocolConfig c = config_with(tc.m);
    c.junk_dims = tc.junk;
    c.noise = tc.noise;
    const std::size_t dim = 4 + tc.junk;
    const AcceptOperator op = build_accept_operator(k.A, k.S, c);
    for (int i = 0; i < 25; ++i) {
      const QuantumState rho = i % 2 == 0 ? QuantumState(random_pure(tc.m, dim, rng))
                                          : QuantumState(random_density(tc.m, dim, 3, rng));
      EXPECT_NEAR(op.op->expectation(rho), exact_accept_probability(rho, k.A, k.S, c), 1e-9);
    }
  }
}

TEST(AcceptOperator, BabaiSamplerUsesExactDistribution) {
  Klein k;
  ProtocolConfig c = config_with(2);
  c.sampler.kind = SamplerKind::BabaiSubproduct;
  c.sampler.subproduct_length = 2;
  Philox4x32 rng(12);
  const AcceptOperator op = build_accept_operator(k.A, k.S, c);
  for (int i = 0; i < 10; ++i) {
    const PureState psi = random_pure(2, 4, rng);
    EXPECT_NEAR(op.op->expectation(psi), exact_accept_probability(psi, k.A, k.S, c), 1e-12);
  }
}

TEST(Adversary, KleinSoundness) {
  Klein k;
  for (std::size_t m = 2; m <= 6; ++m) {
    for (const auto& [s, x] : {std::pair{&k.S, k.A}, std::pair{&k.Sp, k.AB}}) {
      const double bound = std::min(soundness_bound(m), klein_soundness_bound(m));
      EXPECT_LE(optimal_cheat_probability(x, *s, config_with(m)), bound + 1e-9) << m;
    }
  }
}

TEST(Adversary, TwoRegisterGolden) {
  Klein k;
  const OptimalAdversaryResult r = optimal_adversary(k.A, k.S, config_with(2), EigenMethod::Dense);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  ASSERT_TRUE(r.state);
  EXPECT_NEAR(exact_accept_probability(*r.state, k.A, k.S, config_with(2)), r.value, 1e-12);
  Philox4x32 rng(13);
  const double ascent = rayleigh_ascent(oracle_accept_operator(*k.g, k.S, k.A, 2, 0, 1.0, 1.0), rng, 16);
  EXPECT_NEAR(ascent, r.value, 1e-9);
}

TEST(Adversary, DenseAndLanczosAgree) {
  Klein k;
  for (std::size_t m : {2u, 3u, 4u, 5u}) {
    const auto dense = optimal_adversary(k.A, k.S, config_with(m), EigenMethod::Dense);
    const auto lanczos = optimal_adversary(k.A, k.S, config_with(m), EigenMethod::Lanczos);
    EXPECT_NEAR(dense.value, lanczos.value, 1e-9) << m;
    EXPECT_LE(lanczos.residual, 1e-8);
  }
  ProtocolConfig c = config_with(3);
  c.junk_dims = 1;
  c.noise = NoiseSpec{0.95, 0.9};
  EXPECT_NEAR(optimal_cheat_probability(k.A, k.S, c, EigenMethod::Dense),
              optimal_cheat_probability(k.A, k.S, c, EigenMethod::Lanczos), 1e-9);
}

TEST(Adversary, SoundnessAcrossBundledGroups) {
  for (const auto& name : bundled_group_names()) {
    const GroupDefinition def = bundled_group(name);
    for (const auto& [sub, gens] : def.subgroups) {
      const Subgroup s = resolve_subgroup(def, gens);
      for (Element x : s.elements()) {
        if (x == def.group->identity()) continue;
        for (std::size_t m = 2; m <= 6; ++m) {
          if (regops::Layout{m, def.group->order()}.total() > kDefaultDimCap) break;
          const double lam = optimal_cheat_probability(x, s, config_with(m));
          EXPECT_LE(lam, soundness_bound(m) + 1e-9) << name << " " << sub << " m=" << m;
          EXPECT_LE(lam, soundness_chain_bound(def.group->element_order(x), s.size(), def.group->label_bits(), m) +
                             1e-9)
              << name << " " << sub << " m=" << m;
        }
      }
    }
  }
}

TEST(ReservedRegister, BoundOnRandomStates) {
  Klein k;
  Philox4x32 rng(14);
  for (std::size_t m = 2; m <= 4; ++m) {
    const ProtocolConfig c = config_with(m);
    const PureState honest = coset_proof_state(k.S, k.B).tensor_power(m);
    for (int i = 0; i < 30; ++i) {
      QuantumState rho = i % 3 == 0   ? QuantumState(random_pure(m, 4, rng))
                         : i % 3 == 1 ? QuantumState(perturbed(honest, 0.3, rng))
                                      : QuantumState(random_density(m, 4, 2, rng));
      const RsiPassStatistics st = rsi_pass_statistics(rho, k.S, c);
      if (m <= 3) EXPECT_NEAR(st.p_test, exact_rsi_accept_probability(rho, k.S, c), 1e-12);
      if (st.p_test < 1e-6) continue;
      EXPECT_GE(st.conditional, reserved_pass_bound(st.p_test, m) - 1e-9);
    }
  }
}

TEST(MonteCarlo, HonestKleinMatchesExact) {
  Klein k;
  ProtocolConfig c = config_with(4, 42);
  c.trials = 100000;
  const MonteCarloEstimate est = monte_carlo(HonestCoset{k.B}, k.B, k.S, c);
  EXPECT_NEAR(est.accept_rate, 0.5, 0.006);
  EXPECT_EQ(est.test_pass_rate, 1.0);
}

TEST(MonteCarlo, HonestInSubgroupNeverAccepts) {
  Klein k;
  ProtocolConfig c = config_with(3, 1);
  c.trials = 5000;
  EXPECT_EQ(monte_carlo(HonestCoset{k.B}, k.A, k.S, c).accepted, 0u);
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreads) {
  Klein k;
  ProtocolConfig c = config_with(3, 99);
  c.trials = 3000;
  c.noise = NoiseSpec{0.963, 0.959};
  const auto a = monte_carlo(BasisBogus{k.B.index}, k.AB, k.S, c, true);
  const auto b = monte_carlo(BasisBogus{k.B.index}, k.AB, k.S, c, true);
  c.threads = 3;
  const auto t = monte_carlo(BasisBogus{k.B.index}, k.AB, k.S, c, true);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.records, t.records);
  EXPECT_EQ(a.accept_rate, t.accept_rate);
}

TEST(MonteCarlo, AgreesWithExactWithinFourSigma) {
  Klein k;
  Philox4x32 rng(15);
  struct Case {
    ProverStrategy strategy;
    Element g;
    std::optional<NoiseSpec> noise;
    std::size_t m;
    SamplerKind sampler;
  };
  const std::vector<Case> cases = {
      {BasisBogus{k.B.index}, k.A, std::nullopt, 2, SamplerKind::ExactUniform},
      {HonestCoset{k.B}, k.B, NoiseSpec{0.963, 0.959}, 3, SamplerKind::ExactUniform},
      {PureBogus{random_vector(4, rng)}, k.A, NoiseSpec{0.9, 0.95}, 3, SamplerKind::ExactUniform},
      {ArbitraryJoint{random_pure(3, 4, rng)}, k.B, std::nullopt, 3, SamplerKind::BabaiSubproduct},
      {ArbitraryJoint{random_density(2, 4, 2, rng)}, k.A, NoiseSpec{0.97, 0.9}, 2, SamplerKind::ExactUniform},
      {OptimalAdversary{}, k.A, std::nullopt, 3, SamplerKind::ExactUniform},
  };
  std::uint64_t seed = 100;
  for (const Case& tc : cases) {
    ProtocolConfig c = config_with(tc.m, seed++);
    c.trials = 20000;
    c.noise = tc.noise;
    c.sampler.kind = tc.sampler;
    c.sampler.subproduct_length = 3;
    const double exact = exact_accept_probability(tc.strategy, tc.g, k.S, c);
    const MonteCarloEstimate est = monte_carlo(tc.strategy, tc.g, k.S, c);
    const double sigma = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / static_cast<double>(c.trials));
    EXPECT_LE(std::abs(est.accept_rate - exact), 4.0 * sigma) << strategy_kind(tc.strategy);
    const QuantumState state = materialize(tc.strategy, tc.g, k.S, c);
    EXPECT_NEAR(build_accept_operator(tc.g, k.S, c).op->expectation(state), exact, 1e-9);
  }
}

TEST(MonotoneDamage, NoiseAndBogusRegistersNeverHelpHonest) {
  for (const auto& name : bundled_group_names()) {
    const GroupDefinition def = bundled_group(name);
    for (const auto& [sub, gens] : def.subgroups) {
      const Subgroup s = resolve_subgroup(def, gens);
      for (Element x : def.group->elements()) {
        if (s.contains(x)) continue;
        const std::size_t m = 3;
        const std::size_t dim = def.group->order();
        const ProtocolConfig ideal = config_with(m);
        const auto accept = [&](const ProtocolConfig& c, const QuantumState& state) {
          return build_accept_operator(x, s, c).op->expectation(state);
        };
        const PureState honest = coset_proof_state(s, x);
        const double base = accept(ideal, honest.tensor_power(m));
        double previous = base;
        for (double level : {0.99, 0.95, 0.9, 0.8}) {
          ProtocolConfig noisy = ideal;
          noisy.noise = NoiseSpec{level, level};
          const double p = accept(noisy, honest.tensor_power(m));
          EXPECT_LE(p, previous + 1e-12) << name << " " << sub;
          previous = p;
        }
        for (std::size_t bad = 1; bad < m; ++bad) {
          std::vector<PureState> regs(m, honest);
          for (std::size_t r = 0; r < bad; ++r) regs[r] = PureState::basis(dim, x.index);
          const double p = accept(ideal, PureState::product(regs));
          EXPECT_LE(p, base + 1e-12) << name << " " << sub;
        }
      }
    }
  }
}

TEST(Records, JsonShape) {
  Klein k;
  TrialStreams s = TrialStreams::for_trial(config_with(3, 7), 0);
  const TrialRecord r = verify_gnm(HonestCoset{k.B}, k.B, k.S, config_with(3, 7), s);
  const auto j = to_json(r, *k.g);
  EXPECT_EQ(j.at("test_outcomes").size(), 2u);
  EXPECT_EQ(j.at("span_outcomes").size(), 3u);
  EXPECT_EQ(j.at("sampled_elements").size(), 2u);
}
