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
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "gnm/group.hpp"
#include "gnm/qsim.hpp"
#include "gnm/rng.hpp"
#include "gnm/sampling.hpp"
#include "gnm/spectral.hpp"

namespace gnm {

/// Which subgroup elements the test channel may multiply by. NonIdentity
/// conditions the sampler on s != e.
enum class TestElements { All, NonIdentity };

std::string to_string(TestElements t);
TestElements test_elements_from_string(const std::string& s);

struct ProtocolConfig {
  std::size_t m = 2;
  SamplerSpec sampler;
  std::optional<NoiseSpec> noise;
  std::size_t junk_dims = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1000;
  TestElements test_elements = TestElements::All;
  /// 0 means default_dim_cap().
  std::size_t dim_cap = 0;
  unsigned threads = 1;

  void validate() const;
  std::size_t cap() const { return dim_cap == 0 ? default_dim_cap() : dim_cap; }
  std::size_t register_dim(const FiniteGroup& group) const { return group.order() + junk_dims; }
  double visibility() const { return noise ? noise->visibility : 1.0; }
  double state_fidelity_mix() const { return noise ? noise->state_fidelity_mix : 1.0; }
};

/// Largest joint dimension D^m for which density-matrix engines run.
inline constexpr std::size_t kDensityDimCap = 1024;

/// The elements the test channel multiplies by and their probabilities.
struct WeightedElement {
  Element element;
  double weight = 0.0;
};
std::vector<WeightedElement> test_distribution(const Subgroup& subgroup, const ProtocolConfig& config);

// ---------------------------------------------------------------------------
// Prover strategies

struct HonestCoset {
  Element alpha;
};
/// Every register holds the basis label (group or junk label).
struct BasisBogus {
  std::size_t label = 0;
};
/// Every register holds the same single-register state.
struct PureBogus {
  Eigen::VectorXcd amplitudes;
};
struct ProductJoint {
  std::vector<Eigen::VectorXcd> registers;
};
struct ArbitraryJoint {
  QuantumState state;
};
/// The top eigenvector of the acceptance operator.
struct OptimalAdversary {};

using ProverStrategy =
    std::variant<HonestCoset, BasisBogus, PureBogus, ProductJoint, ArbitraryJoint, OptimalAdversary>;

std::string strategy_kind(const ProverStrategy& strategy);
nlohmann::json describe(const ProverStrategy& strategy, const FiniteGroup& group);

/// The joint state the prover submits. Throws StrategyDimensionMismatch.
QuantumState materialize(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                         const ProtocolConfig& config);

// ---------------------------------------------------------------------------
// Single-shot protocol steps

/// Measurement and sampler streams of one trial.
struct TrialStreams {
  Philox4x32 measurement;
  Philox4x32 sampler;

  static TrialStreams for_trial(const ProtocolConfig& config, std::uint64_t trial);
};

struct TestChannelResult {
  /// 0 = pass.
  int output = 1;
  bool span_pass = false;
  Element sampled;
  QuantumState state;
};

/// Span check, then the core circuit with a sampled subgroup element.
TestChannelResult test_channel(const QuantumState& state, std::size_t reg, const Subgroup& subgroup,
                               const ProtocolConfig& config, TrialStreams& streams);

struct RsiResult {
  bool accept = false;
  std::size_t reserved = 0;
  std::vector<int> test_outcomes;
  std::vector<Element> sampled_elements;
  std::vector<bool> span_outcomes;
  QuantumState state;
};

/// Reserves a uniform register and tests all the others.
RsiResult rsi(const QuantumState& state, const Subgroup& subgroup, const ProtocolConfig& config,
              TrialStreams& streams);

struct TrialRecord {
  std::size_t reserved_index = 0;
  std::vector<int> test_outcomes;
  std::vector<Element> sampled_elements;
  /// Tested registers in index order, then the reserved register.
  std::vector<bool> span_outcomes;
  int prove_outcome = 0;
  bool accepted = false;
  /// g = e: rejected without running the prove step.
  bool short_circuit = false;

  bool operator==(const TrialRecord&) const = default;
};

/// The state-preparation noise on every register, sampled as a random
/// twirl on each register with probability 1 - state_fidelity_mix.
QuantumState apply_preparation_noise(const QuantumState& state, const FiniteGroup& group,
                                     const ProtocolConfig& config, Philox4x32& rng);

/// One full verification trial on an already materialized state.
TrialRecord verify_gnm(const QuantumState& state, Element g, const Subgroup& subgroup,
                       const ProtocolConfig& config, TrialStreams& streams);
TrialRecord verify_gnm(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                       const ProtocolConfig& config, TrialStreams& streams);

// ---------------------------------------------------------------------------
// Exact engines

/// Exact acceptance probability by enumerating reserved registers, sampled
/// elements and measurement branches.
double exact_accept_probability(const QuantumState& state, Element g, const Subgroup& subgroup,
                                const ProtocolConfig& config);
double exact_accept_probability(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                                const ProtocolConfig& config);

/// Exact probability that RSI accepts, by the same enumeration.
double exact_rsi_accept_probability(const QuantumState& state, const Subgroup& subgroup,
                                    const ProtocolConfig& config);

/// Sum of weighted tensor products of single-register operators; a null
/// factor is the identity. All factors are real symmetric.
class LocalOperatorSum {
 public:
  struct Term {
    double weight = 1.0;
    std::vector<const Eigen::MatrixXd*> factors;
  };

  LocalOperatorSum(std::size_t registers, std::size_t dim);

  std::size_t registers() const { return registers_; }
  std::size_t dim() const { return dim_; }
  std::size_t total_dim() const { return regops::Layout{registers_, dim_}.total(); }

  /// Stores a copy of the factor and returns a stable pointer to it.
  const Eigen::MatrixXd* own(Eigen::MatrixXd factor);
  void add_term(Term term);
  const std::vector<Term>& terms() const { return terms_; }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::MatrixXd dense() const;
  double expectation(const QuantumState& state) const;

 private:
  std::size_t registers_;
  std::size_t dim_;
  std::vector<std::unique_ptr<Eigen::MatrixXd>> owned_;
  std::vector<Term> terms_;
};

/// E with Pr(accept | rho) = Tr(E rho). pass_element and prove_element are
/// the single-register effects of passing a test and of prove outcome 1,
/// both including visibility and preparation noise.
struct AcceptOperator {
  std::shared_ptr<LocalOperatorSum> op;
  Eigen::MatrixXd pass_element;
  Eigen::MatrixXd prove_element;
  /// g = e: E = 0.
  bool short_circuit = false;
};

AcceptOperator build_accept_operator(Element g, const Subgroup& subgroup, const ProtocolConfig& config);

/// Single-register effect of passing one test.
Eigen::MatrixXd pass_element(const Subgroup& subgroup, const ProtocolConfig& config);
/// Single-register effect of prove outcome 1 with multiplier g.
Eigen::MatrixXd prove_element(Element g, const Subgroup& subgroup, const ProtocolConfig& config);

struct OptimalAdversaryResult {
  double value = 0.0;
  std::optional<PureState> state;
  bool short_circuit = false;
  EigenMethod method = EigenMethod::Dense;
  std::size_t iterations = 0;
  double residual = 0.0;
};

OptimalAdversaryResult optimal_adversary(Element g, const Subgroup& subgroup, const ProtocolConfig& config,
                                         EigenMethod method = EigenMethod::Auto);
double optimal_cheat_probability(Element g, const Subgroup& subgroup, const ProtocolConfig& config,
                                 EigenMethod method = EigenMethod::Auto);

/// Exact RSI statistics of a joint state: p_test = Pr(all tested registers
/// pass), p_joint = Pr(the reserved register would pass too), and the
/// conditional p_joint / p_test.
struct RsiPassStatistics {
  double p_test = 0.0;
  double p_joint = 0.0;
  double conditional = 0.0;
};
RsiPassStatistics rsi_pass_statistics(const QuantumState& state, const Subgroup& subgroup,
                                      const ProtocolConfig& config);

// ---------------------------------------------------------------------------
// Monte Carlo

struct MonteCarloEstimate {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  double accept_rate = 0.0;
  double std_error = 0.0;
  /// Fraction of individual test-channel runs that passed.
  double test_pass_rate = 0.0;
  /// Fraction of trials whose RSI stage accepted.
  double rsi_accept_rate = 0.0;
  /// Fraction of trials whose reserved register passed the span check.
  double reserved_span_rate = 0.0;
  /// Fraction of trials with prove outcome 1.
  double prove_rate = 0.0;
  std::vector<TrialRecord> records;
};

/// Seeded and reproducible for any thread count.
MonteCarloEstimate monte_carlo(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                               const ProtocolConfig& config, bool keep_records = false);

nlohmann::json to_json(const TrialRecord& record, const FiniteGroup& group);

}  // namespace gnm
