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

#include "gnm/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

constexpr double kBranchFloor = 1e-14;
constexpr std::uint64_t kMaxRejections = std::uint64_t{1} << 20;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_state_shape(const QuantumState& state, const FiniteGroup& group, const ProtocolConfig& config) {
  const std::size_t D = config.register_dim(group);
  if (registers_of(state) != config.m || dim_of(state) != D) {
    throw StrategyDimensionMismatch("state has " + std::to_string(registers_of(state)) + " registers of dim " +
                                    std::to_string(dim_of(state)) + ", protocol expects " +
                                    std::to_string(config.m) + " of dim " + std::to_string(D));
  }
}

Element sample_test_element(const Subgroup& subgroup, const ProtocolConfig& config, Philox4x32& rng) {
  const Element e = subgroup.parent().identity();
  if (config.test_elements == TestElements::All) return draw_sample(subgroup, config.sampler, rng);
  if (subgroup.size() < 2) throw std::invalid_argument("nonidentity test elements need a subgroup other than {e}");
  for (std::uint64_t i = 0; i < kMaxRejections; ++i) {
    const Element s = draw_sample(subgroup, config.sampler, rng);
    if (s != e) return s;
  }
  throw std::runtime_error("sampler kept returning the identity");
}

int sample_outcome(double p1, Philox4x32& rng) { return rng.bernoulli(p1) ? 1 : 0; }

Eigen::MatrixXcd weyl_twirl_unitary(std::size_t N, std::size_t D, std::size_t a, std::size_t b, bool flip) {
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (std::size_t k = 0; k < N; ++k) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>((b * k) % N) / static_cast<double>(N);
    W(static_cast<Eigen::Index>((k + a) % N), static_cast<Eigen::Index>(k)) = std::polar(1.0, phase);
  }
  for (std::size_t k = N; k < D; ++k) {
    W(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = flip ? -1.0 : 1.0;
  }
  return W;
}

Eigen::MatrixXd span_projector(std::size_t N, std::size_t D) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (std::size_t a = 0; a < N; ++a) P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = 1.0;
  return P;
}

/// Effect P K^T K P averaged with the visibility coin, then pulled back
/// through the preparation noise.
Eigen::MatrixXd noisy_effect(const FiniteGroup& group, const std::vector<WeightedElement>& elements, int outcome,
                             const ProtocolConfig& config) {
  const std::size_t N = group.order();
  const std::size_t D = config.register_dim(group);
  const double v = config.visibility();
  const double f = config.state_fidelity_mix();
  const Eigen::MatrixXd P = span_projector(N, D);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  const double sign = outcome == 0 ? 1.0 : -1.0;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (const auto& [s, w] : elements) {
    const Eigen::MatrixXd M = right_mult_unitary(group, s, D - N);
    const Eigen::MatrixXd KtK = 0.25 * (2.0 * I + sign * (M + M.transpose()));
    F += w * (v * P * KtK * P + 0.5 * (1.0 - v) * P);
  }
  if (f < 1.0) F = (f * F + (1.0 - f) * F.trace() / static_cast<double>(N) * P).eval();
  return F;
}

struct ExactContext {
  const FiniteGroup& group;
  std::vector<WeightedElement> elements;
  double visibility;
  std::optional<Element> g;
};

double descend(const QuantumState& state, const std::vector<std::size_t>& tested, std::size_t idx,
               std::size_t reserved, const ExactContext& ctx) {
  const double v = ctx.visibility;
  if (idx == tested.size()) {
    if (!ctx.g) return 1.0;
    const SpanCheckOutcome sc = span_check(state, reserved, ctx.group);
    if (sc.p_pass <= kBranchFloor) return 0.0;
    const CoreOutcome co = core_circuit(*sc.post_pass, reserved, ctx.group, *ctx.g);
    return sc.p_pass * (v * co.p1 + 0.5 * (1.0 - v));
  }
  const std::size_t reg = tested[idx];
  const SpanCheckOutcome sc = span_check(state, reg, ctx.group);
  if (sc.p_pass <= kBranchFloor) return 0.0;
  const QuantumState& passed = *sc.post_pass;
  double total = 0.0;
  double coin_branch = -1.0;
  for (const auto& [s, w] : ctx.elements) {
    double contrib = 0.0;
    if (v > 0.0) {
      const CoreOutcome co = core_circuit(passed, reg, ctx.group, s);
      if (co.p0 > kBranchFloor) contrib += v * co.p0 * descend(*co.post0, tested, idx + 1, reserved, ctx);
    }
    if (v < 1.0) {
      if (coin_branch < 0.0) coin_branch = descend(passed, tested, idx + 1, reserved, ctx);
      contrib += 0.5 * (1.0 - v) * coin_branch;
    }
    total += w * contrib;
  }
  return sc.p_pass * total;
}

QuantumState prepare_exact_input(const QuantumState& state, const FiniteGroup& group, const ProtocolConfig& config) {
  check_state_shape(state, group, config);
  checked_joint_dim(config.register_dim(group), config.m, config.cap());
  const double f = config.state_fidelity_mix();
  const bool density = std::holds_alternative<DensityState>(state) || f < 1.0;
  if (!density) return state;
  const std::size_t total = regops::Layout{config.m, config.register_dim(group)}.total();
  if (total > kDensityDimCap) {
    throw TooLargeForExact("density-matrix enumeration limited to joint dimension " +
                           std::to_string(kDensityDimCap));
  }
  DensityState rho = to_density(state);
  if (f < 1.0) rho = apply_noise(rho, *config.noise, group);
  return rho;
}

double enumerate(const QuantumState& state, const Subgroup& subgroup, const ProtocolConfig& config,
                 std::optional<Element> g) {
  const FiniteGroup& G = subgroup.parent();
  const QuantumState input = prepare_exact_input(state, G, config);
  ExactContext ctx{G, test_distribution(subgroup, config), config.visibility(), g};
  double total = 0.0;
  for (std::size_t r = 0; r < config.m; ++r) {
    std::vector<std::size_t> tested;
    for (std::size_t j = 0; j < config.m; ++j) {
      if (j != r) tested.push_back(j);
    }
    total += descend(input, tested, 0, r, ctx);
  }
  return std::clamp(total / static_cast<double>(config.m), 0.0, 1.0);
}

}  // namespace

std::string to_string(TestElements t) { return t == TestElements::All ? "all" : "nonidentity"; }

TestElements test_elements_from_string(const std::string& s) {
  if (s == "all") return TestElements::All;
  if (s == "nonidentity") return TestElements::NonIdentity;
  throw std::invalid_argument("unknown test_elements '" + s + "' (expected all or nonidentity)");
}

void ProtocolConfig::validate() const {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  sampler.validate();
  if (noise) noise->validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

std::vector<WeightedElement> test_distribution(const Subgroup& subgroup, const ProtocolConfig& config) {
  const std::vector<double> pi = sampler_distribution(subgroup, config.sampler);
  const Element e = subgroup.parent().identity();
  std::vector<WeightedElement> out;
  double mass = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const Element s = subgroup.elements()[i];
    if (config.test_elements == TestElements::NonIdentity && s == e) continue;
    if (pi[i] <= 0.0) continue;
    out.push_back({s, pi[i]});
    mass += pi[i];
  }
  if (out.empty() || mass <= 0.0) {
    throw std::invalid_argument("nonidentity test elements need a subgroup other than {e}");
  }
  for (auto& w : out) w.weight /= mass;
  return out;
}

// ---------------------------------------------------------------------------
// Strategies

std::string strategy_kind(const ProverStrategy& strategy) {
  static const char* const kNames[] = {"honest", "basis", "pure", "product", "joint", "optimal"};
  return kNames[strategy.index()];
}

nlohmann::json describe(const ProverStrategy& strategy, const FiniteGroup& group) {
  nlohmann::json j{{"kind", strategy_kind(strategy)}};
  auto amplitudes = [](const Eigen::VectorXcd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
    return a;
  };
  if (const auto* h = std::get_if<HonestCoset>(&strategy)) {
    j["alpha"] = group.valid(h->alpha) ? group.name(h->alpha) : std::to_string(h->alpha.index);
  } else if (const auto* b = std::get_if<BasisBogus>(&strategy)) {
    j["label"] = b->label < group.order() ? group.name(Element(static_cast<std::uint32_t>(b->label)))
                                          : "junk:" + std::to_string(b->label - group.order());
  } else if (const auto* p = std::get_if<PureBogus>(&strategy)) {
    j["amplitudes"] = amplitudes(p->amplitudes);
  } else if (const auto* pj = std::get_if<ProductJoint>(&strategy)) {
    j["registers"] = nlohmann::json::array();
    for (const auto& r : pj->registers) j["registers"].push_back(amplitudes(r));
  } else if (const auto* aj = std::get_if<ArbitraryJoint>(&strategy)) {
    j["state"] = std::visit([](const auto& s) { return to_json(s); }, aj->state);
  }
  return j;
}

QuantumState materialize(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                         const ProtocolConfig& config) {
  config.validate();
  const FiniteGroup& G = subgroup.parent();
  const std::size_t D = config.register_dim(G);
  const std::size_t m = config.m;
  checked_joint_dim(D, m, config.cap());
  auto single = [&](const Eigen::VectorXcd& amps) {
    if (static_cast<std::size_t>(amps.size()) != D) {
      throw StrategyDimensionMismatch("single-register state has " + std::to_string(amps.size()) +
                                      " amplitudes, expected " + std::to_string(D));
    }
    return PureState(1, D, amps);
  };

  if (const auto* h = std::get_if<HonestCoset>(&strategy)) {
    if (!G.valid(h->alpha)) throw StrategyDimensionMismatch("coset representative out of range");
    return coset_proof_state(subgroup, h->alpha, config.junk_dims).tensor_power(m);
  }
  if (const auto* b = std::get_if<BasisBogus>(&strategy)) {
    if (b->label >= D) throw StrategyDimensionMismatch("basis label out of range");
    return PureState::basis(D, b->label).tensor_power(m);
  }
  if (const auto* p = std::get_if<PureBogus>(&strategy)) return single(p->amplitudes).tensor_power(m);
  if (const auto* pj = std::get_if<ProductJoint>(&strategy)) {
    if (pj->registers.size() != m) {
      throw StrategyDimensionMismatch("product strategy has " + std::to_string(pj->registers.size()) +
                                      " registers, expected " + std::to_string(m));
    }
    std::vector<PureState> factors;
    for (const auto& r : pj->registers) factors.push_back(single(r));
    return PureState::product(factors);
  }
  if (const auto* aj = std::get_if<ArbitraryJoint>(&strategy)) {
    check_state_shape(aj->state, G, config);
    return aj->state;
  }
  OptimalAdversaryResult best = optimal_adversary(g, subgroup, config);
  if (best.state) return *best.state;
  return coset_proof_state(subgroup, G.identity(), config.junk_dims).tensor_power(m);
}

// ---------------------------------------------------------------------------
// Single-shot steps

TrialStreams TrialStreams::for_trial(const ProtocolConfig& config, std::uint64_t trial) {
  return TrialStreams{Philox4x32(config.seed, 0).split(trial),
                      Philox4x32(config.sampler.seed, splitmix64(config.seed)).split(trial)};
}

TestChannelResult test_channel(const QuantumState& state, std::size_t reg, const Subgroup& subgroup,
                               const ProtocolConfig& config, TrialStreams& streams) {
  const FiniteGroup& G = subgroup.parent();
  TestChannelResult out{1, false, G.identity(), state};
  const SpanCheckOutcome sc = span_check(state, reg, G);
  out.span_pass = sample_outcome(sc.p_pass, streams.measurement) == 1;
  out.sampled = sample_test_element(subgroup, config, streams.sampler);
  if (!out.span_pass) {
    if (sc.post_fail) out.state = *sc.post_fail;
    out.output = 1;
    return out;
  }
  if (sc.post_pass) out.state = *sc.post_pass;
  const double v = config.visibility();
  if (v < 1.0 && !streams.measurement.bernoulli(v)) {
    out.output = static_cast<int>(streams.measurement() & 1);
    return out;
  }
  CoreOutcome co = core_circuit(out.state, reg, G, out.sampled);
  out.output = sample_outcome(co.p1, streams.measurement);
  auto& post = out.output == 0 ? co.post0 : co.post1;
  if (post) out.state = std::move(*post);
  return out;
}

RsiResult rsi(const QuantumState& state, const Subgroup& subgroup, const ProtocolConfig& config,
              TrialStreams& streams) {
  const std::size_t m = registers_of(state);
  if (m < 2) throw std::invalid_argument("RSI needs at least two registers");
  RsiResult out{true, 0, {}, {}, {}, state};
  out.reserved = static_cast<std::size_t>(streams.measurement.uniform_index(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (j == out.reserved) continue;
    TestChannelResult t = test_channel(out.state, j, subgroup, config, streams);
    out.test_outcomes.push_back(t.output);
    out.sampled_elements.push_back(t.sampled);
    out.span_outcomes.push_back(t.span_pass);
    out.accept = out.accept && t.output == 0;
    out.state = std::move(t.state);
  }
  return out;
}

QuantumState apply_preparation_noise(const QuantumState& state, const FiniteGroup& group,
                                     const ProtocolConfig& config, Philox4x32& rng) {
  const double f = config.state_fidelity_mix();
  if (f >= 1.0) return state;
  if (const auto* rho = std::get_if<DensityState>(&state)) return apply_noise(*rho, *config.noise, group);
  const auto& psi = std::get<PureState>(state);
  const std::size_t N = group.order();
  const std::size_t D = psi.dim();
  Eigen::VectorXcd amps = psi.amplitudes();
  for (std::size_t r = 0; r < psi.registers(); ++r) {
    if (rng.bernoulli(f)) continue;
    const auto a = static_cast<std::size_t>(rng.uniform_index(N));
    const auto b = static_cast<std::size_t>(rng.uniform_index(N));
    const bool flip = (rng() & 1) != 0;
    regops::apply(psi.layout(), r, weyl_twirl_unitary(N, D, a, b, flip), amps);
  }
  return PureState::normalized(psi.registers(), D, std::move(amps));
}

TrialRecord verify_gnm(const QuantumState& state, Element g, const Subgroup& subgroup,
                       const ProtocolConfig& config, TrialStreams& streams) {
  const FiniteGroup& G = subgroup.parent();
  check_state_shape(state, G, config);
  const QuantumState noisy = apply_preparation_noise(state, G, config, streams.measurement);
  RsiResult r = rsi(noisy, subgroup, config, streams);

  TrialRecord rec;
  rec.reserved_index = r.reserved;
  rec.test_outcomes = r.test_outcomes;
  rec.sampled_elements = r.sampled_elements;
  rec.span_outcomes = r.span_outcomes;

  const SpanCheckOutcome sc = span_check(r.state, r.reserved, G);
  const bool span_pass = sample_outcome(sc.p_pass, streams.measurement) == 1;
  rec.span_outcomes.push_back(span_pass);
  if (g == G.identity()) {
    rec.short_circuit = true;
    rec.prove_outcome = 0;
    rec.accepted = false;
    return rec;
  }
  if (span_pass) {
    const double v = config.visibility();
    if (v < 1.0 && !streams.measurement.bernoulli(v)) {
      rec.prove_outcome = static_cast<int>(streams.measurement() & 1);
    } else {
      const CoreOutcome co = core_circuit(sc.post_pass ? *sc.post_pass : r.state, r.reserved, G, g);
      rec.prove_outcome = sample_outcome(co.p1, streams.measurement);
    }
  }
  rec.accepted = r.accept && span_pass && rec.prove_outcome == 1;
  return rec;
}

TrialRecord verify_gnm(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                       const ProtocolConfig& config, TrialStreams& streams) {
  return verify_gnm(materialize(strategy, g, subgroup, config), g, subgroup, config, streams);
}

// ---------------------------------------------------------------------------
// Exact engines

double exact_accept_probability(const QuantumState& state, Element g, const Subgroup& subgroup,
                                const ProtocolConfig& config) {
  config.validate();
  if (!subgroup.parent().valid(g)) throw std::out_of_range("group element out of range");
  check_state_shape(state, subgroup.parent(), config);
  if (g == subgroup.parent().identity()) return 0.0;
  return enumerate(state, subgroup, config, g);
}

double exact_accept_probability(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                                const ProtocolConfig& config) {
  if (g == subgroup.parent().identity()) return 0.0;
  return exact_accept_probability(materialize(strategy, g, subgroup, config), g, subgroup, config);
}

double exact_rsi_accept_probability(const QuantumState& state, const Subgroup& subgroup,
                                    const ProtocolConfig& config) {
  config.validate();
  return enumerate(state, subgroup, config, std::nullopt);
}

LocalOperatorSum::LocalOperatorSum(std::size_t registers, std::size_t dim) : registers_(registers), dim_(dim) {}

const Eigen::MatrixXd* LocalOperatorSum::own(Eigen::MatrixXd factor) {
  if (factor.rows() != static_cast<Eigen::Index>(dim_) || factor.cols() != static_cast<Eigen::Index>(dim_)) {
    throw std::invalid_argument("factor has the wrong shape");
  }
  owned_.push_back(std::make_unique<Eigen::MatrixXd>(std::move(factor)));
  return owned_.back().get();
}

void LocalOperatorSum::add_term(Term term) {
  if (term.factors.size() != registers_) throw std::invalid_argument("term has the wrong number of factors");
  terms_.push_back(std::move(term));
}

void LocalOperatorSum::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const regops::Layout layout{registers_, dim_};
  y = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd tmp;
  for (const auto& term : terms_) {
    tmp = x;
    for (std::size_t r = 0; r < registers_; ++r) {
      if (term.factors[r]) regops::apply(layout, r, *term.factors[r], tmp);
    }
    y += term.weight * tmp;
  }
}

Eigen::MatrixXd LocalOperatorSum::dense() const {
  const auto T = static_cast<Eigen::Index>(total_dim());
  const auto D = static_cast<Eigen::Index>(dim_);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(D, D);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, T);
  for (const auto& term : terms_) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(1, 1, term.weight);
    for (std::size_t r = 0; r < registers_; ++r) {
      const Eigen::MatrixXd& f = term.factors[r] ? *term.factors[r] : I;
      Eigen::MatrixXd next(k.rows() * D, k.cols() * D);
      for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) next.block(i * D, j * D, D, D) = k(i, j) * f;
      }
      k = std::move(next);
    }
    out += k;
  }
  return out;
}

double LocalOperatorSum::expectation(const QuantumState& state) const {
  if (registers_of(state) != registers_ || dim_of(state) != dim_) {
    throw StrategyDimensionMismatch("state shape does not match the operator");
  }
  Eigen::VectorXd y;
  if (const auto* psi = std::get_if<PureState>(&state)) {
    double total = 0.0;
    for (const Eigen::VectorXd& part : {Eigen::VectorXd(psi->amplitudes().real()),
                                       Eigen::VectorXd(psi->amplitudes().imag())}) {
      apply(part, y);
      total += part.dot(y);
    }
    return total;
  }
  const Eigen::MatrixXd re = std::get<DensityState>(state).matrix().real();
  double total = 0.0;
  for (Eigen::Index c = 0; c < re.cols(); ++c) {
    apply(re.col(c), y);
    total += y[c];
  }
  return total;
}

Eigen::MatrixXd pass_element(const Subgroup& subgroup, const ProtocolConfig& config) {
  return noisy_effect(subgroup.parent(), test_distribution(subgroup, config), 0, config);
}

Eigen::MatrixXd prove_element(Element g, const Subgroup& subgroup, const ProtocolConfig& config) {
  return noisy_effect(subgroup.parent(), {{g, 1.0}}, 1, config);
}

AcceptOperator build_accept_operator(Element g, const Subgroup& subgroup, const ProtocolConfig& config) {
  config.validate();
  const FiniteGroup& G = subgroup.parent();
  if (!G.valid(g)) throw std::out_of_range("group element out of range");
  const std::size_t D = config.register_dim(G);
  checked_joint_dim(D, config.m, config.cap());
  AcceptOperator out;
  out.op = std::make_shared<LocalOperatorSum>(config.m, D);
  out.pass_element = pass_element(subgroup, config);
  out.prove_element = prove_element(g, subgroup, config);
  if (g == G.identity()) {
    out.short_circuit = true;
    return out;
  }
  const auto* pass = out.op->own(out.pass_element);
  const auto* prove = out.op->own(out.prove_element);
  for (std::size_t r = 0; r < config.m; ++r) {
    LocalOperatorSum::Term term{1.0 / static_cast<double>(config.m), {}};
    for (std::size_t j = 0; j < config.m; ++j) term.factors.push_back(j == r ? prove : pass);
    out.op->add_term(std::move(term));
  }
  return out;
}

OptimalAdversaryResult optimal_adversary(Element g, const Subgroup& subgroup, const ProtocolConfig& config,
                                         EigenMethod method) {
  const AcceptOperator E = build_accept_operator(g, subgroup, config);
  OptimalAdversaryResult out;
  if (E.short_circuit) {
    out.short_circuit = true;
    return out;
  }
  const std::size_t T = E.op->total_dim();
  if (method == EigenMethod::Auto) method = T <= kDenseAutoLimit ? EigenMethod::Dense : EigenMethod::Lanczos;
  EigenPair pair;
  if (method == EigenMethod::Dense) {
    pair = largest_eigenpair_dense(E.op->dense());
  } else {
    const auto& op = *E.op;
    pair = largest_eigenpair_lanczos([&op](const Eigen::VectorXd& x, Eigen::VectorXd& y) { op.apply(x, y); }, T);
  }
  out.value = pair.value;
  out.method = pair.method;
  out.iterations = pair.iterations;
  out.residual = pair.residual;
  out.state = PureState::normalized(config.m, E.op->dim(), pair.vector.cast<std::complex<double>>());
  return out;
}

double optimal_cheat_probability(Element g, const Subgroup& subgroup, const ProtocolConfig& config,
                                 EigenMethod method) {
  return optimal_adversary(g, subgroup, config, method).value;
}

RsiPassStatistics rsi_pass_statistics(const QuantumState& state, const Subgroup& subgroup,
                                      const ProtocolConfig& config) {
  config.validate();
  const FiniteGroup& G = subgroup.parent();
  check_state_shape(state, G, config);
  const std::size_t m = config.m;
  LocalOperatorSum test(m, config.register_dim(G));
  LocalOperatorSum joint(m, config.register_dim(G));
  const auto* pass_t = test.own(pass_element(subgroup, config));
  const auto* pass_j = joint.own(pass_element(subgroup, config));
  for (std::size_t r = 0; r < m; ++r) {
    LocalOperatorSum::Term term{1.0 / static_cast<double>(m), {}};
    for (std::size_t j = 0; j < m; ++j) term.factors.push_back(j == r ? nullptr : pass_t);
    test.add_term(std::move(term));
  }
  joint.add_term({1.0, std::vector<const Eigen::MatrixXd*>(m, pass_j)});
  RsiPassStatistics out;
  out.p_test = std::clamp(test.expectation(state), 0.0, 1.0);
  out.p_joint = std::clamp(joint.expectation(state), 0.0, 1.0);
  out.conditional = out.p_test > 0.0 ? std::min(1.0, out.p_joint / out.p_test) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

struct Tally {
  std::uint64_t accepted = 0;
  std::uint64_t tests = 0;
  std::uint64_t tests_passed = 0;
  std::uint64_t rsi_accepted = 0;
  std::uint64_t reserved_span = 0;
  std::uint64_t prove_one = 0;

  void add(const TrialRecord& r) {
    accepted += r.accepted;
    tests += r.test_outcomes.size();
    bool all = true;
    for (int t : r.test_outcomes) {
      tests_passed += t == 0;
      all = all && t == 0;
    }
    rsi_accepted += all;
    reserved_span += r.span_outcomes.back();
    prove_one += r.prove_outcome == 1;
  }
  void merge(const Tally& o) {
    accepted += o.accepted;
    tests += o.tests;
    tests_passed += o.tests_passed;
    rsi_accepted += o.rsi_accepted;
    reserved_span += o.reserved_span;
    prove_one += o.prove_one;
  }
};

/// Mixed inputs are simulated by first drawing one eigenvector.
struct Ensemble {
  std::vector<double> cumulative;
  std::vector<PureState> states;

  const PureState& draw(Philox4x32& rng) const {
    const double u = rng.uniform01() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return states[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), states.size() - 1)];
  }
};

Ensemble decompose(const DensityState& rho) {
  if (rho.total_dim() > kDensityDimCap) {
    throw TooLargeForExact("mixed-state Monte Carlo limited to joint dimension " + std::to_string(kDensityDimCap));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  Ensemble out;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p <= kBranchFloor) continue;
    acc += p;
    out.cumulative.push_back(acc);
    out.states.push_back(PureState::normalized(rho.registers(), rho.dim(), es.eigenvectors().col(i)));
  }
  return out;
}

}  // namespace

MonteCarloEstimate monte_carlo(const ProverStrategy& strategy, Element g, const Subgroup& subgroup,
                               const ProtocolConfig& config, bool keep_records) {
  config.validate();
  const QuantumState state = materialize(strategy, g, subgroup, config);
  std::optional<Ensemble> ensemble;
  if (const auto* rho = std::get_if<DensityState>(&state)) ensemble = decompose(*rho);

  const std::uint64_t trials = config.trials;
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(config.threads, trials));
  std::vector<Tally> tallies(threads);
  std::vector<TrialRecord> records(keep_records ? trials : 0);

  auto run = [&](unsigned worker) {
    const std::uint64_t begin = trials * worker / threads;
    const std::uint64_t end = trials * (worker + 1) / threads;
    for (std::uint64_t t = begin; t < end; ++t) {
      TrialStreams streams = TrialStreams::for_trial(config, t);
      TrialRecord rec = ensemble ? verify_gnm(ensemble->draw(streams.measurement), g, subgroup, config, streams)
                                 : verify_gnm(state, g, subgroup, config, streams);
      tallies[worker].add(rec);
      if (keep_records) records[t] = std::move(rec);
    }
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }

  Tally total;
  for (const auto& t : tallies) total.merge(t);
  MonteCarloEstimate out;
  const double n = static_cast<double>(trials);
  out.trials = trials;
  out.accepted = total.accepted;
  out.accept_rate = static_cast<double>(total.accepted) / n;
  out.std_error = std::sqrt(out.accept_rate * (1.0 - out.accept_rate) / n);
  out.test_pass_rate = total.tests ? static_cast<double>(total.tests_passed) / static_cast<double>(total.tests) : 0.0;
  out.rsi_accept_rate = static_cast<double>(total.rsi_accepted) / n;
  out.reserved_span_rate = static_cast<double>(total.reserved_span) / n;
  out.prove_rate = static_cast<double>(total.prove_one) / n;
  out.records = std::move(records);
  return out;
}

nlohmann::json to_json(const TrialRecord& record, const FiniteGroup& group) {
  nlohmann::json sampled = nlohmann::json::array();
  for (Element s : record.sampled_elements) sampled.push_back(group.name(s));
  return {{"reserved_index", record.reserved_index},
          {"test_outcomes", record.test_outcomes},
          {"sampled_elements", sampled},
          {"span_outcomes", record.span_outcomes},
          {"prove_outcome", record.prove_outcome},
          {"accepted", record.accepted},
          {"short_circuit", record.short_circuit}};
}

}  // namespace gnm
