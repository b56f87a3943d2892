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
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "gnm/group.hpp"
#include "gnm/register_ops.hpp"

namespace gnm {

inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;
inline constexpr double kPureTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-9;

/// The joint-dimension cap D^m: GNM_DIM_CAP when set, else 2^20.
std::size_t default_dim_cap();

/// D^m, or TooLargeForExact when it exceeds `cap`.
std::size_t checked_joint_dim(std::size_t dim, std::size_t registers, std::size_t cap);

/// Normalized amplitude vector over m registers of dimension D. Labels
/// [0, N) of each register are group labels; any extra labels are junk.
class PureState {
 public:
  PureState(std::size_t registers, std::size_t dim, Eigen::VectorXcd amplitudes);

  /// Rescales the amplitudes to unit norm first.
  static PureState normalized(std::size_t registers, std::size_t dim, Eigen::VectorXcd amplitudes);
  static PureState basis(std::size_t dim, std::size_t label);
  static PureState product(const std::vector<PureState>& factors);

  std::size_t registers() const { return registers_; }
  std::size_t dim() const { return dim_; }
  std::size_t total_dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  regops::Layout layout() const { return {registers_, dim_}; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  PureState tensor_power(std::size_t m) const;

 private:
  std::size_t registers_;
  std::size_t dim_;
  Eigen::VectorXcd amplitudes_;
};

class DensityState {
 public:
  /// Checks Hermiticity and unit trace; positivity is checked by eigenvalues
  /// for joint dimensions up to 512.
  DensityState(std::size_t registers, std::size_t dim, Eigen::MatrixXcd matrix);

  static DensityState from_pure(const PureState& psi);

  std::size_t registers() const { return registers_; }
  std::size_t dim() const { return dim_; }
  std::size_t total_dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  regops::Layout layout() const { return {registers_, dim_}; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

 private:
  std::size_t registers_;
  std::size_t dim_;
  Eigen::MatrixXcd matrix_;
};

using QuantumState = std::variant<PureState, DensityState>;

std::size_t registers_of(const QuantumState& s);
std::size_t dim_of(const QuantumState& s);
DensityState to_density(const QuantumState& s);

/// Hardware imperfections. Visibility scales the
/// interference term of every core circuit; state_fidelity_mix f replaces
/// each register's state by f*rho + (1-f)*(maximally mixed on span{G}).
struct NoiseSpec {
  double visibility = 1.0;
  double state_fidelity_mix = 1.0;

  void validate() const;
  bool ideal() const { return visibility == 1.0 && state_fidelity_mix == 1.0; }
};

/// Control-qubit outcome probabilities and the normalized register states
/// after each outcome (empty when that outcome has probability zero).
struct CoreOutcome {
  double p0 = 0.0;
  double p1 = 0.0;
  std::optional<QuantumState> post0;
  std::optional<QuantumState> post1;
};

struct SpanCheckOutcome {
  double p_pass = 0.0;
  double p_fail = 0.0;
  std::optional<QuantumState> post_pass;
  std::optional<QuantumState> post_fail;
  /// True when the check passes with certainty up to the tolerance.
  bool certain_pass = false;
};

/// Uniform superposition over the coset alpha*S, on one register.
PureState coset_proof_state(const Subgroup& subgroup, Element alpha, std::size_t junk_dims = 0);

/// Permutation matrix of right multiplication |a> -> |a g>, identity on junk.
Eigen::MatrixXd right_mult_unitary(const FiniteGroup& group, Element g, std::size_t junk_dims = 0);

/// Hadamard / controlled-M(g) / Hadamard on a fresh control qubit, then a
/// control measurement. Noisy runs return density-matrix post-states.
CoreOutcome core_circuit(const QuantumState& state, std::size_t target, const FiniteGroup& group,
                         Element g, const std::optional<NoiseSpec>& noise = std::nullopt);

/// p(g) = (1 - sum_a Re(conj(b_a) b_{a g^{-1}})) / 2 for a single register.
double core_probability_closed_form(const PureState& state, const FiniteGroup& group, Element g);

/// Projective measurement {P_G, I - P_G} on one register.
SpanCheckOutcome span_check(const QuantumState& state, std::size_t reg, const FiniteGroup& group,
                            double tol = kPureTolerance);

/// The state_fidelity_mix channel on every register.
DensityState apply_noise(const DensityState& state, const NoiseSpec& noise, const FiniteGroup& group);
/// The state_fidelity_mix channel on one register.
DensityState apply_noise(const DensityState& state, const NoiseSpec& noise, const FiniteGroup& group,
                         std::size_t reg);

/// <psi| rho |psi>.
double fidelity(const DensityState& rho, const PureState& psi);

nlohmann::json to_json(const PureState& s);
PureState pure_state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DensityState& s);
DensityState density_state_from_json(const nlohmann::json& j);

}  // namespace gnm
