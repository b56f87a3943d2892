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

// Random generators for property tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "gnm/qsim.hpp"
#include "gnm/rng.hpp"

namespace gnm::testing {

inline double normal(Philox4x32& rng) {
  const double u1 = std::max(rng.uniform01(), 1e-300);
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Haar-random vector of the given length.
inline Eigen::VectorXcd random_vector(std::size_t n, Philox4x32& rng) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = {normal(rng), normal(rng)};
  return v.normalized();
}

inline PureState random_pure(std::size_t registers, std::size_t dim, Philox4x32& rng) {
  return PureState::normalized(registers, dim, random_vector(regops::Layout{registers, dim}.total(), rng));
}

/// Random mixture of `rank` Haar-random pure states with random weights.
inline DensityState random_density(std::size_t registers, std::size_t dim, std::size_t rank, Philox4x32& rng) {
  const std::size_t total = regops::Layout{registers, dim}.total();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  double mass = 0.0;
  for (std::size_t k = 0; k < rank; ++k) {
    const double w = rng.uniform01() + 1e-3;
    const Eigen::VectorXcd v = random_vector(total, rng);
    rho += w * v * v.adjoint();
    mass += w;
  }
  rho /= mass;
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return DensityState(registers, dim, rho);
}

/// A state close to `psi`: psi plus a small random perturbation.
inline PureState perturbed(const PureState& psi, double scale, Philox4x32& rng) {
  Eigen::VectorXcd v = psi.amplitudes() + scale * random_vector(psi.total_dim(), rng);
  return PureState::normalized(psi.registers(), psi.dim(), v);
}

}  // namespace gnm::testing
