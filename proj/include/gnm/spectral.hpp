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
#include <string>

#include <Eigen/Dense>

namespace gnm {

enum class EigenMethod { Auto, Dense, Lanczos };

std::string to_string(EigenMethod method);

/// Auto picks the dense solver up to this dimension and Lanczos above it.
inline constexpr std::size_t kDenseAutoLimit = 1024;
/// The dense solver refuses larger matrices.
inline constexpr std::size_t kDenseEigenLimit = 4096;
inline constexpr double kEigenTolerance = 1e-10;

struct EigenPair {
  double value = 0.0;
  /// Unit norm.
  Eigen::VectorXd vector;
  EigenMethod method = EigenMethod::Dense;
  std::size_t iterations = 0;
  /// ||A v - value v||.
  double residual = 0.0;
};

/// y <- A x for a real symmetric A.
using SymmetricMap = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

EigenPair largest_eigenpair_dense(const Eigen::MatrixXd& a);

/// Lanczos with full reorthogonalization from a seeded random start. Stops
/// when the Ritz residual of the top pair drops below tol, or on an exact
/// invariant subspace.
EigenPair largest_eigenpair_lanczos(const SymmetricMap& apply, std::size_t dim,
                                    double tol = kEigenTolerance, std::size_t max_iterations = 400,
                                    std::uint64_t seed = 1);

}  // namespace gnm
