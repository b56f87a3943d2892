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

#include "gnm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gnm/errors.hpp"
#include "gnm/rng.hpp"

namespace gnm {

std::string to_string(EigenMethod method) {
  switch (method) {
    case EigenMethod::Auto:
      return "auto";
    case EigenMethod::Dense:
      return "dense";
    case EigenMethod::Lanczos:
      return "lanczos";
  }
  return "unknown";
}

EigenPair largest_eigenpair_dense(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("matrix must be square and nonempty");
  if (static_cast<std::size_t>(a.rows()) > kDenseEigenLimit) {
    throw TooLargeForExact("dense eigensolver limited to dimension " + std::to_string(kDenseEigenLimit));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver did not converge");
  EigenPair out;
  const Eigen::Index top = a.rows() - 1;
  out.value = es.eigenvalues()(top);
  out.vector = es.eigenvectors().col(top);
  out.method = EigenMethod::Dense;
  out.residual = (a * out.vector - out.value * out.vector).norm();
  return out;
}

EigenPair largest_eigenpair_lanczos(const SymmetricMap& apply, std::size_t dim, double tol,
                                    std::size_t max_iterations, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("empty operator");
  const auto n = static_cast<Eigen::Index>(dim);
  const std::size_t k_max = std::min(dim, max_iterations);

  Philox4x32 rng(seed, 0x1a2c705);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = rng.uniform01() - 0.5;
  q.normalize();

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd w(n);
  EigenPair out;
  out.method = EigenMethod::Lanczos;

  for (std::size_t k = 0; k < k_max; ++k) {
    basis.push_back(q);
    apply(q, w);
    const double a = q.dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) w -= b.dot(w) * b;
    }
    const double b = w.norm();

    const auto size = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < size) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double theta = es.eigenvalues()(size - 1);
    const double ritz_residual = std::abs(b * es.eigenvectors()(size - 1, size - 1));
    const bool invariant = b <= 1e-14 * std::max(1.0, std::abs(theta));

    if (ritz_residual <= tol * std::max(1.0, std::abs(theta)) || invariant || k + 1 == k_max) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < size; ++i) v += es.eigenvectors()(i, size - 1) * basis[static_cast<std::size_t>(i)];
      v.normalize();
      Eigen::VectorXd av(n);
      apply(v, av);
      out.value = v.dot(av);
      out.vector = std::move(v);
      out.residual = (av - out.value * out.vector).norm();
      out.iterations = k + 1;
      return out;
    }
    beta.push_back(b);
    q = w / b;
  }
  throw std::logic_error("unreachable");
}

}  // namespace gnm
