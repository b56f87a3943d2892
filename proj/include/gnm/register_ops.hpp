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

// Kernels that act with a single-register operator on a joint state of m
// registers of dimension D each. Register 0 is the most significant digit of
// the joint index, so the joint space is H_0 (x) H_1 (x) ... (x) H_{m-1}.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gnm/group.hpp"

namespace gnm::regops {

struct Layout {
  std::size_t registers = 1;
  std::size_t dim = 1;

  std::size_t total() const {
    std::size_t t = 1;
    for (std::size_t i = 0; i < registers; ++i) t *= dim;
    return t;
  }
  /// Distance between consecutive labels of register r in the joint index.
  std::size_t stride(std::size_t r) const {
    std::size_t s = 1;
    for (std::size_t i = r + 1; i < registers; ++i) s *= dim;
    return s;
  }
  std::size_t label(std::size_t index, std::size_t r) const { return (index / stride(r)) % dim; }
};

/// v <- (op acting on register r) v. Works for real or complex vectors and
/// operators, including column blocks of a matrix.
template <class Op, class Vec>
void apply(const Layout& layout, std::size_t r, const Op& op, Vec&& v) {
  const std::size_t D = layout.dim;
  const std::size_t stride = layout.stride(r);
  const std::size_t block = stride * D;
  const std::size_t total = layout.total();
  using Scalar = typename std::decay_t<Vec>::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fiber(D), out(D);
  for (std::size_t outer = 0; outer < total; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (std::size_t a = 0; a < D; ++a) fiber[a] = v[base + a * stride];
      out.noalias() = op.template cast<Scalar>() * fiber;
      for (std::size_t a = 0; a < D; ++a) v[base + a * stride] = out[a];
    }
  }
}

/// rho <- op_r rho op_r^dagger.
template <class Op>
void conjugate(const Layout& layout, std::size_t r, const Op& op, Eigen::MatrixXcd& rho) {
  for (Eigen::Index c = 0; c < rho.cols(); ++c) apply(layout, r, op, rho.col(c));
  rho.adjointInPlace();
  for (Eigen::Index c = 0; c < rho.cols(); ++c) apply(layout, r, op, rho.col(c));
  rho.adjointInPlace();
}

/// Core-circuit Kraus operator (I + (-1)^outcome M(g)) / 2 on register r,
/// where M(g)|a> = |a g> on group labels and acts as identity on junk labels.
template <class Vec>
void core_kraus(const Layout& layout, std::size_t r, const FiniteGroup& group, Element g,
                int outcome, Vec&& v) {
  const std::size_t D = layout.dim;
  const std::size_t N = group.order();
  const std::size_t stride = layout.stride(r);
  const std::size_t block = stride * D;
  const std::size_t total = layout.total();
  const Element ginv = group.inverse(g);
  const double sign = outcome == 0 ? 1.0 : -1.0;
  // (M v)[b] = v[b g^{-1}]
  std::vector<std::size_t> src(D);
  for (std::size_t b = 0; b < D; ++b) {
    src[b] = b < N ? group.mult(Element(static_cast<std::uint32_t>(b)), ginv).index : b;
  }
  using Scalar = typename std::decay_t<Vec>::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fiber(D);
  for (std::size_t outer = 0; outer < total; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (std::size_t a = 0; a < D; ++a) fiber[a] = v[base + a * stride];
      for (std::size_t b = 0; b < D; ++b) {
        v[base + b * stride] = 0.5 * (fiber[b] + sign * fiber[src[b]]);
      }
    }
  }
}

/// Zeroes the junk (keep_span) or the group-label (!keep_span) part of
/// register r.
template <class Vec>
void project_span(const Layout& layout, std::size_t r, std::size_t group_order, bool keep_span,
                  Vec&& v) {
  if (group_order >= layout.dim && keep_span) return;
  const std::size_t total = layout.total();
  for (std::size_t i = 0; i < total; ++i) {
    const bool in_span = layout.label(i, r) < group_order;
    if (in_span != keep_span) v[i] = 0.0;
  }
}

}  // namespace gnm::regops
