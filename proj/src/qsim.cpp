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

#include "gnm/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

// Below this a measurement branch is treated as impossible and gets no
// post-measurement state.
constexpr double kBranchFloor = 1e-14;

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

void check_outcome_sum(double p0, double p1) {
  if (std::abs(p0 + p1 - 1.0) > kPureTolerance) {
    throw std::logic_error("core circuit outcome probabilities do not sum to one: " +
                           std::to_string(p0 + p1));
  }
  if (p0 < -kPureTolerance || p1 < -kPureTolerance) {
    throw std::logic_error("negative core circuit outcome probability");
  }
}

Eigen::MatrixXd core_kraus_matrix(const FiniteGroup& group, Element g, std::size_t dim, int outcome) {
  const std::size_t junk = dim - group.order();
  const Eigen::MatrixXd M = right_mult_unitary(group, g, junk);
  const double sign = outcome == 0 ? 1.0 : -1.0;
  return 0.5 * (Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) +
                sign * M);
}

Eigen::MatrixXd span_projector(std::size_t group_order, std::size_t dim, bool span) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    if ((a < group_order) == span) P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = 1.0;
  }
  return P;
}

void check_register_dim(std::size_t dim, const FiniteGroup& group) {
  if (dim < group.order()) {
    throw std::invalid_argument("register dimension " + std::to_string(dim) +
                                " is smaller than the group order " + std::to_string(group.order()));
  }
}

}  // namespace

std::size_t default_dim_cap() {
  if (const char* env = std::getenv("GNM_DIM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultDimCap;
}

std::size_t checked_joint_dim(std::size_t dim, std::size_t registers, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < registers; ++i) {
    if (dim != 0 && total > cap / dim) {
      throw TooLargeForExact("joint dimension " + std::to_string(dim) + "^" + std::to_string(registers) +
                             " exceeds the cap " + std::to_string(cap));
    }
    total *= dim;
  }
  if (total > cap) {
    throw TooLargeForExact("joint dimension " + std::to_string(total) + " exceeds the cap " +
                           std::to_string(cap));
  }
  return total;
}

// ---------------------------------------------------------------------------
// PureState / DensityState

PureState::PureState(std::size_t registers, std::size_t dim, Eigen::VectorXcd amplitudes)
    : registers_(registers), dim_(dim), amplitudes_(std::move(amplitudes)) {
  if (registers_ == 0 || dim_ == 0) throw std::invalid_argument("state needs >= 1 register of dim >= 1");
  const std::size_t expected = regops::Layout{registers_, dim_}.total();
  if (static_cast<std::size_t>(amplitudes_.size()) != expected) {
    throw std::invalid_argument("amplitude vector has length " + std::to_string(amplitudes_.size()) +
                                ", expected " + std::to_string(expected));
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kPureTolerance) {
    throw std::invalid_argument("state is not normalized (squared norm " + std::to_string(norm2) + ")");
  }
}

PureState PureState::normalized(std::size_t registers, std::size_t dim, Eigen::VectorXcd amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  amplitudes /= n;
  return PureState(registers, dim, std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t label) {
  if (label >= dim) throw std::out_of_range("basis label out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(label)] = 1.0;
  return PureState(1, dim, std::move(v));
}

PureState PureState::product(const std::vector<PureState>& factors) {
  if (factors.empty()) throw std::invalid_argument("empty tensor product");
  const std::size_t dim = factors.front().dim();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1);
  std::size_t registers = 0;
  for (const auto& f : factors) {
    if (f.dim() != dim) throw std::invalid_argument("tensor factors have different register dims");
    Eigen::VectorXcd next(acc.size() * f.amplitudes().size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
      next.segment(i * f.amplitudes().size(), f.amplitudes().size()) = acc[i] * f.amplitudes();
    }
    acc = std::move(next);
    registers += f.registers();
  }
  return PureState::normalized(registers, dim, std::move(acc));
}

PureState PureState::tensor_power(std::size_t m) const {
  return product(std::vector<PureState>(m, *this));
}

DensityState::DensityState(std::size_t registers, std::size_t dim, Eigen::MatrixXcd matrix)
    : registers_(registers), dim_(dim), matrix_(std::move(matrix)) {
  if (registers_ == 0 || dim_ == 0) throw std::invalid_argument("state needs >= 1 register of dim >= 1");
  const auto expected = static_cast<Eigen::Index>(regops::Layout{registers_, dim_}.total());
  if (matrix_.rows() != expected || matrix_.cols() != expected) {
    throw std::invalid_argument("density matrix has the wrong shape");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > kHermitianTolerance) {
    throw std::invalid_argument("density matrix trace is not one");
  }
  if (expected <= 512) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
      throw std::invalid_argument("density matrix is not positive semidefinite");
    }
  }
}

DensityState DensityState::from_pure(const PureState& psi) {
  return DensityState(psi.registers(), psi.dim(), psi.amplitudes() * psi.amplitudes().adjoint());
}

std::size_t registers_of(const QuantumState& s) {
  return std::visit([](const auto& x) { return x.registers(); }, s);
}

std::size_t dim_of(const QuantumState& s) {
  return std::visit([](const auto& x) { return x.dim(); }, s);
}

DensityState to_density(const QuantumState& s) {
  if (const auto* p = std::get_if<PureState>(&s)) return DensityState::from_pure(*p);
  return std::get<DensityState>(s);
}

void NoiseSpec::validate() const {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw std::invalid_argument("visibility must lie in [0, 1]");
  if (!(state_fidelity_mix >= 0.0 && state_fidelity_mix <= 1.0)) {
    throw std::invalid_argument("state_fidelity_mix must lie in [0, 1]");
  }
}

// ---------------------------------------------------------------------------
// Operations

PureState coset_proof_state(const Subgroup& subgroup, Element alpha, std::size_t junk_dims) {
  const FiniteGroup& G = subgroup.parent();
  if (!G.valid(alpha)) throw std::out_of_range("coset representative out of range");
  const std::size_t dim = G.order() + junk_dims;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  const double amp = 1.0 / std::sqrt(static_cast<double>(subgroup.size()));
  for (Element s : subgroup.elements()) v[G.mult(alpha, s).index] = amp;
  return PureState::normalized(1, dim, std::move(v));
}

Eigen::MatrixXd right_mult_unitary(const FiniteGroup& group, Element g, std::size_t junk_dims) {
  if (!group.valid(g)) throw std::out_of_range("group element out of range");
  const std::size_t dim = group.order() + junk_dims;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    const std::size_t to = a < group.order() ? group.mult(Element(static_cast<std::uint32_t>(a)), g).index : a;
    M(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(a)) = 1.0;
  }
  return M;
}

CoreOutcome core_circuit(const QuantumState& state, std::size_t target, const FiniteGroup& group,
                         Element g, const std::optional<NoiseSpec>& noise) {
  const std::size_t m = registers_of(state);
  const std::size_t dim = dim_of(state);
  if (target >= m) throw std::out_of_range("target register out of range");
  if (!group.valid(g)) throw std::out_of_range("group element out of range");
  check_register_dim(dim, group);
  if (noise) noise->validate();
  const regops::Layout layout{m, dim};
  CoreOutcome out;

  const bool noisy = noise && !noise->ideal();
  if (!noisy) {
    if (const auto* psi = std::get_if<PureState>(&state)) {
      Eigen::VectorXcd k0 = psi->amplitudes();
      Eigen::VectorXcd k1 = psi->amplitudes();
      regops::core_kraus(layout, target, group, g, 0, k0);
      regops::core_kraus(layout, target, group, g, 1, k1);
      const double p0 = k0.squaredNorm();
      const double p1 = k1.squaredNorm();
      check_outcome_sum(p0, p1);
      out.p0 = clamp_probability(p0);
      out.p1 = clamp_probability(p1);
      if (p0 > kBranchFloor) out.post0 = PureState::normalized(m, dim, std::move(k0));
      if (p1 > kBranchFloor) out.post1 = PureState::normalized(m, dim, std::move(k1));
      return out;
    }
  }

  DensityState rho = to_density(state);
  if (noisy && noise->state_fidelity_mix < 1.0) rho = apply_noise(rho, *noise, group, target);
  const double v = noisy ? noise->visibility : 1.0;
  Eigen::MatrixXcd branch[2];
  double p[2];
  for (int k = 0; k < 2; ++k) {
    Eigen::MatrixXcd sigma = rho.matrix();
    regops::conjugate(layout, target, core_kraus_matrix(group, g, dim, k), sigma);
    branch[k] = v * sigma + 0.5 * (1.0 - v) * rho.matrix();
    p[k] = branch[k].trace().real();
  }
  check_outcome_sum(p[0], p[1]);
  out.p0 = clamp_probability(p[0]);
  out.p1 = clamp_probability(p[1]);
  for (int k = 0; k < 2; ++k) {
    if (p[k] <= kBranchFloor) continue;
    Eigen::MatrixXcd normalized = branch[k] / p[k];
    normalized = 0.5 * (normalized + normalized.adjoint()).eval();
    (k == 0 ? out.post0 : out.post1) = DensityState(m, dim, std::move(normalized));
  }
  return out;
}

double core_probability_closed_form(const PureState& state, const FiniteGroup& group, Element g) {
  if (state.registers() != 1) throw std::invalid_argument("closed form needs a single-register state");
  check_register_dim(state.dim(), group);
  const auto& beta = state.amplitudes();
  const Element ginv = group.inverse(g);
  double overlap = 0.0;
  for (std::size_t a = 0; a < state.dim(); ++a) {
    const std::size_t partner =
        a < group.order() ? group.mult(Element(static_cast<std::uint32_t>(a)), ginv).index : a;
    overlap += (std::conj(beta[static_cast<Eigen::Index>(a)]) * beta[static_cast<Eigen::Index>(partner)]).real();
  }
  return 0.5 * (1.0 - overlap);
}

SpanCheckOutcome span_check(const QuantumState& state, std::size_t reg, const FiniteGroup& group,
                            double tol) {
  const std::size_t m = registers_of(state);
  const std::size_t dim = dim_of(state);
  if (reg >= m) throw std::out_of_range("register out of range");
  check_register_dim(dim, group);
  const regops::Layout layout{m, dim};
  SpanCheckOutcome out;

  if (const auto* psi = std::get_if<PureState>(&state)) {
    Eigen::VectorXcd pass = psi->amplitudes();
    Eigen::VectorXcd fail = psi->amplitudes();
    regops::project_span(layout, reg, group.order(), true, pass);
    regops::project_span(layout, reg, group.order(), false, fail);
    out.p_pass = clamp_probability(pass.squaredNorm());
    out.p_fail = clamp_probability(fail.squaredNorm());
    if (out.p_pass > kBranchFloor) out.post_pass = PureState::normalized(m, dim, std::move(pass));
    if (out.p_fail > kBranchFloor) out.post_fail = PureState::normalized(m, dim, std::move(fail));
  } else {
    const auto& rho = std::get<DensityState>(state);
    for (bool span : {true, false}) {
      Eigen::MatrixXcd sigma = rho.matrix();
      regops::conjugate(layout, reg, span_projector(group.order(), dim, span), sigma);
      const double p = clamp_probability(sigma.trace().real());
      (span ? out.p_pass : out.p_fail) = p;
      if (p > kBranchFloor) (span ? out.post_pass : out.post_fail) = DensityState(m, dim, sigma / p);
    }
  }
  out.certain_pass = out.p_fail <= tol;
  return out;
}

DensityState apply_noise(const DensityState& state, const NoiseSpec& noise, const FiniteGroup& group,
                         std::size_t reg) {
  noise.validate();
  const std::size_t m = state.registers();
  const std::size_t D = state.dim();
  if (reg >= m) throw std::out_of_range("register out of range");
  check_register_dim(D, group);
  const double f = noise.state_fidelity_mix;
  if (f == 1.0) return state;

  const regops::Layout layout{m, D};
  const std::size_t N = group.order();
  const std::size_t stride = layout.stride(reg);
  const std::size_t T = layout.total();
  const std::size_t R = T / D;
  const auto& rho = state.matrix();
  auto reduced_index = [&](std::size_t i) { return (i / (stride * D)) * stride + i % stride; };

  // Partial trace of P rho P over the register.
  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(R));
  for (std::size_t i = 0; i < T; ++i) {
    if (layout.label(i, reg) >= N) continue;
    for (std::size_t j = 0; j < T; ++j) {
      if (layout.label(j, reg) != layout.label(i, reg)) continue;
      reduced(static_cast<Eigen::Index>(reduced_index(i)), static_cast<Eigen::Index>(reduced_index(j))) +=
          rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }

  Eigen::MatrixXcd out = f * rho;
  for (std::size_t i = 0; i < T; ++i) {
    const std::size_t a = layout.label(i, reg);
    for (std::size_t j = 0; j < T; ++j) {
      const std::size_t b = layout.label(j, reg);
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (a < N && b < N) {
        if (a == b) {
          out(ii, jj) += (1.0 - f) / static_cast<double>(N) *
                         reduced(static_cast<Eigen::Index>(reduced_index(i)),
                                 static_cast<Eigen::Index>(reduced_index(j)));
        }
      } else if (a >= N && b >= N) {
        out(ii, jj) += (1.0 - f) * rho(ii, jj);
      }
    }
  }
  return DensityState(m, D, std::move(out));
}

DensityState apply_noise(const DensityState& state, const NoiseSpec& noise, const FiniteGroup& group) {
  DensityState out = state;
  for (std::size_t r = 0; r < state.registers(); ++r) out = apply_noise(out, noise, group, r);
  return out;
}

double fidelity(const DensityState& rho, const PureState& psi) {
  if (rho.total_dim() != psi.total_dim()) throw std::invalid_argument("dimension mismatch");
  return (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0).real();
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const PureState& s) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    amps.push_back({s.amplitudes()[i].real(), s.amplitudes()[i].imag()});
  }
  return {{"registers", s.registers()}, {"dim", s.dim()}, {"amplitudes", amps}};
}

PureState pure_state_from_json(const nlohmann::json& j) {
  const auto registers = j.at("registers").get<std::size_t>();
  const auto dim = j.at("dim").get<std::size_t>();
  const auto& amps = j.at("amplitudes");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto& a = amps[i];
    v[static_cast<Eigen::Index>(i)] =
        a.is_array() ? std::complex<double>(a.at(0).get<double>(), a.at(1).get<double>())
                     : std::complex<double>(a.get<double>(), 0.0);
  }
  return PureState(registers, dim, std::move(v));
}

nlohmann::json to_json(const DensityState& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < s.matrix().rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < s.matrix().cols(); ++c) {
      row.push_back({s.matrix()(r, c).real(), s.matrix()(r, c).imag()});
    }
    rows.push_back(row);
  }
  return {{"registers", s.registers()}, {"dim", s.dim()}, {"matrix", rows}};
}

DensityState density_state_from_json(const nlohmann::json& j) {
  const auto registers = j.at("registers").get<std::size_t>();
  const auto dim = j.at("dim").get<std::size_t>();
  const auto& rows = j.at("matrix");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != n) throw std::invalid_argument("density matrix is not square");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& a = row[static_cast<std::size_t>(c)];
      m(r, c) = a.is_array() ? std::complex<double>(a.at(0).get<double>(), a.at(1).get<double>())
                             : std::complex<double>(a.get<double>(), 0.0);
    }
  }
  return DensityState(registers, dim, std::move(m));
}

}  // namespace gnm
