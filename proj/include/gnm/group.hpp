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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gnm {

/// Index of an element inside its parent group, in [0, order).
struct Element {
  std::uint32_t index = 0;

  constexpr Element() = default;
  constexpr explicit Element(std::uint32_t i) : index(i) {}
  constexpr auto operator<=>(const Element&) const = default;
};

inline constexpr std::size_t kDefaultMaxGroupOrder = 4096;

/// A finite group stored as a validated multiplication table.
///
/// Row a, column b of the table holds a*b. Instances are immutable after
/// construction and may be shared freely between threads.
class FiniteGroup {
 public:
  using Table = std::vector<std::vector<std::uint32_t>>;

  /// Validates the table (closure, Latin square, identity, associativity,
  /// inverses, in that order) and throws NotAGroup naming the first
  /// violated axiom. Associativity is exhaustive for order <= 64 and checked
  /// on 10^4 pseudo-random triples above that.
  static FiniteGroup from_table(const Table& table,
                                std::vector<std::string> names = {},
                                std::size_t max_order = kDefaultMaxGroupOrder);

  std::size_t order() const { return order_; }
  Element identity() const { return identity_; }

  Element mult(Element a, Element b) const {
    return Element(table_[static_cast<std::size_t>(a.index) * order_ + b.index]);
  }
  Element inverse(Element a) const { return Element(inverse_[a.index]); }
  std::uint32_t element_order(Element a) const { return orders_[a.index]; }
  Element power(Element a, std::uint64_t k) const;

  bool valid(Element a) const { return a.index < order_; }
  const std::string& name(Element a) const { return names_.at(a.index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<Element> find(std::string_view name) const;
  /// Like find() but throws std::invalid_argument for unknown names.
  Element element(std::string_view name) const;

  /// n = ceil(log2 N): number of qubits of one label register.
  unsigned label_bits() const { return label_bits_; }
  /// 2^{-2n}, the sampler deviation window used by the test channel.
  double uniformity_window() const;

  /// FNV-1a hash of the multiplication table.
  std::uint64_t fingerprint() const;

  std::span<const std::uint32_t> table() const { return table_; }
  Table table_rows() const;
  std::vector<Element> elements() const;

 private:
  FiniteGroup() = default;

  std::size_t order_ = 0;
  Element identity_;
  unsigned label_bits_ = 0;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> inverse_;
  std::vector<std::uint32_t> orders_;
  std::vector<std::string> names_;
};

FiniteGroup build_from_table(const FiniteGroup::Table& table,
                             std::vector<std::string> names = {});

/// The Klein four-group <A, B | A^2 = B^2 = E, AB = BA> with elements
/// indexed E, A, B, AB.
FiniteGroup build_klein();

/// Cyclic group of order k with names e, a, a^2, ...
FiniteGroup build_cyclic(std::size_t k);

/// A permutation given as disjoint cycles over points [0, degree).
using CycleNotation = std::vector<std::vector<std::uint32_t>>;

/// Cayley enumeration of the group generated by the given permutations.
/// Elements are numbered in breadth-first order from the identity and named
/// by their shortest word in the generator names (identity is "e").
FiniteGroup build_from_permutations(const std::vector<CycleNotation>& generators,
                                    std::vector<std::string> generator_names = {},
                                    std::size_t max_order = kDefaultMaxGroupOrder);

std::uint32_t element_order(const FiniteGroup& group, Element g);

/// A subgroup given by generators, with its enumerated closure and its left
/// cosets alpha*S.
class Subgroup {
 public:
  const FiniteGroup& parent() const { return *parent_; }
  const std::shared_ptr<const FiniteGroup>& parent_ptr() const { return parent_; }
  const std::vector<Element>& generators() const { return generators_; }
  /// Sorted by index.
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool contains(Element x) const { return member_.at(x.index) != 0; }

  /// Coset blocks alpha*S, each sorted, ordered by their minimal element.
  const std::vector<std::vector<Element>>& cosets() const { return cosets_; }
  std::size_t coset_index(Element x) const { return coset_of_.at(x.index); }
  std::size_t index_in_subgroup(Element s) const;

 private:
  friend Subgroup subgroup_closure(std::shared_ptr<const FiniteGroup>,
                                   std::span<const Element>);
  std::shared_ptr<const FiniteGroup> parent_;
  std::vector<Element> generators_;
  std::vector<Element> elements_;
  std::vector<char> member_;
  std::vector<std::vector<Element>> cosets_;
  std::vector<std::size_t> coset_of_;
};

/// Smallest subgroup containing the generators. An empty list yields {e}.
Subgroup subgroup_closure(std::shared_ptr<const FiniteGroup> group,
                          std::span<const Element> generators);

Subgroup subgroup_closure(std::shared_ptr<const FiniteGroup> group,
                          std::initializer_list<Element> generators);

}  // namespace gnm
