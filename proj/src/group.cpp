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

#include "gnm/group.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

#include "gnm/errors.hpp"

namespace gnm {

namespace {

constexpr std::size_t kExhaustiveAssociativityLimit = 64;
constexpr int kRandomTriples = 10000;

// xorshift-style mixer, only used to pick associativity triples
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

unsigned ceil_log2(std::size_t n) {
  return n <= 1 ? 0u : static_cast<unsigned>(std::bit_width(n - 1));
}

}  // namespace

FiniteGroup FiniteGroup::from_table(const Table& rows, std::vector<std::string> names,
                                    std::size_t max_order) {
  const std::size_t n = rows.size();
  if (n == 0) throw NotAGroup("table is empty");
  if (n > max_order) {
    throw GroupTooLarge("group order " + std::to_string(n) + " exceeds maximum " +
                        std::to_string(max_order));
  }
  FiniteGroup g;
  g.order_ = n;
  g.table_.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    if (rows[a].size() != n) {
      throw NotAGroup("table is not square (row " + std::to_string(a) + " has " +
                      std::to_string(rows[a].size()) + " entries)");
    }
    for (std::uint32_t v : rows[a]) {
      if (v >= n) {
        throw NotAGroup("closure: entry " + std::to_string(v) + " in row " +
                        std::to_string(a) + " is not an element index");
      }
      g.table_.push_back(v);
    }
  }
  auto at = [&](std::size_t a, std::size_t b) { return g.table_[a * n + b]; };

  std::vector<char> seen(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t b = 0; b < n; ++b) {
      if (seen[at(a, b)]++) {
        throw NotAGroup("row " + std::to_string(a) + " is not a permutation");
      }
    }
  }
  for (std::size_t b = 0; b < n; ++b) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t a = 0; a < n; ++a) {
      if (seen[at(a, b)]++) {
        throw NotAGroup("column " + std::to_string(b) + " is not a permutation");
      }
    }
  }

  std::optional<std::size_t> identity;
  for (std::size_t e = 0; e < n && !identity; ++e) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) ok = at(e, a) == a && at(a, e) == a;
    if (ok) identity = e;
  }
  if (!identity) throw NotAGroup("identity: no two-sided identity element");
  g.identity_ = Element(static_cast<std::uint32_t>(*identity));

  auto check_triple = [&](std::size_t a, std::size_t b, std::size_t c) {
    if (at(at(a, b), c) != at(a, at(b, c))) {
      throw NotAGroup("associativity: (" + std::to_string(a) + "*" + std::to_string(b) +
                      ")*" + std::to_string(c) + " != " + std::to_string(a) + "*(" +
                      std::to_string(b) + "*" + std::to_string(c) + ")");
    }
  };
  if (n <= kExhaustiveAssociativityLimit) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) check_triple(a, b, c);
  } else {
    std::uint64_t state = 0x5EEDULL ^ n;
    for (int t = 0; t < kRandomTriples; ++t) {
      check_triple(splitmix64(state) % n, splitmix64(state) % n, splitmix64(state) % n);
    }
  }

  g.inverse_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    std::optional<std::size_t> inv;
    for (std::size_t b = 0; b < n; ++b) {
      if (at(a, b) == *identity) {
        inv = b;
        break;
      }
    }
    if (!inv || at(*inv, a) != *identity) {
      throw NotAGroup("inverse: element " + std::to_string(a) + " has no two-sided inverse");
    }
    g.inverse_[a] = static_cast<std::uint32_t>(*inv);
  }

  g.orders_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t x = a;
    std::uint32_t k = 1;
    while (x != *identity) {
      x = at(x, a);
      ++k;
    }
    g.orders_[a] = k;
  }

  if (names.empty()) {
    names.reserve(n);
    for (std::size_t a = 0; a < n; ++a) names.push_back(std::to_string(a));
  }
  if (names.size() != n) {
    throw std::invalid_argument("expected " + std::to_string(n) + " element names, got " +
                                std::to_string(names.size()));
  }
  {
    auto sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("element names must be distinct");
    }
  }
  g.names_ = std::move(names);
  g.label_bits_ = ceil_log2(n);
  return g;
}

Element FiniteGroup::power(Element a, std::uint64_t k) const {
  Element result = identity_;
  Element base = a;
  while (k) {
    if (k & 1) result = mult(result, base);
    base = mult(base, base);
    k >>= 1;
  }
  return result;
}

std::optional<Element> FiniteGroup::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return Element(static_cast<std::uint32_t>(i));
  }
  return std::nullopt;
}

Element FiniteGroup::element(std::string_view name) const {
  if (auto e = find(name)) return *e;
  throw std::invalid_argument("unknown group element '" + std::string(name) + "'");
}

double FiniteGroup::uniformity_window() const {
  return std::ldexp(1.0, -2 * static_cast<int>(label_bits_));
}

std::uint64_t FiniteGroup::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint32_t>(order_));
  for (std::uint32_t v : table_) mix(v);
  return h;
}

FiniteGroup::Table FiniteGroup::table_rows() const {
  Table rows(order_, std::vector<std::uint32_t>(order_));
  for (std::size_t a = 0; a < order_; ++a)
    for (std::size_t b = 0; b < order_; ++b) rows[a][b] = table_[a * order_ + b];
  return rows;
}

std::vector<Element> FiniteGroup::elements() const {
  std::vector<Element> out;
  out.reserve(order_);
  for (std::size_t i = 0; i < order_; ++i) out.emplace_back(static_cast<std::uint32_t>(i));
  return out;
}

FiniteGroup build_from_table(const FiniteGroup::Table& table, std::vector<std::string> names) {
  return FiniteGroup::from_table(table, std::move(names));
}

FiniteGroup build_klein() {
  // E=0, A=1, B=2, AB=3; multiplication is XOR of the two exponent bits.
  FiniteGroup::Table t(4, std::vector<std::uint32_t>(4));
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = 0; b < 4; ++b) t[a][b] = a ^ b;
  return FiniteGroup::from_table(t, {"E", "A", "B", "AB"});
}

FiniteGroup build_cyclic(std::size_t k) {
  if (k == 0) throw std::invalid_argument("cyclic group order must be positive");
  FiniteGroup::Table t(k, std::vector<std::uint32_t>(k));
  std::vector<std::string> names;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) t[a][b] = static_cast<std::uint32_t>((a + b) % k);
    names.push_back(a == 0 ? "e" : a == 1 ? "a" : "a^" + std::to_string(a));
  }
  return FiniteGroup::from_table(t, std::move(names));
}

FiniteGroup build_from_permutations(const std::vector<CycleNotation>& generators,
                                    std::vector<std::string> generator_names,
                                    std::size_t max_order) {
  using Perm = std::vector<std::uint32_t>;
  std::uint32_t degree = 1;
  for (const auto& gen : generators)
    for (const auto& cycle : gen)
      for (std::uint32_t p : cycle) degree = std::max(degree, p + 1);

  std::vector<Perm> gens;
  for (const auto& gen : generators) {
    Perm images(degree);
    for (std::uint32_t p = 0; p < degree; ++p) images[p] = p;
    std::vector<char> used(degree);
    for (const auto& cycle : gen) {
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        std::uint32_t from = cycle[i];
        if (used[from]++) {
          throw std::invalid_argument("permutation cycles are not disjoint (point " +
                                      std::to_string(from) + ")");
        }
        images[from] = cycle[(i + 1) % cycle.size()];
      }
    }
    gens.push_back(std::move(images));
  }
  if (generator_names.empty()) {
    for (std::size_t i = 0; i < gens.size(); ++i) generator_names.push_back("g" + std::to_string(i));
  }
  if (generator_names.size() != gens.size()) {
    throw std::invalid_argument("generator name count does not match generator count");
  }

  // Composition convention: (p*q)(x) = q(p(x)), i.e. apply p first. This makes
  // right multiplication by a generator the natural BFS step.
  auto compose = [degree](const Perm& p, const Perm& q) {
    Perm r(degree);
    for (std::uint32_t x = 0; x < degree; ++x) r[x] = q[p[x]];
    return r;
  };

  Perm identity(degree);
  for (std::uint32_t p = 0; p < degree; ++p) identity[p] = p;
  std::map<Perm, std::uint32_t> index{{identity, 0}};
  std::vector<Perm> elements{identity};
  std::vector<std::string> names{"e"};
  std::deque<std::uint32_t> queue{0};
  while (!queue.empty()) {
    const std::uint32_t cur = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < gens.size(); ++k) {
      Perm next = compose(elements[cur], gens[k]);
      if (index.count(next)) continue;
      if (elements.size() >= max_order) {
        throw GroupTooLarge("permutation group exceeds maximum order " +
                            std::to_string(max_order));
      }
      const auto id = static_cast<std::uint32_t>(elements.size());
      index.emplace(next, id);
      elements.push_back(std::move(next));
      names.push_back(cur == 0 ? generator_names[k] : names[cur] + "*" + generator_names[k]);
      queue.push_back(id);
    }
  }

  const std::size_t n = elements.size();
  FiniteGroup::Table table(n, std::vector<std::uint32_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a][b] = index.at(compose(elements[a], elements[b]));
  return FiniteGroup::from_table(table, std::move(names), max_order);
}

std::uint32_t element_order(const FiniteGroup& group, Element g) {
  if (!group.valid(g)) throw std::out_of_range("element index out of range");
  return group.element_order(g);
}

std::size_t Subgroup::index_in_subgroup(Element s) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), s);
  if (it == elements_.end() || *it != s) {
    throw std::invalid_argument("element is not in the subgroup");
  }
  return static_cast<std::size_t>(it - elements_.begin());
}

Subgroup subgroup_closure(std::shared_ptr<const FiniteGroup> group,
                          std::span<const Element> generators) {
  if (!group) throw std::invalid_argument("null parent group");
  const FiniteGroup& G = *group;
  const std::size_t n = G.order();
  for (Element g : generators) {
    if (!G.valid(g)) throw std::out_of_range("generator index out of range");
  }

  Subgroup s;
  s.parent_ = group;
  s.generators_.assign(generators.begin(), generators.end());
  s.member_.assign(n, 0);

  // In a finite group the closure under right multiplication by generators
  // already contains all inverses.
  std::vector<Element> frontier{G.identity()};
  s.member_[G.identity().index] = 1;
  while (!frontier.empty()) {
    Element x = frontier.back();
    frontier.pop_back();
    for (Element g : generators) {
      Element y = G.mult(x, g);
      if (!s.member_[y.index]) {
        s.member_[y.index] = 1;
        frontier.push_back(y);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (s.member_[i]) s.elements_.emplace_back(static_cast<std::uint32_t>(i));
  }

  s.coset_of_.assign(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    if (s.coset_of_[a] != n) continue;
    // a is the minimal index of its coset because we scan in index order.
    std::vector<Element> block;
    block.reserve(s.elements_.size());
    for (Element h : s.elements_) block.push_back(G.mult(Element(static_cast<std::uint32_t>(a)), h));
    std::sort(block.begin(), block.end());
    for (Element x : block) s.coset_of_[x.index] = s.cosets_.size();
    s.cosets_.push_back(std::move(block));
  }
  return s;
}

Subgroup subgroup_closure(std::shared_ptr<const FiniteGroup> group,
                          std::initializer_list<Element> generators) {
  return subgroup_closure(std::move(group),
                          std::span<const Element>(generators.begin(), generators.size()));
}

}  // namespace gnm
