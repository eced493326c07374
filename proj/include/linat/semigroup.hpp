#pragma once

// Finite semigroups by multiplication table: ideals, Rees matrix coordinates
// for completely 0-simple semigroups, composition series of groups, wreath
// products, and action-kernel congruences.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linat/common.hpp"

namespace linat {

class FiniteSemigroup {
 public:
  // Empty placeholder (size 0); every real instance comes from a factory.
  FiniteSemigroup() = default;

  // Validates entry range and, when n <= caps().assoc_check, associativity.
  static FiniteSemigroup from_table(std::size_t n, std::vector<std::uint32_t> table,
                                    std::optional<std::uint32_t> zero = std::nullopt,
                                    std::optional<std::uint32_t> identity = std::nullopt,
                                    std::vector<std::string> labels = {});

  std::size_t size() const { return n_; }
  std::uint32_t mul(std::uint32_t i, std::uint32_t j) const { return table_[i * n_ + j]; }
  const std::vector<std::uint32_t>& table() const { return table_; }
  std::optional<std::uint32_t> zero() const { return zero_; }
  std::optional<std::uint32_t> identity() const { return identity_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool associativity_checked() const { return assoc_checked_; }

  // Exhaustive O(n^3) check, regardless of caps.
  bool verify_associativity() const;
  bool is_group() const;
  std::vector<std::uint32_t> idempotents() const;
  std::uint32_t inverse(std::uint32_t g) const;  // groups only
  bool operator==(const FiniteSemigroup& o) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> table_;
  std::optional<std::uint32_t> zero_, identity_;
  std::vector<std::string> labels_;
  bool assoc_checked_ = false;
};

// Closure of generators under an abstract product.  Elements are discovered
// breadth-first, multiplying known elements by generators on the right, so
// indices and words are deterministic.  Words are generator-index sequences.
// The Cayley table is materialized only while the element count stays within
// caps().table; beyond that `semigroup` is left empty (size 0) and only the
// element list is available.
template <typename T>
struct ClosureResult {
  std::vector<T> elements;
  std::vector<std::vector<std::uint32_t>> words;
  FiniteSemigroup semigroup;
};

template <typename T, typename Mul>
ClosureResult<T> closure(const std::vector<T>& generators, Mul mul,
                         std::size_t cap) {
  if (generators.empty()) throw Error("closure of an empty generating set");
  ClosureResult<T> out;
  std::map<T, std::uint32_t> index;
  for (std::uint32_t g = 0; g < generators.size(); ++g) {
    auto [it, fresh] = index.emplace(generators[g], static_cast<std::uint32_t>(out.elements.size()));
    if (fresh) {
      out.elements.push_back(generators[g]);
      out.words.push_back({g});
    }
  }
  for (std::size_t head = 0; head < out.elements.size(); ++head) {
    for (std::uint32_t g = 0; g < generators.size(); ++g) {
      T prod = mul(out.elements[head], generators[g]);
      auto [it, fresh] = index.emplace(prod, static_cast<std::uint32_t>(out.elements.size()));
      if (fresh) {
        if (out.elements.size() >= cap)
          throw CapError("closure exceeds cap of " + std::to_string(cap) + " elements");
        out.elements.push_back(std::move(prod));
        std::vector<std::uint32_t> w = out.words[head];
        w.push_back(g);
        out.words.push_back(std::move(w));
      }
    }
  }
  const std::size_t n = out.elements.size();
  if (n <= caps().table) {
    std::vector<std::uint32_t> table(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        auto it = index.find(mul(out.elements[i], out.elements[j]));
        if (it == index.end()) throw InternalError("closure not closed");
        table[i * n + j] = it->second;
      }
    out.semigroup = FiniteSemigroup::from_table(n, std::move(table));
  }
  return out;
}

// Right-zero semigroup M^r of order m (x * y = y) together with its action by
// constants on the carrier {0..m-1}: a o gamma_j = j.
struct FlipFlop {
  FiniteSemigroup semigroup;
  std::size_t carrier;
  std::vector<std::uint32_t> action;  // action[a * m + j] = j
};
FlipFlop flip_flop(std::size_t m);
// Left-zero twin M^l (x * y = x); exposed for completeness.
FiniteSemigroup left_zero(std::size_t m);

bool is_ideal(const FiniteSemigroup& s, const std::vector<std::uint32_t>& subset);
// {x} together with Gx, xG, GxG: the least ideal containing x.
std::vector<std::uint32_t> principal_ideal(const FiniteSemigroup& s, std::uint32_t x);
// Every two-sided ideal, the empty set included, sorted by (size, elements).
std::vector<std::vector<std::uint32_t>> ideals(const FiniteSemigroup& s);
// Least ideal strictly containing u; ties broken by lexicographically least
// element set.  u may be empty.
std::vector<std::uint32_t> min_ideal_above(const FiniteSemigroup& s,
                                           const std::vector<std::uint32_t>& u);

// Rees quotient by an ideal.  The classes of u collapse to a fresh zero at
// index 0; remaining elements keep their relative order at indices 1..  An
// empty u adjoins a zero to an isomorphic copy of s.
struct ReesQuotient {
  FiniteSemigroup semigroup;
  std::vector<std::uint32_t> old_to_new;  // u-members map to 0
};
ReesQuotient rees_quotient(const FiniteSemigroup& s, const std::vector<std::uint32_t>& u);

bool is_completely_zero_simple(const FiniteSemigroup& s);

// Rees matrix coordinates M0(G; X, Y; P) of a completely 0-simple semigroup:
// nonzero elements are triples (x, g, y) multiplying by
// (x1,g1,y1)(x2,g2,y2) = (x1, g1 * P[y1][x2] * g2, y2), zero if P[y1][x2] = 0.
struct ReesStructure {
  std::size_t x_size = 0, y_size = 0;
  FiniteSemigroup group;                    // the group of a chosen H-class
  std::vector<std::uint32_t> group_elems;   // H-class members, as s-indices
  std::uint32_t group_identity_elem = 0;    // the idempotent e of that H-class
  std::vector<std::uint32_t> row_reps;      // r_x in H(x, y0), as s-indices
  std::vector<std::uint32_t> col_reps;      // q_y in H(x0, y), as s-indices
  // sandwich[y * x_size + x]: 0 for zero, otherwise 1 + group index of q_y r_x
  std::vector<std::uint32_t> sandwich;
  // elem index -> 1 + ((x * |G| + g) * y_size + y), 0 for the zero element
  std::vector<std::uint32_t> elem_code;
  std::uint32_t zero_elem = 0;

  std::uint32_t element_of(std::size_t x, std::uint32_t g, std::size_t y) const;
  // Decomposes a nonzero element; returns (x, g, y).
  void triple_of(std::uint32_t elem, std::size_t& x, std::uint32_t& g, std::size_t& y) const;
  std::uint32_t sandwich_at(std::size_t y, std::size_t x) const {
    return sandwich[y * x_size + x];
  }

  const FiniteSemigroup* source = nullptr;  // not owned; set by rees_structure
};
// Requires is_completely_zero_simple(s).  The group H-class is the one through
// the least-index nonzero idempotent; row/column representatives are the
// least-index members of their H-classes, with the base representatives pinned
// to the idempotent itself so that P[y0][x0] is the identity.
ReesStructure rees_structure(const FiniteSemigroup& s);

// Adjoins a fresh zero at index 0, shifting existing elements up by one.
FiniteSemigroup adjoin_zero(const FiniteSemigroup& s);

// Subsemigroup on the given sorted element subset, reindexed by position.
FiniteSemigroup subsemigroup(const FiniteSemigroup& s, const std::vector<std::uint32_t>& subset);

// Group machinery (brute force; intended for |G| within caps().simple_group).
std::vector<std::vector<std::uint32_t>> subgroups(const FiniteSemigroup& g);
std::vector<std::vector<std::uint32_t>> normal_subgroups(const FiniteSemigroup& g);
std::vector<std::vector<std::uint32_t>> maximal_proper_normal_subgroups(const FiniteSemigroup& g);
bool is_simple_group(const FiniteSemigroup& g);
bool is_normal_in(const FiniteSemigroup& g, const std::vector<std::uint32_t>& subset);

// Strictly descending chain G = S_0 > S_1 > ... > S_k = {e}, every step a
// maximal normal subgroup of its predecessor (element sets of the original
// group).  At each step the lexicographically least candidate is taken.
std::vector<std::vector<std::uint32_t>> composition_series(const FiniteSemigroup& g);

// Quotient by a normal subgroup; cosets are labeled by least member, in
// increasing order of that member.
struct QuotientGroup {
  FiniteSemigroup group;
  std::vector<std::uint32_t> coset_of;   // original index -> coset index
  std::vector<std::uint32_t> coset_rep;  // coset index -> least original index
};
QuotientGroup quotient_group(const FiniteSemigroup& g, const std::vector<std::uint32_t>& normal);

// Wreath semigroup Gamma1 wr^C Gamma2 for a right action of Gamma2 on the
// carrier C given by act[c * |Gamma2| + t].  Elements are pairs (f, t) with
// f : C -> Gamma1, encoded as f-digits little-endian in base |Gamma1| times
// |Gamma2| plus t; the product is
//   (f, t)(f', t') = (c -> f(c) f'(c o t), t t').
struct WreathSemigroup {
  FiniteSemigroup semigroup;
  std::size_t n1 = 0, carrier = 0, n2 = 0;

  std::uint64_t encode(const std::vector<std::uint32_t>& f, std::uint32_t t) const;
  std::uint32_t f_at(std::uint64_t elem, std::size_t c) const;
  std::uint32_t second(std::uint64_t elem) const;
};
WreathSemigroup wreath_semigroup(const FiniteSemigroup& g1, std::size_t carrier,
                                 const std::vector<std::uint32_t>& act,
                                 const FiniteSemigroup& g2, std::size_t cap);

// Partition of elements into classes, ordered by least member.
struct SemigroupCongruence {
  std::vector<std::uint32_t> class_of;
  std::vector<std::vector<std::uint32_t>> classes;
};

// Groups elements by key and verifies the partition is a congruence.
SemigroupCongruence congruence_from_keys(const FiniteSemigroup& s,
                                         const std::vector<std::string>& keys);
// Quotient semigroup; class i of the congruence becomes element i.
FiniteSemigroup quotient_semigroup(const FiniteSemigroup& s, const SemigroupCongruence& c);

}  // namespace linat
