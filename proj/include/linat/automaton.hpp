#pragma once

// Pure and linear semigroup automata.  A pure automaton (A, Gamma, B) has a
// transition action o : A x Gamma -> A and an output map * : A x Gamma -> B
// with a o (gh) = (a o g) o h and a * (gh) = (a o g) * h.  B may be empty, in
// which case the automaton is a semi-automaton (a set with a semigroup
// action).
//
// A linear automaton over GF(p) stores one block upper triangular matrix
//   [[sigma, phi], [0, sigmaPrime]]
// per semigroup element, acting on row vectors of A (+) B:
//   a o g = a sigma(g),  a * g = a phi(g),  b . g = b sigmaPrime(g),
// and the three defining axioms amount to rep being multiplicative.

#include <cstdint>
#include <string>
#include <vector>

#include "linat/gfla.hpp"
#include "linat/semigroup.hpp"

namespace linat {

struct PureAutomaton {
  std::size_t nA = 0, nB = 0;  // nB == 0 means semi-automaton
  FiniteSemigroup gamma;
  std::vector<std::uint32_t> circ;  // circ[a * |gamma| + g] in A
  std::vector<std::uint32_t> star;  // star[a * |gamma| + g] in B; empty iff nB == 0

  std::uint32_t circ_at(std::uint32_t a, std::uint32_t g) const {
    return circ[a * gamma.size() + g];
  }
  std::uint32_t star_at(std::uint32_t a, std::uint32_t g) const {
    return star[a * gamma.size() + g];
  }

  // Validates table shapes and entry ranges (not the axioms; see
  // check_pure_axioms).
  static PureAutomaton make(std::size_t nA, std::size_t nB, FiniteSemigroup gamma,
                            std::vector<std::uint32_t> circ, std::vector<std::uint32_t> star);
};

struct LinearAutomaton {
  PrimeField field{2};
  std::size_t dimA = 0, dimB = 0;
  FiniteSemigroup gamma;
  std::vector<FieldMatrix> rep;  // one (dimA+dimB)-square block matrix per element

  std::size_t dim() const { return dimA + dimB; }
  FieldMatrix sigma(std::uint32_t g) const { return rep[g].block(0, 0, dimA, dimA); }
  FieldMatrix phi(std::uint32_t g) const { return rep[g].block(0, dimA, dimA, dimB); }
  FieldMatrix sigma_prime(std::uint32_t g) const {
    return rep[g].block(dimA, dimA, dimB, dimB);
  }

  // Validates shapes and the zero lower-left block (not multiplicativity; see
  // check_linear_axioms).
  static LinearAutomaton make(PrimeField field, std::size_t dimA, std::size_t dimB,
                              FiniteSemigroup gamma, std::vector<FieldMatrix> rep);
  // Assembles the block matrices from per-element sigma/phi/sigmaPrime lists.
  static LinearAutomaton from_blocks(PrimeField field, std::size_t dimA, std::size_t dimB,
                                     FiniteSemigroup gamma,
                                     const std::vector<FieldMatrix>& sigmas,
                                     const std::vector<FieldMatrix>& phis,
                                     const std::vector<FieldMatrix>& sigma_primes);
};

struct LinearRepresentation {
  PrimeField field{2};
  std::size_t dim = 0;
  FiniteSemigroup gamma;
  std::vector<FieldMatrix> mats;  // dim-square, one per element

  static LinearRepresentation make(PrimeField field, std::size_t dim, FiniteSemigroup gamma,
                                   std::vector<FieldMatrix> mats);
};

// A linear automaton is a (dimA+dimB)-dimensional representation by its own
// block matrices; a representation is a linear automaton with dimB = 0.
LinearRepresentation automaton_as_representation(const LinearAutomaton& l);
LinearAutomaton representation_as_automaton(const LinearRepresentation& r);

// Axiom reports.  Violations carry the axiom number (1: transition
// composition, 2: output cross law, 3: second-sort action) and the witnessing
// element pair.
struct AxiomViolation {
  int axiom = 0;
  std::uint32_t g1 = 0, g2 = 0;
  std::uint32_t state = 0;  // pure: the state a; linear: unused
};
struct AxiomReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

AxiomReport check_pure_axioms(const PureAutomaton& a);
// Verifies the block shape and rep(g1 g2) = rep(g1) rep(g2); a sigma-block
// mismatch reports axiom 1, phi-block axiom 2, sigmaPrime-block axiom 3.
AxiomReport check_linear_axioms(const LinearAutomaton& l);
AxiomReport check_representation(const LinearRepresentation& r);

// Universal pure automaton on sets of sizes nA, nB: Gamma = all pairs
// (s : A -> A, f : A -> B) with (s1,f1)(s2,f2) = (s1 s2, s1 f2); for nB = 0
// just all self-maps of A.  Element index: s-digits little-endian base nA,
// then f-digits base nB above them.
PureAutomaton universal_pure(std::size_t nA, std::size_t nB);

// Universal linear automaton: Gamma = all block matrices over GF(p).  Element
// index: little-endian base-p digits over sigma (row-major), then phi, then
// sigmaPrime.
LinearAutomaton universal_linear(PrimeField field, std::size_t dimA, std::size_t dimB);

// Quotient by the action kernel: elements acting identically are merged.  The
// carrier and tables are unchanged; the semigroup becomes faithful.
struct FaithfulPure {
  PureAutomaton automaton;
  std::vector<std::uint32_t> class_of;  // old element -> new element
};
struct FaithfulLinear {
  LinearAutomaton automaton;
  std::vector<std::uint32_t> class_of;
};
FaithfulPure faithful(const PureAutomaton& a);
FaithfulLinear faithful(const LinearAutomaton& l);
LinearRepresentation faithful_representation(const LinearRepresentation& r);

// The flip-flop semi-automaton (M, M^r) and the regular action (G, G) of a
// group on itself.
PureAutomaton flip_flop_automaton(std::size_t m);
PureAutomaton regular_pure(const FiniteSemigroup& g);

// True if for every pair of states some element moves the first to the second.
bool is_transitive(const PureAutomaton& a);

// Representation from generator matrices: closes under multiplication
// (cap: caps().closure) and labels elements by generator words.
LinearRepresentation representation_from_generators(PrimeField field, std::size_t dim,
                                                    const std::vector<FieldMatrix>& gens,
                                                    const std::vector<std::string>& gen_labels = {});
// Linear automaton from generator block matrices (shape-checked).
LinearAutomaton linear_automaton_from_generators(PrimeField field, std::size_t dimA,
                                                 std::size_t dimB,
                                                 const std::vector<FieldMatrix>& gens,
                                                 const std::vector<std::string>& gen_labels = {});
// Pure automaton from generator action columns: each generator is a pair
// (to_a: A -> A, to_b: A -> B), closed under (s1,f1)(s2,f2) = (s1 s2, s1 f2).
PureAutomaton pure_automaton_from_generators(std::size_t nA, std::size_t nB,
                                             const std::vector<std::vector<std::uint32_t>>& circ_cols,
                                             const std::vector<std::vector<std::uint32_t>>& star_cols,
                                             const std::vector<std::string>& gen_labels = {});

}  // namespace linat
