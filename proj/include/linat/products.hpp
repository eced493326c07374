#pragma once

// Product constructions on automata: cascade connections and wreath products
// of pure automata, triangular products of representations and of linear
// automata, the wreath product of a linear automaton with a pure
// semi-automaton, and the three mixed laws relating them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linat/automaton.hpp"

namespace linat {

// Cascade datum (Gamma, alpha, beta) over a pair of automata: beta is a
// homomorphism Gamma -> Gamma2 and alpha assigns to each (gamma, point) an
// element of Gamma1, subject to
//   alpha(g h, a) = alpha(g, a) * alpha(h, a o beta(g)).
// The same layout serves the linear-with-pure cascade, where the point ranges
// over the pure carrier X.
struct CascadeTriple {
  FiniteSemigroup gamma;
  std::size_t points = 0;            // |A2| resp. |X|
  std::vector<std::uint32_t> alpha;  // alpha[g * points + a], values in Gamma1
  std::vector<std::uint32_t> beta;   // beta[g], values in Gamma2
};

struct TripleViolation {
  int kind = 0;  // 1: beta not multiplicative, 2: alpha condition
  std::uint32_t g1 = 0, g2 = 0, point = 0;
  std::string describe() const;
};

// gamma1 multiplies alpha values; a2 supplies Gamma2 and its action on the
// points.  Returns the first violation, if any.
std::optional<TripleViolation> check_cascade_triple(const CascadeTriple& t,
                                                    const FiniteSemigroup& gamma1,
                                                    const PureAutomaton& a2);

// Cascade connection of two pure automata: states A1 x A2 (A1-major),
// (a1, a2) o g = (a1 o alpha(g, a2), a2 o beta(g)) and the same shape for *.
// Output sorts must both be present or both be absent.
PureAutomaton cascade_pure(const PureAutomaton& a1, const PureAutomaton& a2,
                           const CascadeTriple& t);

// Wreath product of pure automata: Gamma1 wr^{A2} Gamma2 acting on A1 x A2 by
// (a1, a2) o (f, t) = (a1 o f(a2), a2 o t), with its canonical triple
// alpha((f, t), a2) = f(a2), beta(f, t) = t.
struct PureWreath {
  PureAutomaton automaton;
  CascadeTriple triple;
  WreathSemigroup wreath;
};
PureWreath wreath_pure(const PureAutomaton& a1, const PureAutomaton& a2);

// Embedding of one automaton into another: an element map and injective state
// maps commuting with all actions.  The element map must be injective on the
// faithful quotient of the source.
struct PureEmbedding {
  std::vector<std::uint32_t> elem_map;
  std::vector<std::uint32_t> stateA_map;
  std::vector<std::uint32_t> stateB_map;
};
struct EmbeddingReport {
  bool ok = true;
  std::string detail;  // first failure
};
EmbeddingReport verify_pure_embedding(const PureAutomaton& src, const PureAutomaton& dst,
                                      const PureEmbedding& e);

// The terminal-object witness: gamma -> (a2 -> alpha(gamma, a2), beta(gamma)),
// states mapped identically.  c must be cascade_pure(a1, a2, t) and w
// wreath_pure(a1, a2) for the same inputs.  Throws InternalError if the
// constructed witness fails verification.
PureEmbedding embed_cascade_in_wreath(const PureAutomaton& c, const CascadeTriple& t,
                                      const PureWreath& w);

// Triangular product of representations: matrices [[g1, phi], [0, g2]] with
// g1, g2 ranging independently over the faithful images and phi over all of
// Hom(A1, A2).  Element index: (i1 * homCount + phiDigits) * n2 + i2 with phi
// digits little-endian row-major base p.  Inputs are replaced by their
// faithful quotients first.
struct TriRep {
  LinearRepresentation rep;
  std::size_t n1 = 0, hom_count = 0, n2 = 0;
  std::uint32_t encode(std::uint32_t i1, std::size_t phi_idx, std::uint32_t i2) const;
};
TriRep tri_reps(const LinearRepresentation& r1, const LinearRepresentation& r2);

// Triangular product of linear automata: the representation triangular
// product of the A-side pair, the B-side pair, and then of those two, giving
// block matrices on A1 + A2 + B1 + B2 with six free Hom blocks.
LinearAutomaton tri_automata(const LinearAutomaton& l1, const LinearAutomaton& l2);

// Wreath product of a linear automaton with a pure semi-automaton (X, Sigma):
// carrier A tensor KX with basis a_i tensor x at index i * |X| + x, element
// (f, s) acting by (a tensor x) o (f, s) = (a o f(x)) tensor xs, and likewise
// for * and the B sort.
struct LinearWreath {
  LinearAutomaton automaton;
  WreathSemigroup wreath;
};
LinearWreath wreath_linear_pure(const LinearAutomaton& l, const PureAutomaton& psi);

// Cascade connection of a linear automaton with a pure semi-automaton:
// (a tensor x) o g = (a o alpha(x, g)) tensor (x o beta(g)).
LinearAutomaton cascade_linear_pure(const LinearAutomaton& l, const PureAutomaton& psi,
                                    const CascadeTriple& t);

// Embeddings between linear automata: an element map plus one injective
// linear map per sort, with rep_src(g) * diag(TA, TB) = diag(TA, TB) *
// rep_dst(elem_map(g)).
struct LinearEmbedding {
  std::vector<std::uint32_t> elem_map;
  FieldMatrix tau_a{PrimeField{2}, 0, 0};  // dimA_src x dimA_dst, full row rank
  FieldMatrix tau_b{PrimeField{2}, 0, 0};  // dimB_src x dimB_dst
};
EmbeddingReport verify_linear_embedding(const LinearAutomaton& src, const LinearAutomaton& dst,
                                        const LinearEmbedding& e);

// The three mixed laws on concrete inputs.
//   1. (L wr P1) wr P2  is isomorphic to  L wr (P1 wr P2)     (L a semi-automaton)
//   2. L1 nabla (L2 wr P)  embeds into  (L1 nabla L2) wr P    (P a permutation automaton)
//   3. (L1 nabla L2) wr P  embeds into  (L1 wr P) nabla (L2 wr P)
struct MixedLawReport {
  bool holds = false;
  std::string detail;            // failure description when !holds
  LinearEmbedding witness;       // the verified map when holds
  std::size_t src_size = 0, dst_size = 0;
};
MixedLawReport mixed_law1(const LinearAutomaton& l, const PureAutomaton& psi1,
                          const PureAutomaton& psi2);
MixedLawReport mixed_law2(const LinearAutomaton& l1, const LinearAutomaton& l2,
                          const PureAutomaton& psi);
MixedLawReport mixed_law3(const LinearAutomaton& l1, const LinearAutomaton& l2,
                          const PureAutomaton& psi);
struct MixedLaws {
  MixedLawReport law1, law2, law3;
};
MixedLaws check_mixed_laws(const LinearAutomaton& l1, const LinearAutomaton& l2,
                           const PureAutomaton& psi1, const PureAutomaton& psi2);

}  // namespace linat
