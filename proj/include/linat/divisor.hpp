#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linat/automaton.hpp"
#include "linat/gfla.hpp"
#include "linat/products.hpp"

namespace linat {

// Divisor witnesses. "claimed | host" holds when host contains a sub-object
// (subsemigroup + closed carrier part, per sort) together with a surjective
// homomorphism from that sub-object onto claimed, compatible with all three
// actions. A witness pins every choice so verification is a finite check.

struct PureDivisorWitness {
  // Sorted element indices of the subsemigroup of host.gamma.
  std::vector<std::uint32_t> sub_elems;
  // elem_map[k] = image in claimed.gamma of sub_elems[k]; surjective hom.
  std::vector<std::uint32_t> elem_map;
  // Sorted host state indices closed under the sub action, per sort.
  std::vector<std::uint32_t> sub_a;
  std::vector<std::uint32_t> sub_b;
  // pa[k] = claimed state that sub_a[k] maps to; surjective, compatible.
  std::vector<std::uint32_t> pa;
  std::vector<std::uint32_t> pb;
};

struct LinearDivisorWitness {
  std::vector<std::uint32_t> sub_elems;
  std::vector<std::uint32_t> elem_map;
  // Invariant subspaces of the host carriers.
  Subspace delta_a = Subspace::zero(PrimeField{2}, 0);
  Subspace delta_b = Subspace::zero(PrimeField{2}, 0);
  // Ambient-to-claimed projection matrices (host.dim x claimed.dim). Only
  // their restriction to delta_a / delta_b matters; that restriction must be
  // surjective and commute with the actions through elem_map.
  FieldMatrix pa{PrimeField{2}, 0, 0};
  FieldMatrix pb{PrimeField{2}, 0, 0};
};

struct WitnessCheck {
  bool ok = false;
  std::string detail;  // on failure: which equation broke, at which indices
};

WitnessCheck verify_witness(const PureAutomaton& claimed,
                            const PureAutomaton& host,
                            const PureDivisorWitness& w);
WitnessCheck verify_witness(const LinearAutomaton& claimed,
                            const LinearAutomaton& host,
                            const LinearDivisorWitness& w);

// An embedding src -> dst gives the divisor claim src | dst with the image as
// sub-object and the inverse maps as projections.
PureDivisorWitness witness_from_embedding(const PureAutomaton& src,
                                          const PureAutomaton& dst,
                                          const PureEmbedding& e);
LinearDivisorWitness witness_from_embedding(const LinearAutomaton& src,
                                            const LinearAutomaton& dst,
                                            const LinearEmbedding& e);

// Transitivity: from claimed | mid and mid | host build claimed | host by
// pulling the first witness back through the second.
PureDivisorWitness compose_witnesses(const PureAutomaton& claimed,
                                     const PureAutomaton& mid,
                                     const PureAutomaton& host,
                                     const PureDivisorWitness& w1,
                                     const PureDivisorWitness& w2);
LinearDivisorWitness compose_witnesses(const LinearAutomaton& claimed,
                                       const LinearAutomaton& mid,
                                       const LinearAutomaton& host,
                                       const LinearDivisorWitness& w1,
                                       const LinearDivisorWitness& w2);

// Exhaustive divisor search. Found returns a verified witness. Refuted is
// only reported when the whole candidate space was enumerated; running out
// of budget first yields Exhausted.
enum class OracleVerdict { Found, Exhausted, Refuted };

struct PureOracleResult {
  OracleVerdict verdict = OracleVerdict::Exhausted;
  std::optional<PureDivisorWitness> witness;
  std::uint64_t nodes_used = 0;
};

struct LinearOracleResult {
  OracleVerdict verdict = OracleVerdict::Exhausted;
  std::optional<LinearDivisorWitness> witness;
  std::uint64_t nodes_used = 0;
};

PureOracleResult divisor_oracle(const PureAutomaton& claimed,
                                const PureAutomaton& host,
                                std::uint64_t budget);
LinearOracleResult divisor_oracle(const LinearAutomaton& claimed,
                                  const LinearAutomaton& host,
                                  std::uint64_t budget);

// One term of a product expression: a linear factor, optionally lifted by a
// wreath with a pure part.
struct DecompositionTerm {
  LinearAutomaton linear;
  std::optional<PureAutomaton> pure;
};

// A correct decomposition of `target`: target divides the triangular product
// of the terms, and every linear factor divides target back.
struct CorrectDecomposition {
  LinearAutomaton target;
  std::vector<DecompositionTerm> terms;
  std::size_t tri_ops = 0, wr_linear_ops = 0, wr_pure_ops = 0;
  std::optional<LinearDivisorWitness> target_witness;  // target | host
  bool target_verified = false;
  std::vector<std::optional<LinearDivisorWitness>> factor_witnesses;
  std::vector<char> factor_verified;
  std::string note;

  std::size_t op_count() const {
    return tri_ops + wr_linear_ops + wr_pure_ops;
  }
};

// Materializes the triangular product over the wreath-lifted terms.  Throws
// CapError when any intermediate product exceeds the table caps.
LinearAutomaton assemble_host(const std::vector<DecompositionTerm>& terms);

// Builds a CorrectDecomposition and checks both divisor directions with the
// brute-force oracle; unverifiable claims are kept with a note instead of
// being dropped.
CorrectDecomposition make_correct_decomposition(const LinearAutomaton& target,
                                                std::vector<DecompositionTerm> terms,
                                                std::uint64_t budget);

// Transitivity of correct decompositions: replaces factor i by inner[i]'s
// expression (when present), pairing inner pure parts with the outer ones by
// a pure wreath. Factor witnesses are composed mechanically; the composed
// target claim is re-checked by the oracle within budget.
CorrectDecomposition transitive_substitute(
    const CorrectDecomposition& outer,
    const std::vector<std::optional<CorrectDecomposition>>& inner,
    std::uint64_t budget);

}  // namespace linat
