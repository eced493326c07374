#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linat/automaton.hpp"
#include "linat/divisor.hpp"
#include "linat/gfla.hpp"
#include "linat/semigroup.hpp"

namespace linat {

// Atoms are the indecomposable building blocks: irreducible representations
// of simple groups (linear), flip-flops, and transitive simple-group actions
// (pure). One-element groups are admitted as degenerate simple groups so the
// recursion has a floor.
enum class AtomKind { None, LinearSimpleGroup, FlipFlop, PureSimpleGroup };

struct AtomCheck {
  bool atom = false;
  AtomKind kind = AtomKind::None;
};

AtomCheck is_atom(const LinearAutomaton& x);  // requires dimB == 0
AtomCheck is_atom(const PureAutomaton& x);

// True iff the representation has no proper nonzero invariant subspace,
// decided by spinning every line. The bruteforce variant enumerates the whole
// subspace lattice instead (dim <= 4) and exists as a cross-check.
bool is_irreducible(const LinearRepresentation& r);
bool is_irreducible_bruteforce(const LinearRepresentation& r);

// Ascending chain V1 < V2 < ... < Vk = full space with irreducible factors,
// zero omitted. Each step takes the least invariant extension in
// (rank, echelon basis) order, so the chain is deterministic.
std::vector<Subspace> module_composition_series(const LinearRepresentation& r);

// One irreducible subquotient of a carrier, with the basis that places it
// inside the original automaton (rows are ambient vectors).
struct LinearFactor {
  LinearRepresentation rep;
  bool from_output_sort = false;
  FieldMatrix basis{PrimeField{2}, 0, 0};
};

struct LinearDecomposition {
  std::vector<LinearFactor> factors;  // state factors top-down, then output
  std::size_t a_count = 0, b_count = 0;
  std::size_t tri_ops = 0;  // factors.size() - 1
  // factor_witnesses[i]: factor i (as an automaton) divides the input.
  std::vector<LinearDivisorWitness> factor_witnesses;
};

// The factor as a one-sorted automaton: state factors become (d, 0), output
// factors (0, d).
LinearAutomaton factor_automaton(const LinearFactor& f);

LinearDecomposition linear_decompose(const LinearAutomaton& l);

// Compression of an irreducible representation onto a completely 0-simple
// acting semigroup: U is the set of elements acting as zero, V the least
// ideal properly above it, Sigma the Rees quotient V/U.
struct CompressResult {
  LinearRepresentation rep;   // (A, Sigma); the zero class acts as 0
  LinearRepresentation core;  // (A, V as a subsemigroup of the input)
  bool zero_adjoined = false;  // U was empty: Sigma is core plus a fresh zero
  std::uint32_t zero_index = 0;  // index of the zero class in rep.gamma
  std::vector<std::uint32_t> u_ideal, v_ideal;
  LinearDivisorWitness witness;  // core | input, always checkable
};

CompressResult compress(const LinearRepresentation& r);

// Witness bookkeeping for tree nodes. Verified means a concrete witness (or
// the defining equations of a constructed embedding) was checked exhaustively;
// OracleVerified means the brute-force divisor search confirmed the claim;
// PaperBacked marks claims recorded without a finished check.
enum class WitnessStatus { NotApplicable, Verified, OracleVerified, PaperBacked };

// Group lifted out of a completely 0-simple semigroup: the claim is
// (A, Sigma) | (A1, G with zero) wr (Y, Y^r) over the Rees column set Y.
struct LiftResult {
  LinearRepresentation group_rep;  // (A1, G), in A1 coordinates
  std::vector<std::uint32_t> group_elems;  // G inside the input semigroup
  Subspace a1 = Subspace::zero(PrimeField{2}, 0);
  std::size_t y_size = 0;
  PureAutomaton y_part;  // flip-flop on Y
  std::string claim;
  WitnessStatus status = WitnessStatus::PaperBacked;
  std::string note;
};

LiftResult lift_group(const LinearRepresentation& r);

// Clifford-style step for an irreducible representation of a non-simple
// group: restrict to the last proper composition-series term H (simple,
// required normal), split into irreducible H-summands, and lift the G/H
// action as the pure part.
struct CliffordResult {
  std::vector<LinearRepresentation> summands;  // (A_s, H), in summand coords
  std::vector<FieldMatrix> summand_bases;      // rows are ambient vectors
  std::vector<std::uint32_t> h_elems;          // H inside the input semigroup
  PureAutomaton pure_part;                     // (G/H, G/H) regular
  std::string claim;
  WitnessStatus status = WitnessStatus::PaperBacked;
  std::string note;
  std::size_t tri_ops = 0, wr_linear_ops = 0;
};

CliffordResult clifford_step(const LinearRepresentation& r);

enum class NodeKind { Atom, Halt, Tri, WrLinearPure, WrPure, Compress };

struct TreeNode {
  NodeKind kind = NodeKind::Halt;
  // The automaton this node decomposes; exactly one payload is set.
  std::optional<LinearAutomaton> linear;
  std::optional<PureAutomaton> pure;
  AtomKind atom = AtomKind::None;
  WitnessStatus witness = WitnessStatus::NotApplicable;
  std::string claim;  // divisor claim this node's reconstruction certifies
  std::string note;   // provenance details, halt reason
  // On a wreath node: the host adjoins a zero to the linear child before
  // taking the product.  On a compression node: the child's semigroup is the
  // core with a zero adjoined, and reconstruction removes it again.
  bool zero_adjoined = false;
  std::vector<std::size_t> children;
};

struct DecompositionTree {
  std::vector<TreeNode> nodes;
  std::size_t root = 0;
  bool partial = false;  // some branch ended in a halt marker
};

DecompositionTree decompose(const LinearAutomaton& l);

struct ComplexityReport {
  std::size_t op_count = 0;
  std::size_t tri_count = 0, wr_linear_count = 0, wr_pure_count = 0,
              compress_count = 0;
  std::size_t linear_atom_count = 0;
  std::size_t group_atom_count = 0;  // linear atoms plus pure simple groups
  std::size_t pure_atom_count = 0, flip_flop_count = 0;
  bool partial = false;  // counts are lower bounds
};

ComplexityReport complexity(const DecompositionTree& t);

struct RewriteResult {
  ComplexityReport best;
  DecompositionTree tree;
  std::size_t explored = 0;
};

// Searches trees reachable by the wreath-over-triangular rewrites (both
// directions) for the fewest operations; never worse than the input.
RewriteResult rewrite_search(const DecompositionTree& t, std::size_t budget);

// Synthetic tree builders for complexity experiments and tests.
DecompositionTree make_linear_leaf(const LinearRepresentation& r);
DecompositionTree make_pure_leaf(const PureAutomaton& a);
DecompositionTree make_tri(std::vector<DecompositionTree> children);
DecompositionTree make_wr_linear_pure(DecompositionTree linear_child,
                                      DecompositionTree pure_child);
DecompositionTree make_wr_pure(DecompositionTree c1, DecompositionTree c2);

// Applies a node's operation to its children, for checking the tree's
// divisor claims at small scale. Throws CapError when the product tables
// exceed the caps.
struct Reconstructed {
  std::optional<LinearAutomaton> linear;
  std::optional<PureAutomaton> pure;
};
Reconstructed reconstruct(const DecompositionTree& t, std::size_t node);

std::string render_tree(const DecompositionTree& t);

}  // namespace linat
