// Divisor witnesses, their verification, and the exhaustive oracle.

#include <cstdint>
#include <vector>

#include "doctest.h"

#include "helpers.hpp"
#include "linat/divisor.hpp"

using namespace lt;

namespace {

// ff(m) embeds in ff(n) for m <= n: same set maps, same states.
PureEmbedding ff_embedding(std::size_t m) {
  PureEmbedding e;
  for (std::uint32_t i = 0; i < m; ++i) {
    e.elem_map.push_back(i);
    e.stateA_map.push_back(i);
  }
  return e;
}

}  // namespace

TEST_CASE("an embedding induces a verified pure divisor witness") {
  PureAutomaton ff2 = flip_flop_automaton(2), ff3 = flip_flop_automaton(3);
  PureDivisorWitness w = witness_from_embedding(ff2, ff3, ff_embedding(2));
  CHECK(w.sub_elems == std::vector<std::uint32_t>({0, 1}));
  CHECK(w.sub_a == std::vector<std::uint32_t>({0, 1}));
  WitnessCheck c = verify_witness(ff2, ff3, w);
  CHECK(c.ok);
  CHECK(c.detail.empty());
}

TEST_CASE("pure witness verification rejects each corrupted field") {
  PureAutomaton ff2 = flip_flop_automaton(2), ff3 = flip_flop_automaton(3);
  PureDivisorWitness good = witness_from_embedding(ff2, ff3, ff_embedding(2));

  PureDivisorWitness w = good;
  w.elem_map = {0, 0};
  WitnessCheck c = verify_witness(ff2, ff3, w);
  CHECK(!c.ok);
  CHECK(c.detail.find("surjective") != std::string::npos);

  w = good;
  w.sub_a = {0, 2};  // 0 o set1 = 1 escapes
  c = verify_witness(ff2, ff3, w);
  CHECK(!c.ok);
  CHECK(c.detail.find("not closed") != std::string::npos);

  w = good;
  w.pa = {1, 0};  // breaks compatibility with the constant maps
  c = verify_witness(ff2, ff3, w);
  CHECK(!c.ok);
  CHECK(c.detail.find("incompatible") != std::string::npos);

  w = good;
  w.sub_elems = {0, 9};
  CHECK(!verify_witness(ff2, ff3, w).ok);
}

TEST_CASE("a hand-built subgroup witness verifies") {
  // C2 divides C4: the regular action restricted to the index-2 subgroup.
  PureAutomaton c4 = regular_pure(cyclic_group(4));
  PureAutomaton c2 = regular_pure(cyclic_group(2));
  PureDivisorWitness w;
  w.sub_elems = {0, 2};
  w.elem_map = {0, 1};
  w.sub_a = {0, 2};
  w.pa = {0, 1};
  CHECK(verify_witness(c2, c4, w).ok);
}

TEST_CASE("witnesses compose transitively") {
  PureAutomaton ff2 = flip_flop_automaton(2), ff3 = flip_flop_automaton(3),
                ff4 = flip_flop_automaton(4);
  PureDivisorWitness w1 = witness_from_embedding(ff2, ff3, ff_embedding(2));
  PureDivisorWitness w2 = witness_from_embedding(ff3, ff4, ff_embedding(3));
  PureDivisorWitness w = compose_witnesses(ff2, ff3, ff4, w1, w2);
  CHECK(verify_witness(ff2, ff4, w).ok);
}

TEST_CASE("the pure oracle finds small divisors and counts its work") {
  PureAutomaton ff2 = flip_flop_automaton(2);
  PureWreath w = wreath_pure(ff2, ff2);

  PureOracleResult r = divisor_oracle(ff2, w.automaton, 1'000'000);
  CHECK(r.verdict == OracleVerdict::Found);
  REQUIRE(r.witness.has_value());
  CHECK(verify_witness(ff2, w.automaton, *r.witness).ok);
  CHECK(r.nodes_used > 0);

  PureOracleResult id = divisor_oracle(ff2, ff2, 1'000'000);
  CHECK(id.verdict == OracleVerdict::Found);
}

TEST_CASE("the pure oracle refutes non-divisors only after full enumeration") {
  PureAutomaton ff2 = flip_flop_automaton(2), ff3 = flip_flop_automaton(3);
  PureOracleResult r = divisor_oracle(ff3, ff2, 1'000'000);
  CHECK(r.verdict == OracleVerdict::Refuted);
  CHECK(!r.witness.has_value());

  // An order-3 group image cannot come out of a wreath of flip-flops.
  PureAutomaton c3 = regular_pure(cyclic_group(3));
  PureWreath host = wreath_pure(ff2, ff2);
  PureOracleResult r2 = divisor_oracle(c3, host.automaton, 5'000'000);
  CHECK(r2.verdict == OracleVerdict::Refuted);
}

TEST_CASE("a starved budget reports Exhausted, never Refuted") {
  PureAutomaton ff2 = flip_flop_automaton(2);
  PureAutomaton c3 = regular_pure(cyclic_group(3));
  PureWreath host = wreath_pure(ff2, ff2);
  PureOracleResult r = divisor_oracle(c3, host.automaton, 1);
  CHECK(r.verdict == OracleVerdict::Exhausted);
  CHECK(!r.witness.has_value());
  CHECK(r.nodes_used <= 1);
}

TEST_CASE("a linear embedding induces a verified divisor witness") {
  PureAutomaton ff2 = flip_flop_automaton(2);
  MixedLawReport law = mixed_law3(trivial_1dim(), trivial_1dim(), ff2);
  REQUIRE(law.holds);
  LinearAutomaton lhs =
      wreath_linear_pure(tri_automata(trivial_1dim(), trivial_1dim()), ff2).automaton;
  LinearWreath w1 = wreath_linear_pure(trivial_1dim(), ff2);
  LinearAutomaton rhs = tri_automata(w1.automaton, w1.automaton);

  LinearDivisorWitness w = witness_from_embedding(lhs, rhs, law.witness);
  WitnessCheck c = verify_witness(lhs, rhs, w);
  CHECK(c.ok);

  LinearDivisorWitness bad = w;
  bad.pa = FieldMatrix(lhs.field, rhs.dimA, lhs.dimA);  // zero projection
  c = verify_witness(lhs, rhs, bad);
  CHECK(!c.ok);
  CHECK(c.detail.find("surjective") != std::string::npos);

  bad = w;
  bad.elem_map.back() = 0;
  CHECK(!verify_witness(lhs, rhs, bad).ok);
}

TEST_CASE("the linear oracle settles small claims in both directions") {
  LinearAutomaton ut3 = ut3_automaton();
  LinearAutomaton triv = trivial_1dim();

  LinearOracleResult r = divisor_oracle(triv, ut3, 5'000'000);
  CHECK(r.verdict == OracleVerdict::Found);
  REQUIRE(r.witness.has_value());
  CHECK(verify_witness(triv, ut3, *r.witness).ok);

  // An order-3 group has no image inside a 2-group.
  LinearAutomaton c3 = representation_as_automaton(c3_rep());
  LinearOracleResult r2 = divisor_oracle(c3, ut3, 5'000'000);
  CHECK(r2.verdict == OracleVerdict::Refuted);

  LinearOracleResult starved = divisor_oracle(c3, ut3, 1);
  CHECK(starved.verdict == OracleVerdict::Exhausted);

  // Field mismatch is a refutation, not an error.
  LinearOracleResult fm = divisor_oracle(representation_as_automaton(c4_rep()), ut3, 100);
  CHECK(fm.verdict == OracleVerdict::Refuted);
}

TEST_CASE("assemble_host builds the wreath-lifted triangular product") {
  LinearAutomaton c3 = representation_as_automaton(c3_rep());
  LinearAutomaton two = assemble_host({{c3, std::nullopt}, {c3, std::nullopt}});
  LinearAutomaton tri = tri_automata(c3, c3);
  CHECK(two.dimA == tri.dimA);
  CHECK(two.gamma.size() == tri.gamma.size());

  PureAutomaton ff2 = flip_flop_automaton(2);
  LinearAutomaton lifted = assemble_host({{c3, ff2}});
  LinearWreath w = wreath_linear_pure(c3, ff2);
  CHECK(lifted.dimA == w.automaton.dimA);
  CHECK(lifted.gamma.size() == w.automaton.gamma.size());
}

TEST_CASE("make_correct_decomposition checks the claims it records") {
  LinearAutomaton triv = trivial_1dim();
  LinearAutomaton ut3 = ut3_automaton();

  // The full unitriangular automaton decomposes into three one-dimensional
  // factors whose sorts stack to (2, 1); both directions are within the
  // oracle's reach.
  LinearAutomaton outSort = trivial_dims(0, 1);
  CorrectDecomposition cd =
      make_correct_decomposition(ut3, {{triv, std::nullopt}, {triv, std::nullopt},
                                       {outSort, std::nullopt}}, 5'000'000);
  CHECK(cd.tri_ops == 2);
  CHECK(cd.wr_linear_ops == 0);
  CHECK(cd.op_count() == 2);
  CHECK(cd.target_verified);
  REQUIRE(cd.target_witness.has_value());
  LinearAutomaton host = assemble_host(cd.terms);
  CHECK(verify_witness(ut3, host, *cd.target_witness).ok);
  for (char v : cd.factor_verified) CHECK(v == 1);

  // A wrong decomposition stays recorded but unverified.
  LinearAutomaton c3 = representation_as_automaton(c3_rep());
  CorrectDecomposition wrong =
      make_correct_decomposition(c3, {{triv, std::nullopt}}, 1'000'000);
  CHECK(!wrong.target_verified);
  CHECK(!wrong.note.empty());
}

TEST_CASE("transitive substitution splices verified decompositions") {
  LinearAutomaton triv = trivial_1dim();
  LinearAutomaton ut3 = ut3_automaton();
  CorrectDecomposition outer =
      make_correct_decomposition(ut3, {{ut3, std::nullopt}}, 5'000'000);
  REQUIRE(outer.target_verified);
  CorrectDecomposition inner =
      make_correct_decomposition(ut3, {{triv, std::nullopt}, {triv, std::nullopt},
                                       {trivial_dims(0, 1), std::nullopt}}, 5'000'000);
  REQUIRE(inner.target_verified);

  CorrectDecomposition spliced = transitive_substitute(outer, {inner}, 5'000'000);
  CHECK(spliced.terms.size() == 3);
  CHECK(spliced.tri_ops == 2);
  CHECK(spliced.target_verified);
}
