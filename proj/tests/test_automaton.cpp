#include "doctest.h"

#include "helpers.hpp"
#include "linat/automaton.hpp"

using namespace lt;

TEST_CASE("pure axioms hold for the flip flop") {
  PureAutomaton ff = flip_flop_automaton(3);
  CHECK(ff.nA == 3);
  CHECK(ff.gamma.size() == 3);
  CHECK(check_pure_axioms(ff).ok());
  CHECK(ff.circ_at(0, 2) == 2);

  SUBCASE("a corrupted transition is caught") {
    ff.circ[0] = 1;  // state 0 under gamma_0 now goes to 1
    AxiomReport rep = check_pure_axioms(ff);
    REQUIRE(!rep.ok());
    CHECK(rep.violations[0].axiom == 1);
  }
}

TEST_CASE("universal pure automaton enumerates all maps") {
  PureAutomaton u = universal_pure(2, 0);
  CHECK(u.gamma.size() == 4);  // all self-maps of a 2-set
  CHECK(check_pure_axioms(u).ok());
  PureAutomaton ub = universal_pure(2, 2);
  CHECK(ub.gamma.size() == 16);  // (s, f) pairs
  CHECK(check_pure_axioms(ub).ok());
}

TEST_CASE("universal linear automaton satisfies the axioms") {
  LinearAutomaton u = universal_linear(PrimeField{2}, 1, 1);
  CHECK(u.gamma.size() == 8);
  CHECK(check_linear_axioms(u).ok());
  CHECK(u.dim() == 2);

  SUBCASE("phi corruption is detected") {
    LinearAutomaton bad = u;
    // flip the phi entry of one element
    FieldMatrix m = bad.rep[3];
    m.set(0, 1, bad.field.add(m.at(0, 1), 1));
    bad.rep[3] = m;
    CHECK(!check_linear_axioms(bad).ok());
  }
}

TEST_CASE("linear block accessors slice the stored matrix") {
  LinearAutomaton ut3 = ut3_automaton();
  CHECK(ut3.dimA == 2);
  CHECK(ut3.dimB == 1);
  for (std::uint32_t g = 0; g < ut3.gamma.size(); ++g) {
    FieldMatrix full(ut3.field, 3, 3);
    full.paste(0, 0, ut3.sigma(g));
    full.paste(0, 2, ut3.phi(g));
    full.paste(2, 2, ut3.sigma_prime(g));
    CHECK(full == ut3.rep[g]);
  }
}

TEST_CASE("make rejects a nonzero lower left block") {
  PrimeField f{2};
  FiniteSemigroup one = FiniteSemigroup::from_table(1, {0});
  FieldMatrix m = mk(f, 2, 2, {1, 0, 1, 1});
  CHECK_THROWS_AS(LinearAutomaton::make(f, 1, 1, one, {m}), Error);
}

TEST_CASE("representation and automaton views agree") {
  LinearRepresentation r = c3_rep();
  LinearAutomaton l = representation_as_automaton(r);
  CHECK(l.dimA == 2);
  CHECK(l.dimB == 0);
  LinearRepresentation back = automaton_as_representation(l);
  CHECK(back.mats == r.mats);
  CHECK(back.gamma.table() == r.gamma.table());
}

TEST_CASE("faithful quotient merges equal actions") {
  PrimeField f{2};
  // two generators with the same matrix: the closure has duplicates only in
  // the labeling, so faithful() is the identity here; force a kernel with a
  // direct construction instead.
  FiniteSemigroup c2 = cyclic_group(2);
  std::vector<FieldMatrix> mats = {FieldMatrix::identity(f, 1),
                                   FieldMatrix::identity(f, 1)};
  LinearAutomaton l = LinearAutomaton::make(f, 1, 0, c2, mats);
  FaithfulLinear fl = faithful(l);
  CHECK(fl.automaton.gamma.size() == 1);
  CHECK(fl.class_of == std::vector<std::uint32_t>{0, 0});

  PureAutomaton p = flip_flop_automaton(2);
  FaithfulPure fp = faithful(p);
  CHECK(fp.automaton.gamma.size() == 2);  // already faithful
}

TEST_CASE("regular action and transitivity") {
  PureAutomaton c3 = regular_pure(cyclic_group(3));
  CHECK(c3.nA == 3);
  CHECK(is_transitive(c3));
  CHECK(check_pure_axioms(c3).ok());
  PureAutomaton ff = flip_flop_automaton(2);
  CHECK(is_transitive(ff));
  // a fixed point kills transitivity
  PureAutomaton fixed = PureAutomaton::make(
      2, 0, FiniteSemigroup::from_table(1, {0}), {0, 1}, {});
  CHECK(!is_transitive(fixed));
}

TEST_CASE("generator closure is deterministic and labeled") {
  LinearRepresentation r = s3_rep();
  CHECK(r.gamma.size() == 6);
  CHECK(r.gamma.labels()[0] == "r");
  CHECK(r.gamma.labels()[1] == "s");
  // first-seen order: generators first, then products in discovery order
  CHECK(r.gamma.labels()[2] == "rr");
  CHECK(check_representation(r).ok());
  CHECK(r.gamma.identity().has_value());
}
