// The .atm text format: canonical emission, parsing, diagnostics, and the
// document/automaton conversions.

#include <string>
#include <vector>

#include "doctest.h"

#include "helpers.hpp"
#include "linat/atm.hpp"

using namespace lt;

TEST_CASE("parse and emit round-trip the corpus byte for byte") {
  for (const char* name : {"flipflop2.atm", "flipflop3.atm", "s3_gf7.atm", "c3_gf2.atm",
                           "c4_through_c2.atm", "b2_natural.atm", "group_zero.atm",
                           "ut3_automaton.atm"}) {
    CAPTURE(name);
    const std::string text = slurp(data_path(name));
    REQUIRE(!text.empty());
    AtmDocument doc = parse_atm(text);
    CHECK(emit_atm(doc) == text);
    CHECK(parse_atm(emit_atm(doc)) == doc);
  }
}

TEST_CASE("parse errors carry line and column positions") {
  auto throws_with = [](const std::string& text, const char* needle) {
    try {
      parse_atm(text);
      FAIL_CHECK("expected a parse error mentioning '" << needle << "'");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CAPTURE(msg);
      CHECK(msg.find("line ") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };

  throws_with("kind pure\n", "format");
  throws_with("format 1\nkind sideways\n", "'pure' or 'linear'");
  throws_with("format 1\nkind pure\ndims 2 0\nsemigroup cayley 0 :\n", "nonempty");
  // Table entries must stay below the order.
  throws_with("format 1\nkind pure\ndims 2 0\nsemigroup cayley 2 : 0 1 0 2\n",
              "out of range");
  // Field entries must stay below p.
  std::string bad_entry = slurp(data_path("c3_gf2.atm"));
  bad_entry.replace(bad_entry.find("0 1 1 1"), 7, "0 1 1 2");
  throws_with(bad_entry, "out of range");
  // A pure action row may only carry outputs when the automaton has them.
  throws_with(
      "format 1\nkind pure\ndims 2 0\nsemigroup cayley 1 : 0\nact 0 : 0 0 | 0 0\n",
      "trailing");
  // Dimension header and matrix shape must agree.
  std::string bad_shape = slurp(data_path("c3_gf2.atm"));
  bad_shape.replace(bad_shape.find("2 x 2 : 0 1 1 1 ;"), 17, "1 x 2 : 0 1 ;");
  throws_with(bad_shape, "transition block");
}

TEST_CASE("generator form is closed and normalized to a cayley table") {
  const std::string gen_text =
      "format 1\n"
      "kind linear\n"
      "field 2\n"
      "dims 2 0\n"
      "semigroup generators : 1\n"
      "gen : 2 x 2 : 0 1 1 1 ; 2 x 0 : ; 0 x 0 : ;\n";
  AtmDocument doc = parse_atm(gen_text);
  CHECK(doc.n == 3);
  REQUIRE(doc.sigmas.size() == 3);
  CHECK(doc.identity.has_value());

  AtmDocument fixed = parse_atm(slurp(data_path("c3_gf2.atm")));
  CHECK(doc.table == fixed.table);
  CHECK(emit_atm(doc).find("semigroup cayley 3") != std::string::npos);
}

TEST_CASE("pure action rows are stored per element and used per state") {
  AtmDocument doc = parse_atm(slurp(data_path("flipflop2.atm")));
  REQUIRE(doc.circ_rows.size() == 2);
  CHECK(doc.circ_rows[0] == std::vector<std::uint32_t>({0, 0}));
  CHECK(doc.circ_rows[1] == std::vector<std::uint32_t>({1, 1}));

  PureAutomaton a = pure_from_document(doc);
  for (std::uint32_t st = 0; st < 2; ++st) {
    CHECK(a.circ_at(st, 0) == 0);
    CHECK(a.circ_at(st, 1) == 1);
  }
  CHECK(document_from(a) == doc);
}

TEST_CASE("linear documents rebuild the stored automaton") {
  AtmDocument doc = parse_atm(slurp(data_path("ut3_automaton.atm")));
  LinearAutomaton parsed = linear_from_document(doc);
  LinearAutomaton ut3 = ut3_automaton();
  CHECK(parsed.dimA == ut3.dimA);
  CHECK(parsed.dimB == ut3.dimB);
  REQUIRE(parsed.gamma.size() == ut3.gamma.size());
  CHECK(parsed.gamma.table() == ut3.gamma.table());
  for (std::uint32_t g = 0; g < parsed.gamma.size(); ++g)
    CHECK(parsed.rep[g] == ut3.rep[g]);
}

TEST_CASE("the universal linear automaton survives the full round trip") {
  LinearAutomaton u = universal_linear(PrimeField{2}, 1, 1);
  AtmDocument doc = document_from(u);
  LinearAutomaton back = linear_from_document(parse_atm(emit_atm(doc)));
  REQUIRE(back.gamma.size() == 8);
  CHECK(back.gamma.table() == u.gamma.table());
  for (std::uint32_t g = 0; g < 8; ++g) CHECK(back.rep[g] == u.rep[g]);
}

TEST_CASE("a pure automaton with outputs keeps its star rows") {
  PureAutomaton u = universal_pure(2, 1);
  AtmDocument doc = document_from(u);
  CHECK(doc.star_rows.size() == doc.n);
  PureAutomaton back = pure_from_document(parse_atm(emit_atm(doc)));
  CHECK(back.nB == 1);
  CHECK(back.circ == u.circ);
  CHECK(back.star == u.star);
}

TEST_CASE("conversion validates structure, the axiom checker the action") {
  AtmDocument doc = parse_atm(slurp(data_path("c3_gf2.atm")));

  AtmDocument bad_shape = doc;
  bad_shape.sigmas[0] = FieldMatrix(PrimeField{2}, 1, 1);
  CHECK_THROWS_AS(linear_from_document(bad_shape), Error);

  AtmDocument bad_dims = doc;
  bad_dims.dim_a = 3;  // matrices are still 2 x 2
  CHECK_THROWS_AS(linear_from_document(bad_dims), Error);

  // A tampered action parses fine but fails the multiplicativity axioms.
  AtmDocument tampered = doc;
  tampered.sigmas[0] = FieldMatrix(PrimeField{2}, 2, 2);  // zero matrix
  LinearAutomaton broken = linear_from_document(tampered);
  CHECK(!check_linear_axioms(broken).ok());
  CHECK(check_linear_axioms(linear_from_document(doc)).ok());
}

TEST_CASE("zero, identity, and labels survive emission") {
  AtmDocument doc = parse_atm(slurp(data_path("b2_natural.atm")));
  REQUIRE(doc.zero.has_value());
  LinearAutomaton b2 = linear_from_document(doc);
  // The declared zero really is the zero matrix.
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(b2.rep[*doc.zero].at(r, c) == 0);
  CHECK(!doc.labels.empty());
  for (std::size_t i = 1; i < doc.labels.size(); ++i)
    CHECK(doc.labels[i - 1].first < doc.labels[i].first);
  CHECK(emit_atm(parse_atm(emit_atm(doc))) == emit_atm(doc));
}
