#include <algorithm>

#include "doctest.h"

#include "helpers.hpp"
#include "linat/semigroup.hpp"

using namespace lt;

namespace {

// B2: 2x2 matrix-unit semigroup {0, e11, e12, e21, e22} by its Cayley table.
// Index 0 is the zero.
FiniteSemigroup b2_table() {
  // order: 0, e11, e12, e21, e22
  // eij * ekl = eil if j == k else 0
  const std::uint32_t z = 0, a = 1, b = 2, c = 3, d = 4;
  std::vector<std::uint32_t> t = {
      z, z, z, z, z,  //
      z, a, b, z, z,  //
      z, z, z, a, b,  //
      z, c, d, z, z,  //
      z, z, z, c, d,  //
  };
  return FiniteSemigroup::from_table(5, std::move(t), 0);
}

}  // namespace

TEST_CASE("from_table validates entries and associativity") {
  CHECK_THROWS_AS(FiniteSemigroup::from_table(2, {0, 1, 1, 5}), Error);
  // rock-paper-scissors winner table is not associative
  std::vector<std::uint32_t> rps = {0, 1, 0, 1, 1, 2, 0, 2, 2};
  CHECK_THROWS_WITH_AS(FiniteSemigroup::from_table(3, std::vector<std::uint32_t>(rps)),
                       doctest::Contains("not associative"), Error);
  try {
    FiniteSemigroup::from_table(3, std::vector<std::uint32_t>(rps));
  } catch (const Error& e) {
    // the diagnostic names a concrete failing triple
    CHECK(std::string(e.what()).find("(0 1) 2") != std::string::npos);
  }
}

TEST_CASE("group predicates and inverses") {
  FiniteSemigroup c4 = cyclic_group(4);
  CHECK(c4.is_group());
  CHECK(c4.identity() == 0);
  CHECK(c4.inverse(1) == 3);
  CHECK(c4.inverse(2) == 2);
  CHECK(!b2_table().is_group());
  auto idem = b2_table().idempotents();
  CHECK(idem == std::vector<std::uint32_t>{0, 1, 4});
}

TEST_CASE("flip flop is right zero with constant actions") {
  FlipFlop ff = flip_flop(3);
  CHECK(ff.semigroup.size() == 3);
  for (std::uint32_t x = 0; x < 3; ++x)
    for (std::uint32_t y = 0; y < 3; ++y) CHECK(ff.semigroup.mul(x, y) == y);
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t j = 0; j < 3; ++j) CHECK(ff.action[a * 3 + j] == j);
  FiniteSemigroup lz = left_zero(2);
  CHECK(lz.mul(0, 1) == 0);
  CHECK(lz.mul(1, 0) == 1);
}

TEST_CASE("ideal lattice of B2") {
  FiniteSemigroup b2 = b2_table();
  CHECK(is_ideal(b2, {0}));
  CHECK(!is_ideal(b2, {1}));
  CHECK(is_ideal(b2, {0, 1, 2, 3, 4}));
  auto all = ideals(b2);
  // empty, {0}, whole
  REQUIRE(all.size() == 3);
  CHECK(all[0].empty());
  CHECK(all[1] == std::vector<std::uint32_t>{0});
  CHECK(all[2].size() == 5);
  CHECK(principal_ideal(b2, 1).size() == 5);
  CHECK(min_ideal_above(b2, {0}) == std::vector<std::uint32_t>({0, 1, 2, 3, 4}));
  CHECK(min_ideal_above(b2, {}) == std::vector<std::uint32_t>{0});
}

TEST_CASE("rees quotient collapses the ideal to a zero") {
  FiniteSemigroup c3 = cyclic_group(3);
  ReesQuotient q = rees_quotient(c3, {});
  CHECK(q.semigroup.size() == 4);
  CHECK(q.semigroup.zero() == 0);
  // old elements shifted up by one, products preserved
  for (std::uint32_t i = 0; i < 3; ++i)
    for (std::uint32_t j = 0; j < 3; ++j)
      CHECK(q.semigroup.mul(q.old_to_new[i], q.old_to_new[j]) ==
            q.old_to_new[c3.mul(i, j)]);

  FiniteSemigroup b2 = b2_table();
  ReesQuotient r = rees_quotient(b2, {0});
  CHECK(r.semigroup.size() == 5);
  CHECK(r.old_to_new[0] == 0);
}

TEST_CASE("completely zero simple recognition") {
  CHECK(is_completely_zero_simple(b2_table()));
  CHECK(is_completely_zero_simple(adjoin_zero(cyclic_group(3))));
  CHECK(!is_completely_zero_simple(cyclic_group(3)));  // no zero
  // A right-zero band with zero adjoined is completely 0-simple: one Rees row,
  // one column per band element, trivial group.
  FiniteSemigroup rz0 = rees_quotient(flip_flop(2).semigroup, {}).semigroup;
  CHECK(is_completely_zero_simple(rz0));
  ReesStructure rs = rees_structure(rz0);
  CHECK(rs.x_size == 1);
  CHECK(rs.y_size == 2);
  CHECK(rs.group.size() == 1);
  // A three-element chain semilattice has a proper ideal strictly between the
  // zero and the whole, so it is not 0-simple.
  std::vector<std::uint32_t> chain(9);
  for (std::uint32_t i = 0; i < 3; ++i)
    for (std::uint32_t j = 0; j < 3; ++j) chain[i * 3 + j] = std::min(i, j);
  CHECK(!is_completely_zero_simple(FiniteSemigroup::from_table(3, std::move(chain), 0)));
}

TEST_CASE("rees coordinates reproduce the B2 products") {
  FiniteSemigroup b2 = b2_table();
  ReesStructure rs = rees_structure(b2);
  CHECK(rs.x_size == 2);
  CHECK(rs.y_size == 2);
  CHECK(rs.group.size() == 1);
  for (std::uint32_t s = 0; s < 5; ++s)
    for (std::uint32_t t = 0; t < 5; ++t) {
      std::uint32_t expect = b2.mul(s, t);
      if (s == rs.zero_elem || t == rs.zero_elem) {
        CHECK(expect == rs.zero_elem);
        continue;
      }
      std::size_t x1, y1, x2, y2;
      std::uint32_t g1, g2;
      rs.triple_of(s, x1, g1, y1);
      rs.triple_of(t, x2, g2, y2);
      std::uint32_t p = rs.sandwich_at(y1, x2);
      if (p == 0) {
        CHECK(expect == rs.zero_elem);
      } else {
        std::uint32_t g = rs.group.mul(rs.group.mul(g1, p - 1), g2);
        CHECK(expect == rs.element_of(x1, g, y2));
      }
    }
}

TEST_CASE("rees coordinates of a group with zero") {
  FiniteSemigroup g0 = adjoin_zero(cyclic_group(3));
  ReesStructure rs = rees_structure(g0);
  CHECK(rs.x_size == 1);
  CHECK(rs.y_size == 1);
  CHECK(rs.group.size() == 3);
  CHECK(rs.group.is_group());
}

TEST_CASE("subsemigroup reindexes by position") {
  FiniteSemigroup c4 = cyclic_group(4);
  FiniteSemigroup c2 = subsemigroup(c4, {0, 2});
  CHECK(c2.size() == 2);
  CHECK(c2.mul(1, 1) == 0);
  CHECK(c2.is_group());
}

TEST_CASE("normal subgroups and composition series") {
  // S3 as the closure of a transposition and a 3-cycle inside the matrix
  // model; reuse the representation's semigroup.
  FiniteSemigroup s3 = s3_rep().gamma;
  REQUIRE(s3.is_group());
  REQUIRE(s3.size() == 6);
  CHECK(!is_simple_group(s3));
  auto maxn = maximal_proper_normal_subgroups(s3);
  REQUIRE(maxn.size() == 1);
  CHECK(maxn[0].size() == 3);  // A3
  auto series = composition_series(s3);
  REQUIRE(series.size() == 3);
  CHECK(series[0].size() == 6);
  CHECK(series[1].size() == 3);
  CHECK(series[2].size() == 1);
  CHECK(is_simple_group(cyclic_group(5)));
  CHECK(!is_simple_group(cyclic_group(4)));
}

TEST_CASE("quotient groups label cosets by least member") {
  FiniteSemigroup c4 = cyclic_group(4);
  QuotientGroup q = quotient_group(c4, {0, 2});
  CHECK(q.group.size() == 2);
  CHECK(q.coset_of[0] == q.coset_of[2]);
  CHECK(q.coset_of[1] == q.coset_of[3]);
  CHECK(q.coset_of[0] != q.coset_of[1]);
  CHECK(q.group.is_group());
}

TEST_CASE("wreath semigroup sizes and product rule") {
  FlipFlop ff = flip_flop(2);
  WreathSemigroup w = wreath_semigroup(ff.semigroup, 2, ff.action,
                                       ff.semigroup, caps().wreath);
  CHECK(w.semigroup.size() == 8);  // 2^2 * 2
  // spot-check the product rule (f,t)(f',t') = (c -> f(c) f'(c o t), t t')
  std::uint64_t e1 = w.encode({0, 1}, 0);
  std::uint64_t e2 = w.encode({1, 1}, 1);
  std::uint32_t prod = w.semigroup.mul(static_cast<std::uint32_t>(e1),
                                       static_cast<std::uint32_t>(e2));
  // c o t with t = gamma_0 sends both carrier points to 0, so the composed
  // f-part is c -> f(c) * f'(0) = {0*1, 1*1} = {1, 1} and t-part 0*1 = 1.
  CHECK(prod == w.encode({1, 1}, 1));
  CHECK(w.f_at(e2, 0) == 1);
  CHECK(w.second(e2) == 1);
}

TEST_CASE("congruences and quotient semigroups") {
  FiniteSemigroup c4 = cyclic_group(4);
  // keys identifying i with i+2: a congruence with classes {0,2}, {1,3}
  std::vector<std::string> keys = {"a", "b", "a", "b"};
  SemigroupCongruence cg = congruence_from_keys(c4, keys);
  REQUIRE(cg.classes.size() == 2);
  FiniteSemigroup q = quotient_semigroup(c4, cg);
  CHECK(q.size() == 2);
  CHECK(q.mul(1, 1) == 0);
  // a partition that is not a congruence is rejected
  std::vector<std::string> bad = {"a", "a", "b", "b"};
  CHECK_THROWS_AS(congruence_from_keys(c4, bad), Error);
}
