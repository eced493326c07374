#include "doctest.h"

#include "helpers.hpp"
#include "linat/gfla.hpp"

using namespace lt;

TEST_CASE("prime field arithmetic") {
  PrimeField f{7};
  CHECK(f.add(3, 5) == 1);
  CHECK(f.sub(2, 5) == 4);
  CHECK(f.mul(3, 5) == 1);
  CHECK(f.neg(0) == 0);
  CHECK(f.neg(2) == 5);
  CHECK(f.reduce(-9) == 5);
  CHECK(f.pow(3, 6) == 1);
  for (std::uint32_t a = 1; a < 7; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
}

TEST_CASE("field modulus must be prime") {
  CHECK_THROWS_AS(PrimeField{1}, Error);
  CHECK_THROWS_AS(PrimeField{6}, Error);
  CHECK_THROWS_AS(PrimeField{91}, Error);  // 7 * 13
  CHECK_NOTHROW(PrimeField{2});
  CHECK_NOTHROW(PrimeField{97});
}

TEST_CASE("row vectors act on the right") {
  PrimeField f{5};
  FieldMatrix m = mk(f, 2, 3, {1, 2, 3, 4, 0, 1});
  CHECK(vec_mat({1, 0}, m) == Vec{1, 2, 3});
  CHECK(vec_mat({0, 1}, m) == Vec{4, 0, 1});
  CHECK(vec_mat({2, 3}, m) == Vec{(2 * 1 + 3 * 4) % 5u, 4, (2 * 3 + 3) % 5u});
}

TEST_CASE("matrix multiplication composes left to right") {
  PrimeField f{5};
  FieldMatrix a = mk(f, 2, 2, {1, 2, 3, 4});
  FieldMatrix b = mk(f, 2, 2, {0, 1, 1, 1});
  FieldMatrix c = mk(f, 2, 2, {2, 0, 1, 3});
  CHECK(mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c)));
  Vec v{1, 4};
  CHECK(vec_mat(v, mat_mul(a, b)) == vec_mat(vec_mat(v, a), b));
  CHECK(mat_mul(FieldMatrix::identity(f, 2), a) == a);
  CHECK(mat_mul(a, FieldMatrix::identity(f, 2)) == a);
}

TEST_CASE("paste and block are inverse") {
  PrimeField f{3};
  FieldMatrix big(f, 3, 3);
  FieldMatrix part = mk(f, 2, 2, {1, 2, 0, 1});
  big.paste(1, 1, part);
  CHECK(big.block(1, 1, 2, 2) == part);
  CHECK(big.at(0, 0) == 0);
}

TEST_CASE("direct sum and kronecker dimensions") {
  PrimeField f{2};
  FieldMatrix a = mk(f, 1, 2, {1, 0});
  FieldMatrix b = mk(f, 2, 1, {1, 1});
  FieldMatrix d = direct_sum(a, b);
  CHECK(d.rows() == 3);
  CHECK(d.cols() == 3);
  CHECK(d.at(0, 0) == 1);
  CHECK(d.at(1, 2) == 1);
  CHECK(d.at(2, 2) == 1);
  FieldMatrix k = kron(a, b);
  CHECK(k.rows() == 2);
  CHECK(k.cols() == 2);
  // (a kron b)[(0,i2),(j1,0)] = a[0,j1] * b[i2,0]
  CHECK(k.at(0, 0) == 1);
  CHECK(k.at(1, 0) == 1);
  CHECK(k.at(0, 1) == 0);
  CHECK(k.at(1, 1) == 0);
}

TEST_CASE("subspace span is canonical") {
  PrimeField f{2};
  Subspace s1 = Subspace::span(f, 3, {{1, 1, 0}, {0, 1, 1}});
  Subspace s2 = Subspace::span(f, 3, {{0, 1, 1}, {1, 0, 1}});
  CHECK(s1 == s2);  // same space, different generators
  CHECK(s1.rank() == 2);
  CHECK(s1.contains({1, 0, 1}));
  CHECK(!s1.contains({1, 0, 0}));
  CHECK(vec_is_zero(s1.reduce({1, 1, 0})));
}

TEST_CASE("subspace coords invert the basis") {
  PrimeField f{5};
  Subspace s = Subspace::span(f, 3, {{1, 2, 0}, {0, 0, 3}});
  Vec v = vec_add(f, s.basis().row(0), vec_scale(f, 4, s.basis().row(1)));
  Vec c = s.coords(v);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == 1);
  CHECK(c[1] == 4);
}

TEST_CASE("subspace sum and orderings") {
  PrimeField f{2};
  Subspace a = Subspace::span(f, 3, {{1, 0, 0}});
  Subspace b = Subspace::span(f, 3, {{0, 1, 0}});
  Subspace s = a.sum(b);
  CHECK(s.rank() == 2);
  CHECK(s.contains(a));
  CHECK(s.contains(b));
  CHECK(a < s);  // rank-first order
  CHECK(Subspace::zero(f, 3) < a);
  CHECK(Subspace::full(f, 3).rank() == 3);
}

TEST_CASE("spin closes a seed under the action") {
  PrimeField f{2};
  // C3 on GF(2)^2 moves every line through the whole plane.
  FieldMatrix g = mk(f, 2, 2, {0, 1, 1, 1});
  Subspace seed = Subspace::span(f, 2, {{1, 0}});
  Subspace s = spin(seed, {g});
  CHECK(s.rank() == 2);
  CHECK(invariant_under(s, g));
  // The identity fixes everything, so spin is the seed itself.
  Subspace t = spin(seed, {FieldMatrix::identity(f, 2)});
  CHECK(t == seed);
  CHECK(spin(s, {g}) == s);  // idempotent
}

TEST_CASE("restrict and quotient actions multiply functorially") {
  PrimeField f{2};
  // Upper unitriangular action: e1 spans an invariant line.
  FieldMatrix m1 = mk(f, 2, 2, {1, 1, 0, 1});
  FieldMatrix m2 = mk(f, 2, 2, {1, 0, 0, 1});
  Subspace line = Subspace::span(f, 2, {{0, 1}});
  REQUIRE(invariant_under(line, m1));
  FieldMatrix r12 = restrict_action(mat_mul(m1, m2), line);
  CHECK(r12 == mat_mul(restrict_action(m1, line), restrict_action(m2, line)));
  FieldMatrix q12 = quotient_action(mat_mul(m1, m2), line);
  CHECK(q12 == mat_mul(quotient_action(m1, line), quotient_action(m2, line)));
}

TEST_CASE("rank and enumeration helpers") {
  PrimeField f{2};
  CHECK(rank_of(mk(f, 2, 2, {1, 1, 1, 1})) == 1);
  CHECK(rank_of(FieldMatrix::identity(f, 3)) == 3);
  CHECK(projective_points(f, 2).size() == 3);
  CHECK(projective_points(PrimeField{3}, 2).size() == 4);
  CHECK(all_subspaces(f, 2).size() == 5);  // 0, three lines, full
  CHECK(all_matrices(f, 1, 2).size() == 4);
}
