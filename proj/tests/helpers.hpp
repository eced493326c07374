#pragma once

// Shared fixtures for the test suite: small matrices, corpus paths, and the
// handful of representations the tests keep reaching for.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "linat/automaton.hpp"
#include "linat/gfla.hpp"
#include "linat/semigroup.hpp"

namespace lt {

using namespace linat;

inline FieldMatrix mk(PrimeField f, std::size_t r, std::size_t c,
                      const std::vector<std::uint32_t>& e) {
  FieldMatrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, e[i * c + j]);
  return m;
}

inline std::string data_path(const std::string& name) {
  return std::string(LINAT_TEST_DATA "/") + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// S3 irreducibly on GF(7)^2, generated by a 3-cycle and a transposition.
inline LinearRepresentation s3_rep() {
  PrimeField f{7};
  return representation_from_generators(
      f, 2, {mk(f, 2, 2, {0, 1, 6, 6}), mk(f, 2, 2, {0, 1, 1, 0})}, {"r", "s"});
}

// C3 irreducibly on GF(2)^2.
inline LinearRepresentation c3_rep() {
  PrimeField f{2};
  return representation_from_generators(f, 2, {mk(f, 2, 2, {0, 1, 1, 1})},
                                        {"g"});
}

// C4 irreducibly on GF(3)^2.
inline LinearRepresentation c4_rep() {
  PrimeField f{3};
  return representation_from_generators(f, 2, {mk(f, 2, 2, {0, 1, 2, 0})},
                                        {"g"});
}

// The Brandt semigroup B2 as 2x2 matrix units over GF(2) (plus the zero
// matrix found by closure).
inline LinearRepresentation b2_rep() {
  PrimeField f{2};
  return representation_from_generators(
      f, 2,
      {mk(f, 2, 2, {1, 0, 0, 0}), mk(f, 2, 2, {0, 1, 0, 0}),
       mk(f, 2, 2, {0, 0, 1, 0}), mk(f, 2, 2, {0, 0, 0, 1})},
      {"e11", "e12", "e21", "e22"});
}

// C3 with the zero matrix adjoined, on GF(2)^2.
inline LinearRepresentation c3_zero_rep() {
  PrimeField f{2};
  return representation_from_generators(
      f, 2, {mk(f, 2, 2, {0, 1, 1, 1}), mk(f, 2, 2, {0, 0, 0, 0})},
      {"g", "z"});
}

// Unitriangular 3x3 matrices over GF(2), read as a dims 2 + 1 automaton.
inline LinearAutomaton ut3_automaton() {
  PrimeField f{2};
  auto rep = representation_from_generators(
      f, 3,
      {mk(f, 3, 3, {1, 1, 0, 0, 1, 0, 0, 0, 1}),
       mk(f, 3, 3, {1, 0, 0, 0, 1, 1, 0, 0, 1}),
       mk(f, 3, 3, {1, 0, 1, 0, 1, 0, 0, 0, 1})},
      {"x", "y", "z"});
  return LinearAutomaton::make(f, 2, 1, rep.gamma, rep.mats);
}

// The one-dimensional automaton of the trivial group over GF(2).
inline LinearAutomaton trivial_1dim() {
  PrimeField f{2};
  return representation_as_automaton(representation_from_generators(
      f, 1, {FieldMatrix::identity(f, 1)}, {"e"}));
}

// Trivial-group automaton over GF(2) with the given sort dimensions.
inline LinearAutomaton trivial_dims(std::size_t dimA, std::size_t dimB) {
  PrimeField f{2};
  FiniteSemigroup one = FiniteSemigroup::from_table(1, {0}, std::nullopt, 0, {"e"});
  return LinearAutomaton::make(f, dimA, dimB, one,
                               {FieldMatrix::identity(f, dimA + dimB)});
}

// Restores the global caps on scope exit.
struct CapsSaver {
  Caps saved = caps();
  ~CapsSaver() { caps() = saved; }
};

// Cyclic group table of order n.
inline FiniteSemigroup cyclic_group(std::size_t n) {
  std::vector<std::uint32_t> t(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t[i * n + j] = static_cast<std::uint32_t>((i + j) % n);
  return FiniteSemigroup::from_table(n, std::move(t));
}

}  // namespace lt
