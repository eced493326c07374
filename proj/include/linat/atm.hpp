// Text format for automata: one automaton per file, line oriented.
//
//   # comment (whole line)
//   format 1
//   kind pure | linear
//   field <p>                      (linear only)
//   dims <A> <B>
//   semigroup cayley <n> : <n*n entries>
//   semigroup generators : <k>     (followed by k `gen` lines; the parser
//                                   closes them under composition and the
//                                   document is normalized to cayley form)
//   zero <i>                       (optional)
//   identity <i>                   (optional)
//   label <i> <name>               (optional, one token per name)
//   act <i> : R x C : entries ; R x C : entries ; R x C : entries ;
//                                  (linear: sigma, phi, sigmaPrime blocks)
//   act <i> : c0 ... c(A-1) | s0 ... s(A-1)
//                                  (pure; the | part only when B > 0)
//   gen : <same payload as act, without the element index>
//
// Emission is canonical: fixed block order, single spaces, cayley form.
// parse(emit(doc)) reproduces the document exactly.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linat/automaton.hpp"

namespace linat {

struct AtmDocument {
  int format = 1;
  bool linear = false;
  std::uint32_t field_p = 0;  // 0 for pure documents
  std::size_t dim_a = 0, dim_b = 0;

  std::size_t n = 0;
  std::vector<std::uint32_t> table;
  std::optional<std::uint32_t> zero;
  std::optional<std::uint32_t> identity;
  std::vector<std::pair<std::uint32_t, std::string>> labels;  // sorted by index

  // Per element, in index order.
  std::vector<FieldMatrix> sigmas, phis, sigma_primes;      // linear
  std::vector<std::vector<std::uint32_t>> circ_rows;        // pure, length A
  std::vector<std::vector<std::uint32_t>> star_rows;        // pure, length A or 0

  bool operator==(const AtmDocument&) const = default;
};

// Throws Error with a "line L, column C" prefix on the first problem.
AtmDocument parse_atm(const std::string& text);

std::string emit_atm(const AtmDocument& doc);

// Document -> automaton conversions run the structural validation in the
// corresponding make() factories and throw Error on axiom violations.
LinearAutomaton linear_from_document(const AtmDocument& doc);
PureAutomaton pure_from_document(const AtmDocument& doc);

AtmDocument document_from(const LinearAutomaton& l);
AtmDocument document_from(const PureAutomaton& a);

}  // namespace linat
