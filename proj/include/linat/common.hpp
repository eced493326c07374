#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace linat {

// Invalid input: bad files, violated preconditions, exceeded caps.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A structural guarantee failed; indicates a bug, not bad input.
class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

// A construction exceeded a configured size cap (see Caps / LINAT_CAP).
class CapError : public Error {
 public:
  explicit CapError(const std::string& what) : Error(what) {}
};

// Size limits for the combinatorial constructions.  `closure` and `wreath`
// bound element counts; `table` bounds Cayley-table materialization (memory);
// `assoc_check` bounds the exhaustive associativity check at construction.
struct Caps {
  std::size_t closure = 1'000'000;
  std::size_t wreath = 100'000;
  std::size_t table = 4096;
  std::size_t assoc_check = 300;
  std::size_t simple_group = 64;
  std::uint64_t oracle_budget = 5'000'000;
};

Caps& caps();

// FNV-1a, used for input digests in reports.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::string hex64(std::uint64_t v);

}  // namespace linat
