#pragma once

// Exact linear algebra over prime fields GF(p).
//
// Convention used throughout the library: vectors are row vectors and
// matrices act on the right, so a linear map V -> W of dimensions m, n is an
// m x n matrix and composition reads left to right: v * (M N) = (v * M) * N.

#include <cstdint>
#include <vector>

#include "linat/common.hpp"

namespace linat {

struct PrimeField {
  std::uint32_t p;

  explicit PrimeField(std::uint32_t p);

  std::uint32_t reduce(std::int64_t v) const;
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t neg(std::uint32_t a) const;
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
  std::uint32_t inv(std::uint32_t a) const;  // a != 0

  bool operator==(const PrimeField&) const = default;
};

using Vec = std::vector<std::uint32_t>;

// Dense row-major matrix with entries in [0, p).  Zero rows/cols are legal;
// a 0 x n or n x 0 matrix represents the unique map to or from the zero space.
class FieldMatrix {
 public:
  FieldMatrix(PrimeField f, std::size_t rows, std::size_t cols);
  static FieldMatrix identity(PrimeField f, std::size_t n);
  static FieldMatrix from_rows(PrimeField f, const std::vector<Vec>& rows,
                               std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const PrimeField& field() const { return field_; }

  std::uint32_t at(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, std::uint32_t v);
  Vec row(std::size_t r) const;
  const std::vector<std::uint32_t>& data() const { return data_; }

  bool is_zero() const;
  bool operator==(const FieldMatrix& o) const;
  bool operator<(const FieldMatrix& o) const;  // lexicographic; for ordered maps

  // Copies the block of `m` into this matrix with upper-left corner (r0, c0).
  void paste(std::size_t r0, std::size_t c0, const FieldMatrix& m);
  FieldMatrix block(std::size_t r0, std::size_t c0, std::size_t rows,
                    std::size_t cols) const;

 private:
  PrimeField field_;
  std::size_t rows_, cols_;
  std::vector<std::uint32_t> data_;
};

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix mat_add(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix mat_scale(std::uint32_t c, const FieldMatrix& a);
// Block diagonal sum; 0-dimensional blocks are absorbed.
FieldMatrix direct_sum(const FieldMatrix& a, const FieldMatrix& b);
// Kronecker product: (a kron b)[(i1,i2),(j1,j2)] = a[i1,j1] * b[i2,j2],
// with row index i1 * b.rows() + i2 and column index j1 * b.cols() + j2.
FieldMatrix kron(const FieldMatrix& a, const FieldMatrix& b);

Vec vec_mat(const Vec& v, const FieldMatrix& m);
Vec vec_add(const PrimeField& f, const Vec& a, const Vec& b);
Vec vec_scale(const PrimeField& f, std::uint32_t c, const Vec& v);
bool vec_is_zero(const Vec& v);

// Subspace of GF(p)^ambient held as a reduced row echelon basis without zero
// rows.  Two equal subspaces always compare equal entrywise.
class Subspace {
 public:
  static Subspace zero(PrimeField f, std::size_t ambient);
  static Subspace full(PrimeField f, std::size_t ambient);
  static Subspace span(PrimeField f, std::size_t ambient,
                       const std::vector<Vec>& vectors);

  std::size_t rank() const { return basis_.rows(); }
  std::size_t ambient() const { return ambient_; }
  const FieldMatrix& basis() const { return basis_; }
  const PrimeField& field() const { return basis_.field(); }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  std::vector<std::size_t> nonpivots() const;

  // Canonical coset representative: v minus its projection onto the basis,
  // zero at every pivot column.  contains(v) iff reduce(v) == 0.
  Vec reduce(const Vec& v) const;
  bool contains(const Vec& v) const;
  bool contains(const Subspace& other) const;
  // Coordinates of v in the echelon basis; requires contains(v).
  Vec coords(const Vec& v) const;

  Subspace sum(const Subspace& other) const;
  bool operator==(const Subspace& o) const;
  bool operator<(const Subspace& o) const;  // (rank, basis entries) order

 private:
  Subspace(std::size_t ambient, FieldMatrix basis,
           std::vector<std::size_t> pivots);
  std::size_t ambient_;
  FieldMatrix basis_;
  std::vector<std::size_t> pivots_;
};

// Row echelon reduction; returns the RREF rows (zero rows dropped) and pivots.
void rref(PrimeField f, std::vector<Vec>& rows, std::vector<std::size_t>& pivots);

bool invariant_under(const Subspace& s, const FieldMatrix& m);

// Smallest subspace containing `seed` and closed under every matrix in
// `action`: seed = 0 gives 0, and the result is monotone in the seed and
// idempotent as an operator.
Subspace spin(const Subspace& seed, const std::vector<FieldMatrix>& action);

// Induced map on the quotient by an invariant subspace.  The quotient basis
// is the image of the standard basis vectors at the non-pivot columns of
// `sub`, in column order, so the construction is functorial on products.
FieldMatrix quotient_action(const FieldMatrix& m, const Subspace& sub);

// Action restricted to an invariant subspace, written in the echelon basis.
FieldMatrix restrict_action(const FieldMatrix& m, const Subspace& sub);

std::size_t rank_of(const FieldMatrix& m);

// All vectors with first nonzero coordinate 1: one representative per line.
std::vector<Vec> projective_points(PrimeField f, std::size_t dim);
// Every subspace of GF(p)^dim; exponential, intended for small dims only.
std::vector<Subspace> all_subspaces(PrimeField f, std::size_t dim);
// All matrices of the given shape; p^(rows*cols) of them.
std::vector<FieldMatrix> all_matrices(PrimeField f, std::size_t rows,
                                      std::size_t cols);

}  // namespace linat
