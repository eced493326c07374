#include "linat/gfla.hpp"

#include <algorithm>

namespace linat {

namespace {

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

PrimeField::PrimeField(std::uint32_t p_) : p(p_) {
  if (!is_prime(p)) throw Error("field characteristic " + std::to_string(p) + " is not prime");
}

std::uint32_t PrimeField::reduce(std::int64_t v) const {
  std::int64_t r = v % static_cast<std::int64_t>(p);
  if (r < 0) r += p;
  return static_cast<std::uint32_t>(r);
}

std::uint32_t PrimeField::add(std::uint32_t a, std::uint32_t b) const {
  std::uint64_t s = static_cast<std::uint64_t>(a) + b;
  if (s >= p) s -= p;
  return static_cast<std::uint32_t>(s);
}

std::uint32_t PrimeField::sub(std::uint32_t a, std::uint32_t b) const {
  return a >= b ? a - b : a + p - b;
}

std::uint32_t PrimeField::mul(std::uint32_t a, std::uint32_t b) const {
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % p);
}

std::uint32_t PrimeField::neg(std::uint32_t a) const { return a == 0 ? 0 : p - a; }

std::uint32_t PrimeField::pow(std::uint32_t a, std::uint64_t e) const {
  std::uint64_t base = a % p, acc = 1;
  while (e) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

std::uint32_t PrimeField::inv(std::uint32_t a) const {
  if (a % p == 0) throw Error("division by zero in GF(" + std::to_string(p) + ")");
  return pow(a, p - 2);
}

FieldMatrix::FieldMatrix(PrimeField f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

FieldMatrix FieldMatrix::identity(PrimeField f, std::size_t n) {
  FieldMatrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

FieldMatrix FieldMatrix::from_rows(PrimeField f, const std::vector<Vec>& rows,
                                   std::size_t cols) {
  FieldMatrix m(f, rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw Error("row length mismatch in matrix literal");
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c] % f.p);
  }
  return m;
}

void FieldMatrix::set(std::size_t r, std::size_t c, std::uint32_t v) {
  data_[r * cols_ + c] = v % field_.p;
}

Vec FieldMatrix::row(std::size_t r) const {
  return Vec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
             data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

bool FieldMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](std::uint32_t v) { return v == 0; });
}

bool FieldMatrix::operator==(const FieldMatrix& o) const {
  return field_.p == o.field_.p && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

bool FieldMatrix::operator<(const FieldMatrix& o) const {
  if (rows_ != o.rows_) return rows_ < o.rows_;
  if (cols_ != o.cols_) return cols_ < o.cols_;
  return data_ < o.data_;
}

void FieldMatrix::paste(std::size_t r0, std::size_t c0, const FieldMatrix& m) {
  if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_)
    throw InternalError("paste out of bounds");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) set(r0 + r, c0 + c, m.at(r, c));
}

FieldMatrix FieldMatrix::block(std::size_t r0, std::size_t c0, std::size_t rows,
                               std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_) throw InternalError("block out of bounds");
  FieldMatrix m(field_, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, at(r0 + r, c0 + c));
  return m;
}

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.field().p != b.field().p) throw Error("matrix product across different fields");
  if (a.cols() != b.rows()) throw Error("matrix product shape mismatch");
  const PrimeField f = a.field();
  FieldMatrix out(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      std::uint64_t aik = a.at(i, k);
      if (!aik) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        std::uint64_t v = out.at(i, j) + aik * b.at(k, j) % f.p;
        out.set(i, j, static_cast<std::uint32_t>(v % f.p));
      }
    }
  return out;
}

FieldMatrix mat_add(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.field().p != b.field().p)
    throw Error("matrix sum shape mismatch");
  FieldMatrix out(a.field(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out.set(i, j, a.field().add(a.at(i, j), b.at(i, j)));
  return out;
}

FieldMatrix mat_scale(std::uint32_t c, const FieldMatrix& a) {
  FieldMatrix out(a.field(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a.field().mul(c, a.at(i, j)));
  return out;
}

FieldMatrix direct_sum(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.field().p != b.field().p) throw Error("direct sum across different fields");
  FieldMatrix out(a.field(), a.rows() + b.rows(), a.cols() + b.cols());
  out.paste(0, 0, a);
  out.paste(a.rows(), a.cols(), b);
  return out;
}

FieldMatrix kron(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.field().p != b.field().p) throw Error("kron across different fields");
  const PrimeField f = a.field();
  FieldMatrix out(f, a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
    for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
      std::uint32_t v = a.at(i1, j1);
      if (!v) continue;
      for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
        for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
          out.set(i1 * b.rows() + i2, j1 * b.cols() + j2, f.mul(v, b.at(i2, j2)));
    }
  return out;
}

Vec vec_mat(const Vec& v, const FieldMatrix& m) {
  if (v.size() != m.rows()) throw Error("vector-matrix shape mismatch");
  const PrimeField f = m.field();
  Vec out(m.cols(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t vi = v[i] % f.p;
    if (!vi) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      out[j] = static_cast<std::uint32_t>((out[j] + vi * m.at(i, j)) % f.p);
  }
  return out;
}

Vec vec_add(const PrimeField& f, const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw Error("vector sum shape mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f.add(a[i], b[i]);
  return out;
}

Vec vec_scale(const PrimeField& f, std::uint32_t c, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f.mul(c, v[i]);
  return out;
}

bool vec_is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](std::uint32_t x) { return x == 0; });
}

void rref(PrimeField f, std::vector<Vec>& rows, std::vector<std::size_t>& pivots) {
  pivots.clear();
  if (rows.empty()) return;
  const std::size_t n = rows[0].size();
  std::size_t lead = 0;
  for (std::size_t col = 0; col < n && lead < rows.size(); ++col) {
    std::size_t sel = lead;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[lead], rows[sel]);
    std::uint32_t inv = f.inv(rows[lead][col]);
    for (std::size_t j = 0; j < n; ++j) rows[lead][j] = f.mul(rows[lead][j], inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == lead || rows[r][col] == 0) continue;
      std::uint32_t c = rows[r][col];
      for (std::size_t j = 0; j < n; ++j)
        rows[r][j] = f.sub(rows[r][j], f.mul(c, rows[lead][j]));
    }
    pivots.push_back(col);
    ++lead;
  }
  rows.resize(pivots.size());  // rows past the last pivot are zero
}

Subspace::Subspace(std::size_t ambient, FieldMatrix basis, std::vector<std::size_t> pivots)
    : ambient_(ambient), basis_(std::move(basis)), pivots_(std::move(pivots)) {}

Subspace Subspace::zero(PrimeField f, std::size_t ambient) {
  return Subspace(ambient, FieldMatrix(f, 0, ambient), {});
}

Subspace Subspace::full(PrimeField f, std::size_t ambient) {
  std::vector<std::size_t> piv(ambient);
  for (std::size_t i = 0; i < ambient; ++i) piv[i] = i;
  return Subspace(ambient, FieldMatrix::identity(f, ambient), piv);
}

Subspace Subspace::span(PrimeField f, std::size_t ambient, const std::vector<Vec>& vectors) {
  std::vector<Vec> rows;
  for (const Vec& v : vectors) {
    if (v.size() != ambient) throw Error("span vector has wrong dimension");
    Vec w(v);
    for (auto& x : w) x %= f.p;
    rows.push_back(std::move(w));
  }
  std::vector<std::size_t> piv;
  rref(f, rows, piv);
  return Subspace(ambient, FieldMatrix::from_rows(f, rows, ambient), piv);
}

std::vector<std::size_t> Subspace::nonpivots() const {
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::size_t c = 0; c < ambient_; ++c) {
    if (k < pivots_.size() && pivots_[k] == c)
      ++k;
    else
      out.push_back(c);
  }
  return out;
}

Vec Subspace::reduce(const Vec& v) const {
  if (v.size() != ambient_) throw Error("reduce: wrong dimension");
  const PrimeField f = field();
  Vec w(v);
  for (auto& x : w) x %= f.p;
  for (std::size_t r = 0; r < basis_.rows(); ++r) {
    std::uint32_t c = w[pivots_[r]];
    if (!c) continue;
    for (std::size_t j = 0; j < ambient_; ++j) w[j] = f.sub(w[j], f.mul(c, basis_.at(r, j)));
  }
  return w;
}

bool Subspace::contains(const Vec& v) const { return vec_is_zero(reduce(v)); }

bool Subspace::contains(const Subspace& other) const {
  for (std::size_t r = 0; r < other.basis_.rows(); ++r)
    if (!contains(other.basis_.row(r))) return false;
  return true;
}

Vec Subspace::coords(const Vec& v) const {
  if (!contains(v)) throw Error("coords: vector not in subspace");
  // Echelon basis rows have 1 at their own pivot and 0 at the others, so the
  // coordinates can be read off the pivot columns.
  Vec out(basis_.rows(), 0);
  for (std::size_t r = 0; r < basis_.rows(); ++r) out[r] = v[pivots_[r]] % field().p;
  return out;
}

Subspace Subspace::sum(const Subspace& other) const {
  if (ambient_ != other.ambient_ || field().p != other.field().p)
    throw Error("subspace sum across different spaces");
  std::vector<Vec> rows;
  for (std::size_t r = 0; r < basis_.rows(); ++r) rows.push_back(basis_.row(r));
  for (std::size_t r = 0; r < other.basis_.rows(); ++r) rows.push_back(other.basis_.row(r));
  return span(field(), ambient_, rows);
}

bool Subspace::operator==(const Subspace& o) const {
  return ambient_ == o.ambient_ && basis_ == o.basis_;
}

bool Subspace::operator<(const Subspace& o) const {
  if (rank() != o.rank()) return rank() < o.rank();
  return basis_.data() < o.basis_.data();
}

bool invariant_under(const Subspace& s, const FieldMatrix& m) {
  for (std::size_t r = 0; r < s.rank(); ++r)
    if (!s.contains(vec_mat(s.basis().row(r), m))) return false;
  return true;
}

Subspace spin(const Subspace& seed, const std::vector<FieldMatrix>& action) {
  Subspace cur = seed;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const FieldMatrix& m : action) {
      for (std::size_t r = 0; r < cur.rank(); ++r) {
        Vec img = vec_mat(cur.basis().row(r), m);
        if (!cur.contains(img)) {
          cur = cur.sum(Subspace::span(cur.field(), cur.ambient(), {img}));
          grew = true;
        }
      }
    }
  }
  return cur;
}

FieldMatrix quotient_action(const FieldMatrix& m, const Subspace& sub) {
  if (m.rows() != m.cols() || m.rows() != sub.ambient())
    throw Error("quotient_action: shape mismatch");
  if (!invariant_under(sub, m)) throw Error("quotient_action: subspace not invariant");
  const std::vector<std::size_t> np = sub.nonpivots();
  FieldMatrix out(m.field(), np.size(), np.size());
  for (std::size_t r = 0; r < np.size(); ++r) {
    Vec e(sub.ambient(), 0);
    e[np[r]] = 1;
    Vec img = sub.reduce(vec_mat(e, m));  // canonical rep: zero at pivots
    for (std::size_t c = 0; c < np.size(); ++c) out.set(r, c, img[np[c]]);
  }
  return out;
}

FieldMatrix restrict_action(const FieldMatrix& m, const Subspace& sub) {
  if (m.rows() != m.cols() || m.rows() != sub.ambient())
    throw Error("restrict_action: shape mismatch");
  FieldMatrix out(m.field(), sub.rank(), sub.rank());
  for (std::size_t r = 0; r < sub.rank(); ++r) {
    Vec img = vec_mat(sub.basis().row(r), m);
    if (!sub.contains(img)) throw Error("restrict_action: subspace not invariant");
    Vec c = sub.coords(img);
    for (std::size_t j = 0; j < sub.rank(); ++j) out.set(r, j, c[j]);
  }
  return out;
}

std::size_t rank_of(const FieldMatrix& m) {
  std::vector<Vec> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  std::vector<std::size_t> piv;
  rref(m.field(), rows, piv);
  return piv.size();
}

std::vector<Vec> projective_points(PrimeField f, std::size_t dim) {
  std::vector<Vec> out;
  // First nonzero coordinate fixed to 1: leading position k, free tail.
  for (std::size_t k = 0; k < dim; ++k) {
    std::size_t tail = dim - k - 1;
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < tail; ++i) count *= f.p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      Vec v(dim, 0);
      v[k] = 1;
      std::uint64_t t = idx;
      for (std::size_t i = 0; i < tail; ++i) {
        v[k + 1 + i] = static_cast<std::uint32_t>(t % f.p);
        t /= f.p;
      }
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Subspace> all_subspaces(PrimeField f, std::size_t dim) {
  // Enumerate echelon bases: pivot-column subsets, then free entries.  An
  // entry (r, c) is free iff c > pivot[r] and c is not itself a pivot.
  std::vector<Subspace> out;
  const std::size_t nmasks = static_cast<std::size_t>(1) << dim;
  for (std::size_t mask = 0; mask < nmasks; ++mask) {
    std::vector<std::size_t> piv;
    for (std::size_t c = 0; c < dim; ++c)
      if (mask & (static_cast<std::size_t>(1) << c)) piv.push_back(c);
    std::vector<std::pair<std::size_t, std::size_t>> free_pos;
    for (std::size_t r = 0; r < piv.size(); ++r)
      for (std::size_t c = piv[r] + 1; c < dim; ++c)
        if (std::find(piv.begin(), piv.end(), c) == piv.end()) free_pos.emplace_back(r, c);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < free_pos.size(); ++i) count *= f.p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::vector<Vec> rows(piv.size(), Vec(dim, 0));
      for (std::size_t r = 0; r < piv.size(); ++r) rows[r][piv[r]] = 1;
      std::uint64_t t = idx;
      for (auto [r, c] : free_pos) {
        rows[r][c] = static_cast<std::uint32_t>(t % f.p);
        t /= f.p;
      }
      out.push_back(Subspace::span(f, dim, rows));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FieldMatrix> all_matrices(PrimeField f, std::size_t rows, std::size_t cols) {
  std::vector<FieldMatrix> out;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < rows * cols; ++i) count *= f.p;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    FieldMatrix m(f, rows, cols);
    std::uint64_t t = idx;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        m.set(r, c, static_cast<std::uint32_t>(t % f.p));
        t /= f.p;
      }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace linat
