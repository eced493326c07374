#include "linat/divisor.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "linat/common.hpp"

namespace linat {

namespace {

constexpr std::size_t kNoPos = std::numeric_limits<std::size_t>::max();
constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

std::size_t pos_in(const std::vector<std::uint32_t>& sorted, std::uint32_t x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it == sorted.end() || *it != x) return kNoPos;
  return static_cast<std::size_t>(it - sorted.begin());
}

bool sorted_unique_below(const std::vector<std::uint32_t>& v,
                         std::size_t bound) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] >= bound) return false;
    if (i > 0 && v[i - 1] >= v[i]) return false;
  }
  return true;
}

bool covers_all(const std::vector<std::uint32_t>& values, std::size_t bound) {
  std::vector<char> hit(bound, 0);
  for (std::uint32_t v : values) {
    if (v >= bound) return false;
    hit[v] = 1;
  }
  for (char c : hit)
    if (!c) return false;
  return true;
}

std::string at2(const char* what, std::size_t i, std::size_t j) {
  return std::string(what) + " at (" + std::to_string(i) + ", " +
         std::to_string(j) + ")";
}

// Shared subsemigroup / homomorphism layer of both witness checks.
std::string check_sub_and_hom(const FiniteSemigroup& claimed,
                              const FiniteSemigroup& host,
                              const std::vector<std::uint32_t>& sub,
                              const std::vector<std::uint32_t>& pi) {
  if (sub.empty()) return "empty subsemigroup";
  if (!sorted_unique_below(sub, host.size()))
    return "sub_elems is not a sorted subset of the host semigroup";
  if (pi.size() != sub.size()) return "elem_map size mismatch";
  for (std::uint32_t t : pi)
    if (t >= claimed.size()) return "elem_map value out of range";
  if (!covers_all(pi, claimed.size()))
    return "element map is not surjective";
  for (std::size_t i = 0; i < sub.size(); ++i) {
    for (std::size_t j = 0; j < sub.size(); ++j) {
      std::size_t q = pos_in(sub, host.mul(sub[i], sub[j]));
      if (q == kNoPos) return at2("subsemigroup not closed", i, j);
      if (claimed.mul(pi[i], pi[j]) != pi[q])
        return at2("element map is not a homomorphism", i, j);
    }
  }
  return {};
}

// Left kernel {x : x * m = 0} of m, as row vectors of length m.rows().
std::vector<Vec> left_kernel(const FieldMatrix& m) {
  PrimeField f = m.field();
  std::size_t n = m.rows();
  std::vector<Vec> eqs(m.cols(), Vec(n, 0));
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < n; ++r) eqs[c][r] = m.at(r, c);
  std::vector<std::size_t> pivots;
  rref(f, eqs, pivots);
  std::vector<char> is_pivot(n, 0);
  for (std::size_t p : pivots) is_pivot[p] = 1;
  std::vector<Vec> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    Vec v(n, 0);
    v[c] = 1;
    for (std::size_t r = 0; r < eqs.size(); ++r)
      v[pivots[r]] = f.neg(eqs[r][c]);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Kernel {u : rows * u = 0} of a list of equation rows over n unknowns.
std::vector<Vec> kernel_basis(PrimeField f, std::vector<Vec> rows,
                              std::size_t n) {
  std::vector<std::size_t> pivots;
  rref(f, rows, pivots);
  std::vector<char> is_pivot(n, 0);
  for (std::size_t p : pivots) is_pivot[p] = 1;
  std::vector<Vec> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    Vec v(n, 0);
    v[c] = 1;
    for (std::size_t r = 0; r < rows.size(); ++r)
      v[pivots[r]] = f.neg(rows[r][c]);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solves x * P = y for P (x full row rank); nullopt when inconsistent.
std::optional<FieldMatrix> solve_right(const FieldMatrix& x,
                                       const FieldMatrix& y) {
  PrimeField f = x.field();
  std::size_t k = x.rows(), n = x.cols(), c = y.cols();
  std::vector<Vec> aug(k, Vec(n + c, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = x.at(i, j);
    for (std::size_t j = 0; j < c; ++j) aug[i][n + j] = y.at(i, j);
  }
  // Eliminate on the x-part only.
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < k; ++col) {
    std::size_t sel = kNoPos;
    for (std::size_t r = row; r < k; ++r)
      if (aug[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel == kNoPos) continue;
    std::swap(aug[row], aug[sel]);
    std::uint32_t inv = f.inv(aug[row][col]);
    for (auto& e : aug[row]) e = f.mul(e, inv);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == row || aug[r][col] == 0) continue;
      std::uint32_t c0 = aug[r][col];
      for (std::size_t j = 0; j < n + c; ++j)
        aug[r][j] = f.sub(aug[r][j], f.mul(c0, aug[row][j]));
    }
    pivots.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < k; ++r)
    for (std::size_t j = n; j < n + c; ++j)
      if (aug[r][j] != 0) return std::nullopt;
  FieldMatrix p(f, n, c);
  for (std::size_t i = 0; i < pivots.size(); ++i)
    for (std::size_t j = 0; j < c; ++j) p.set(pivots[i], j, aug[i][n + j]);
  return p;
}

}  // namespace

WitnessCheck verify_witness(const PureAutomaton& claimed,
                            const PureAutomaton& host,
                            const PureDivisorWitness& w) {
  auto fail = [](std::string s) { return WitnessCheck{false, std::move(s)}; };
  std::string e = check_sub_and_hom(claimed.gamma, host.gamma, w.sub_elems,
                                    w.elem_map);
  if (!e.empty()) return fail(std::move(e));
  if (!sorted_unique_below(w.sub_a, host.nA))
    return fail("sub_a is not a sorted subset of the host states");
  if (w.pa.size() != w.sub_a.size()) return fail("pa size mismatch");
  for (std::uint32_t s : w.pa)
    if (s >= claimed.nA) return fail("pa value out of range");
  if (!covers_all(w.pa, claimed.nA))
    return fail("state map is not surjective");
  for (std::size_t t = 0; t < w.sub_a.size(); ++t) {
    for (std::size_t j = 0; j < w.sub_elems.size(); ++j) {
      std::size_t q =
          pos_in(w.sub_a, host.circ_at(w.sub_a[t], w.sub_elems[j]));
      if (q == kNoPos) return fail(at2("state part not closed", t, j));
      if (claimed.circ_at(w.pa[t], w.elem_map[j]) != w.pa[q])
        return fail(at2("state action incompatible", t, j));
    }
  }
  if (claimed.nB > 0) {
    if (host.nB == 0) return fail("host has no output sort");
    if (!sorted_unique_below(w.sub_b, host.nB))
      return fail("sub_b is not a sorted subset of the host outputs");
    if (w.pb.size() != w.sub_b.size()) return fail("pb size mismatch");
    for (std::uint32_t b : w.pb)
      if (b >= claimed.nB) return fail("pb value out of range");
    if (!covers_all(w.pb, claimed.nB))
      return fail("output map is not surjective");
    for (std::size_t t = 0; t < w.sub_a.size(); ++t) {
      for (std::size_t j = 0; j < w.sub_elems.size(); ++j) {
        std::size_t q =
            pos_in(w.sub_b, host.star_at(w.sub_a[t], w.sub_elems[j]));
        if (q == kNoPos) return fail(at2("output part not closed", t, j));
        if (claimed.star_at(w.pa[t], w.elem_map[j]) != w.pb[q])
          return fail(at2("output action incompatible", t, j));
      }
    }
  }
  return WitnessCheck{true, {}};
}

WitnessCheck verify_witness(const LinearAutomaton& claimed,
                            const LinearAutomaton& host,
                            const LinearDivisorWitness& w) {
  auto fail = [](std::string s) { return WitnessCheck{false, std::move(s)}; };
  if (claimed.field.p != host.field.p)
    return fail("field mismatch between claimed and host");
  std::string e = check_sub_and_hom(claimed.gamma, host.gamma, w.sub_elems,
                                    w.elem_map);
  if (!e.empty()) return fail(std::move(e));
  if (w.delta_a.ambient() != host.dimA)
    return fail("delta_a has the wrong ambient dimension");
  if (w.pa.rows() != host.dimA || w.pa.cols() != claimed.dimA)
    return fail("pa has the wrong shape");
  const FieldMatrix& ba = w.delta_a.basis();
  if (rank_of(mat_mul(ba, w.pa)) != claimed.dimA)
    return fail("state projection is not surjective");
  for (std::size_t j = 0; j < w.sub_elems.size(); ++j) {
    std::uint32_t s = w.sub_elems[j], t = w.elem_map[j];
    FieldMatrix sh = host.sigma(s);
    if (!invariant_under(w.delta_a, sh))
      return fail("delta_a not invariant at element " + std::to_string(j));
    if (!(mat_mul(mat_mul(ba, sh), w.pa) ==
          mat_mul(mat_mul(ba, w.pa), claimed.sigma(t))))
      return fail("state action incompatible at element " + std::to_string(j));
  }
  if (claimed.dimB > 0) {
    if (host.dimB == 0) return fail("host has no output sort");
    if (w.delta_b.ambient() != host.dimB)
      return fail("delta_b has the wrong ambient dimension");
    if (w.pb.rows() != host.dimB || w.pb.cols() != claimed.dimB)
      return fail("pb has the wrong shape");
    const FieldMatrix& bb = w.delta_b.basis();
    if (rank_of(mat_mul(bb, w.pb)) != claimed.dimB)
      return fail("output projection is not surjective");
    for (std::size_t j = 0; j < w.sub_elems.size(); ++j) {
      std::uint32_t s = w.sub_elems[j], t = w.elem_map[j];
      FieldMatrix ph = host.phi(s);
      FieldMatrix sph = host.sigma_prime(s);
      if (!invariant_under(w.delta_b, sph))
        return fail("delta_b not invariant at element " + std::to_string(j));
      FieldMatrix img = mat_mul(ba, ph);
      for (std::size_t r = 0; r < img.rows(); ++r)
        if (!w.delta_b.contains(img.row(r)))
          return fail("output image leaves delta_b at element " +
                      std::to_string(j));
      if (!(mat_mul(img, w.pb) ==
            mat_mul(mat_mul(ba, w.pa), claimed.phi(t))))
        return fail("output action incompatible at element " +
                    std::to_string(j));
      if (!(mat_mul(mat_mul(bb, sph), w.pb) ==
            mat_mul(mat_mul(bb, w.pb), claimed.sigma_prime(t))))
        return fail("output sort action incompatible at element " +
                    std::to_string(j));
    }
  }
  return WitnessCheck{true, {}};
}

PureDivisorWitness witness_from_embedding(const PureAutomaton& src,
                                          const PureAutomaton& dst,
                                          const PureEmbedding& e) {
  PureDivisorWitness w;
  w.sub_elems = e.elem_map;
  std::sort(w.sub_elems.begin(), w.sub_elems.end());
  w.sub_elems.erase(std::unique(w.sub_elems.begin(), w.sub_elems.end()),
                    w.sub_elems.end());
  w.elem_map.assign(w.sub_elems.size(), 0);
  for (std::size_t k = 0; k < w.sub_elems.size(); ++k) {
    for (std::uint32_t g = 0; g < src.gamma.size(); ++g)
      if (e.elem_map[g] == w.sub_elems[k]) {
        w.elem_map[k] = g;
        break;
      }
  }
  auto invert_states = [](const std::vector<std::uint32_t>& fwd,
                          std::vector<std::uint32_t>& sub,
                          std::vector<std::uint32_t>& back) {
    sub = fwd;
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    back.assign(sub.size(), 0);
    for (std::size_t k = 0; k < sub.size(); ++k)
      for (std::uint32_t a = 0; a < fwd.size(); ++a)
        if (fwd[a] == sub[k]) {
          back[k] = a;
          break;
        }
  };
  invert_states(e.stateA_map, w.sub_a, w.pa);
  if (src.nB > 0) invert_states(e.stateB_map, w.sub_b, w.pb);
  (void)dst;
  return w;
}

LinearDivisorWitness witness_from_embedding(const LinearAutomaton& src,
                                            const LinearAutomaton& dst,
                                            const LinearEmbedding& e) {
  LinearDivisorWitness w;
  w.sub_elems = e.elem_map;
  std::sort(w.sub_elems.begin(), w.sub_elems.end());
  w.sub_elems.erase(std::unique(w.sub_elems.begin(), w.sub_elems.end()),
                    w.sub_elems.end());
  w.elem_map.assign(w.sub_elems.size(), 0);
  for (std::size_t k = 0; k < w.sub_elems.size(); ++k)
    for (std::uint32_t g = 0; g < src.gamma.size(); ++g)
      if (e.elem_map[g] == w.sub_elems[k]) {
        w.elem_map[k] = g;
        break;
      }
  PrimeField f = src.field;
  std::vector<Vec> rows_a;
  for (std::size_t r = 0; r < e.tau_a.rows(); ++r)
    rows_a.push_back(e.tau_a.row(r));
  w.delta_a = Subspace::span(f, dst.dimA, rows_a);
  auto pa = solve_right(e.tau_a, FieldMatrix::identity(f, src.dimA));
  if (!pa)
    throw InternalError("embedding carrier map is not injective on states");
  w.pa = *pa;
  if (src.dimB > 0) {
    std::vector<Vec> rows_b;
    for (std::size_t r = 0; r < e.tau_b.rows(); ++r)
      rows_b.push_back(e.tau_b.row(r));
    w.delta_b = Subspace::span(f, dst.dimB, rows_b);
    auto pb = solve_right(e.tau_b, FieldMatrix::identity(f, src.dimB));
    if (!pb)
      throw InternalError("embedding carrier map is not injective on outputs");
    w.pb = *pb;
  } else {
    w.delta_b = Subspace::zero(f, dst.dimB);
    w.pb = FieldMatrix(f, dst.dimB, 0);
  }
  return w;
}

PureDivisorWitness compose_witnesses(const PureAutomaton& claimed,
                                     const PureAutomaton& mid,
                                     const PureAutomaton& host,
                                     const PureDivisorWitness& w1,
                                     const PureDivisorWitness& w2) {
  (void)mid;
  (void)host;
  PureDivisorWitness w;
  // Elements of w2's sub whose image under w2 lies in w1's sub.
  for (std::size_t k = 0; k < w2.sub_elems.size(); ++k) {
    std::size_t q = pos_in(w1.sub_elems, w2.elem_map[k]);
    if (q == kNoPos) continue;
    w.sub_elems.push_back(w2.sub_elems[k]);
    w.elem_map.push_back(w1.elem_map[q]);
  }
  for (std::size_t k = 0; k < w2.sub_a.size(); ++k) {
    std::size_t q = pos_in(w1.sub_a, w2.pa[k]);
    if (q == kNoPos) continue;
    w.sub_a.push_back(w2.sub_a[k]);
    w.pa.push_back(w1.pa[q]);
  }
  if (claimed.nB > 0) {
    for (std::size_t k = 0; k < w2.sub_b.size(); ++k) {
      std::size_t q = pos_in(w1.sub_b, w2.pb[k]);
      if (q == kNoPos) continue;
      w.sub_b.push_back(w2.sub_b[k]);
      w.pb.push_back(w1.pb[q]);
    }
  }
  return w;
}

LinearDivisorWitness compose_witnesses(const LinearAutomaton& claimed,
                                       const LinearAutomaton& mid,
                                       const LinearAutomaton& host,
                                       const LinearDivisorWitness& w1,
                                       const LinearDivisorWitness& w2) {
  (void)mid;
  LinearDivisorWitness w;
  for (std::size_t k = 0; k < w2.sub_elems.size(); ++k) {
    std::size_t q = pos_in(w1.sub_elems, w2.elem_map[k]);
    if (q == kNoPos) continue;
    w.sub_elems.push_back(w2.sub_elems[k]);
    w.elem_map.push_back(w1.elem_map[q]);
  }
  PrimeField f = host.field;
  // delta = {v in w2.delta : v * p2 in w1.delta}, projection p2 * p1.
  auto pull_back = [&f](const Subspace& outer, const FieldMatrix& proj,
                        const Subspace& inner, std::size_t ambient) {
    const FieldMatrix& b2 = outer.basis();
    FieldMatrix img = mat_mul(b2, proj);
    // Residual map of `inner` applied to each image row must vanish.
    FieldMatrix cond(f, img.rows(), img.cols());
    for (std::size_t r = 0; r < img.rows(); ++r) {
      Vec res = inner.reduce(img.row(r));
      for (std::size_t c = 0; c < res.size(); ++c) cond.set(r, c, res[c]);
    }
    std::vector<Vec> coeffs = left_kernel(cond);
    std::vector<Vec> rows;
    for (const Vec& x : coeffs) rows.push_back(vec_mat(x, b2));
    return Subspace::span(f, ambient, rows);
  };
  w.delta_a = pull_back(w2.delta_a, w2.pa, w1.delta_a, host.dimA);
  w.pa = mat_mul(w2.pa, w1.pa);
  if (claimed.dimB > 0) {
    w.delta_b = pull_back(w2.delta_b, w2.pb, w1.delta_b, host.dimB);
    w.pb = mat_mul(w2.pb, w1.pb);
  } else {
    w.delta_b = Subspace::zero(f, host.dimB);
    w.pb = FieldMatrix(f, host.dimB, 0);
  }
  return w;
}

namespace {

struct BudgetCounter {
  std::uint64_t left;
  std::uint64_t used = 0;
  bool dead = false;
  bool tick() {
    if (dead) return false;
    if (left == 0) {
      dead = true;
      return false;
    }
    --left;
    ++used;
    return true;
  }
};

bool next_combination(std::vector<std::uint32_t>& c, std::uint32_t n) {
  std::size_t k = c.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (c[i] + 1 <= n - static_cast<std::uint32_t>(k - i)) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j)
        c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Enumerates subsemigroups of sg of size >= min_size in (size, lex) order.
// cb(sub, subtab) returns true to stop the whole search. subtab holds product
// positions within sub. Returns true when cb stopped the search.
template <class CB>
bool for_each_subsemigroup(const FiniteSemigroup& sg, std::size_t min_size,
                           std::size_t min_idempotents, BudgetCounter& budget,
                           CB&& cb) {
  std::uint32_t n = static_cast<std::uint32_t>(sg.size());
  std::vector<char> in_sub(n, 0);
  for (std::size_t k = std::max<std::size_t>(min_size, 1); k <= n; ++k) {
    std::vector<std::uint32_t> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = static_cast<std::uint32_t>(i);
    do {
      if (!budget.tick()) return false;
      std::fill(in_sub.begin(), in_sub.end(), 0);
      for (std::uint32_t x : c) in_sub[x] = 1;
      bool closed = true;
      std::size_t idem = 0;
      std::vector<std::vector<std::uint32_t>> subtab(
          k, std::vector<std::uint32_t>(k, 0));
      for (std::size_t i = 0; i < k && closed; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          std::uint32_t p = sg.mul(c[i], c[j]);
          if (!in_sub[p]) {
            closed = false;
            break;
          }
          std::size_t q = pos_in(c, p);
          subtab[i][j] = static_cast<std::uint32_t>(q);
          if (i == j && p == c[i]) ++idem;
        }
      }
      if (!closed || idem < min_idempotents) continue;
      if (cb(c, subtab)) return true;
    } while (next_combination(c, n));
    if (budget.dead) return false;
  }
  return false;
}

// Enumerates surjective homomorphisms from the subsemigroup described by
// subtab onto claimed, lexicographically. cb(pi) returns true to stop.
template <class CB>
bool for_each_surjective_hom(const FiniteSemigroup& claimed,
                             const std::vector<std::vector<std::uint32_t>>& subtab,
                             BudgetCounter& budget, CB&& cb) {
  std::size_t k = subtab.size();
  std::size_t m = claimed.size();
  if (k < m) return false;
  std::vector<std::uint32_t> pi(k, kUnset);
  std::vector<std::uint32_t> hits(m, 0);
  std::size_t distinct = 0;

  auto consistent_at = [&](std::size_t pos) {
    for (std::size_t i = 0; i <= pos; ++i) {
      std::uint32_t q = subtab[i][pos];
      if (q <= pos && claimed.mul(pi[i], pi[pos]) != pi[q]) return false;
      q = subtab[pos][i];
      if (q <= pos && claimed.mul(pi[pos], pi[i]) != pi[q]) return false;
    }
    return true;
  };

  // Iterative backtracking over positions 0..k-1.
  std::size_t pos = 0;
  std::uint32_t trial = 0;
  while (true) {
    if (trial >= m) {
      if (pos == 0) return false;
      --pos;
      trial = pi[pos];
      if (--hits[trial] == 0) --distinct;
      pi[pos] = kUnset;
      ++trial;
      continue;
    }
    if (!budget.tick()) return false;
    pi[pos] = trial;
    if (consistent_at(pos) && distinct + (hits[trial] == 0 ? 1 : 0) +
                                      (k - pos - 1) >= m) {
      if (hits[trial]++ == 0) ++distinct;
      if (pos + 1 == k) {
        if (distinct == m && cb(pi)) return true;
        if (--hits[trial] == 0) --distinct;
        pi[pos] = kUnset;
        ++trial;
        continue;
      }
      ++pos;
      trial = 0;
      continue;
    }
    pi[pos] = kUnset;
    ++trial;
  }
}

struct PureOracleSearch {
  const PureAutomaton& claimed;
  const PureAutomaton& host;
  BudgetCounter budget;
  std::optional<PureDivisorWitness> found;

  void run() {
    if (host.gamma.size() < claimed.gamma.size()) return;
    if (host.nA < claimed.nA) return;
    if (claimed.nB > 0 && host.nB < claimed.nB) return;
    std::size_t min_idem = claimed.gamma.idempotents().size();
    for_each_subsemigroup(
        host.gamma, claimed.gamma.size(), min_idem, budget,
        [&](const std::vector<std::uint32_t>& sub,
            const std::vector<std::vector<std::uint32_t>>& subtab) {
          return for_each_surjective_hom(
              claimed.gamma, subtab, budget,
              [&](const std::vector<std::uint32_t>& pi) {
                return carrier_search(sub, pi);
              });
        });
  }

  bool carrier_search(const std::vector<std::uint32_t>& sub,
                      const std::vector<std::uint32_t>& pi) {
    std::uint32_t n = static_cast<std::uint32_t>(host.nA);
    std::vector<char> in_set(n, 0);
    for (std::size_t ka = std::max<std::size_t>(claimed.nA, 1); ka <= n;
         ++ka) {
      std::vector<std::uint32_t> c(ka);
      for (std::size_t i = 0; i < ka; ++i)
        c[i] = static_cast<std::uint32_t>(i);
      do {
        if (!budget.tick()) return false;
        std::fill(in_set.begin(), in_set.end(), 0);
        for (std::uint32_t a : c) in_set[a] = 1;
        bool closed = true;
        std::vector<std::vector<std::uint32_t>> circpos(
            ka, std::vector<std::uint32_t>(sub.size(), 0));
        for (std::size_t t = 0; t < ka && closed; ++t) {
          for (std::size_t j = 0; j < sub.size(); ++j) {
            std::uint32_t na = host.circ_at(c[t], sub[j]);
            if (!in_set[na]) {
              closed = false;
              break;
            }
            circpos[t][j] = static_cast<std::uint32_t>(pos_in(c, na));
          }
        }
        if (!closed) continue;
        if (assign_states(sub, pi, c, circpos)) return true;
        if (budget.dead) return false;
      } while (next_combination(c, n));
      if (budget.dead) return false;
    }
    return false;
  }

  bool assign_states(const std::vector<std::uint32_t>& sub,
                     const std::vector<std::uint32_t>& pi,
                     const std::vector<std::uint32_t>& sub_a,
                     const std::vector<std::vector<std::uint32_t>>& circpos) {
    std::size_t ka = sub_a.size();
    std::size_t m = claimed.nA;
    std::vector<std::uint32_t> pa(ka, kUnset);
    std::vector<std::uint32_t> hits(m, 0);
    std::size_t distinct = 0;

    auto consistent_at = [&](std::size_t pos) {
      for (std::size_t r = 0; r <= pos; ++r) {
        for (std::size_t j = 0; j < sub.size(); ++j) {
          std::uint32_t q = circpos[r][j];
          if (r == pos || q == pos) {
            if (q <= pos && claimed.circ_at(pa[r], pi[j]) != pa[q])
              return false;
          }
        }
      }
      return true;
    };

    std::size_t pos = 0;
    std::uint32_t trial = 0;
    while (true) {
      if (trial >= m) {
        if (pos == 0) return false;
        --pos;
        trial = pa[pos];
        if (--hits[trial] == 0) --distinct;
        pa[pos] = kUnset;
        ++trial;
        continue;
      }
      if (!budget.tick()) return false;
      pa[pos] = trial;
      if (consistent_at(pos) && distinct + (hits[trial] == 0 ? 1 : 0) +
                                        (ka - pos - 1) >= m) {
        if (hits[trial]++ == 0) ++distinct;
        if (pos + 1 == ka) {
          if (distinct == m && finish_outputs(sub, pi, sub_a, pa)) return true;
          if (--hits[trial] == 0) --distinct;
          pa[pos] = kUnset;
          ++trial;
          continue;
        }
        ++pos;
        trial = 0;
        continue;
      }
      pa[pos] = kUnset;
      ++trial;
    }
  }

  // Output maps are forced on star images and free elsewhere, so the output
  // sort never needs its own search: take every host output and complete.
  bool finish_outputs(const std::vector<std::uint32_t>& sub,
                      const std::vector<std::uint32_t>& pi,
                      const std::vector<std::uint32_t>& sub_a,
                      const std::vector<std::uint32_t>& pa) {
    PureDivisorWitness w;
    w.sub_elems = sub;
    w.elem_map = pi;
    w.sub_a = sub_a;
    w.pa = pa;
    if (claimed.nB > 0) {
      std::vector<std::uint32_t> pb(host.nB, kUnset);
      for (std::size_t t = 0; t < sub_a.size(); ++t) {
        for (std::size_t j = 0; j < sub.size(); ++j) {
          std::uint32_t b = host.star_at(sub_a[t], sub[j]);
          std::uint32_t want = claimed.star_at(pa[t], pi[j]);
          if (pb[b] != kUnset && pb[b] != want) return false;
          pb[b] = want;
        }
      }
      std::vector<char> hit(claimed.nB, 0);
      std::size_t free_slots = 0;
      for (std::uint32_t v : pb) {
        if (v == kUnset)
          ++free_slots;
        else
          hit[v] = 1;
      }
      std::vector<std::uint32_t> missing;
      for (std::uint32_t b = 0; b < claimed.nB; ++b)
        if (!hit[b]) missing.push_back(b);
      if (missing.size() > free_slots) return false;
      std::size_t next = 0;
      for (auto& v : pb) {
        if (v != kUnset) continue;
        v = next < missing.size() ? missing[next++] : 0;
      }
      w.sub_b.resize(host.nB);
      for (std::uint32_t b = 0; b < host.nB; ++b) w.sub_b[b] = b;
      w.pb = std::move(pb);
    }
    WitnessCheck chk = verify_witness(claimed, host, w);
    if (!chk.ok)
      throw InternalError("pure divisor search produced a bad witness: " +
                          chk.detail);
    found = std::move(w);
    return true;
  }
};

struct LinearOracleSearch {
  const LinearAutomaton& claimed;
  const LinearAutomaton& host;
  BudgetCounter budget;
  std::optional<LinearDivisorWitness> found;
  bool type_refuted = false;

  void run() {
    if (claimed.field.p != host.field.p) {
      type_refuted = true;
      return;
    }
    if (host.gamma.size() < claimed.gamma.size()) return;
    if (host.dimA < claimed.dimA) return;
    if (claimed.dimB > 0 && host.dimB < claimed.dimB) return;
    if (host.dimA > 6 || host.dimB > 6) {
      // Subspace lattice too large to enumerate; spend the budget as a
      // truthful "could not finish" signal.
      budget.dead = true;
      budget.left = 0;
      return;
    }
    std::vector<Subspace> spaces_a = all_subspaces(host.field, host.dimA);
    std::vector<Subspace> spaces_b;
    if (claimed.dimB > 0) spaces_b = all_subspaces(host.field, host.dimB);
    std::size_t min_idem = claimed.gamma.idempotents().size();
    for_each_subsemigroup(
        host.gamma, claimed.gamma.size(), min_idem, budget,
        [&](const std::vector<std::uint32_t>& sub,
            const std::vector<std::vector<std::uint32_t>>& subtab) {
          return for_each_surjective_hom(
              claimed.gamma, subtab, budget,
              [&](const std::vector<std::uint32_t>& pi) {
                return carrier_search(sub, pi, spaces_a, spaces_b);
              });
        });
  }

  bool carrier_search(const std::vector<std::uint32_t>& sub,
                      const std::vector<std::uint32_t>& pi,
                      const std::vector<Subspace>& spaces_a,
                      const std::vector<Subspace>& spaces_b) {
    std::vector<FieldMatrix> sh, ph, sph;
    for (std::uint32_t s : sub) {
      sh.push_back(host.sigma(s));
      if (host.dimB > 0) {
        ph.push_back(host.phi(s));
        sph.push_back(host.sigma_prime(s));
      }
    }
    for (const Subspace& da : spaces_a) {
      if (!budget.tick()) return false;
      if (da.rank() < claimed.dimA) continue;
      bool inv = true;
      for (const FieldMatrix& m : sh)
        if (!invariant_under(da, m)) {
          inv = false;
          break;
        }
      if (!inv) continue;
      if (claimed.dimB == 0) {
        if (solve_projections(sub, pi, da,
                              Subspace::zero(host.field, host.dimB), sh, ph,
                              sph))
          return true;
        if (budget.dead) return false;
        continue;
      }
      // Star image of delta_a must fit inside the output subspace.
      std::vector<Vec> img_rows;
      for (const FieldMatrix& p : ph) {
        FieldMatrix img = mat_mul(da.basis(), p);
        for (std::size_t r = 0; r < img.rows(); ++r)
          img_rows.push_back(img.row(r));
      }
      Subspace star_img = Subspace::span(host.field, host.dimB, img_rows);
      for (const Subspace& db : spaces_b) {
        if (!budget.tick()) return false;
        if (db.rank() < claimed.dimB) continue;
        if (!db.contains(star_img)) continue;
        bool invb = true;
        for (const FieldMatrix& m : sph)
          if (!invariant_under(db, m)) {
            invb = false;
            break;
          }
        if (!invb) continue;
        if (solve_projections(sub, pi, da, db, sh, ph, sph)) return true;
        if (budget.dead) return false;
      }
    }
    return false;
  }

  // The compatibility equations are linear in the projection matrices, so
  // collect them, take the kernel, and scan it for a surjective pair.
  bool solve_projections(const std::vector<std::uint32_t>& sub,
                         const std::vector<std::uint32_t>& pi,
                         const Subspace& da, const Subspace& db,
                         const std::vector<FieldMatrix>& sh,
                         const std::vector<FieldMatrix>& ph,
                         const std::vector<FieldMatrix>& sph) {
    PrimeField f = host.field;
    std::size_t ka = da.rank(), kb = db.rank();
    std::size_t ca = claimed.dimA, cb = claimed.dimB;
    std::size_t nu = ka * ca + kb * cb;
    if (nu == 0) return false;
    auto ua = [&](std::size_t i, std::size_t j) { return i * ca + j; };
    auto ub = [&](std::size_t i, std::size_t j) {
      return ka * ca + i * cb + j;
    };
    std::vector<Vec> eqs;
    for (std::size_t e = 0; e < sub.size(); ++e) {
      std::uint32_t t = pi[e];
      FieldMatrix ra = restrict_action(sh[e], da);
      FieldMatrix sc = claimed.sigma(t);
      for (std::size_t i = 0; i < ka; ++i) {
        for (std::size_t j = 0; j < ca; ++j) {
          Vec row(nu, 0);
          for (std::size_t m = 0; m < ka; ++m)
            row[ua(m, j)] = f.add(row[ua(m, j)], ra.at(i, m));
          for (std::size_t m = 0; m < ca; ++m)
            row[ua(i, m)] = f.sub(row[ua(i, m)], sc.at(m, j));
          eqs.push_back(std::move(row));
        }
      }
      if (cb == 0) continue;
      FieldMatrix img = mat_mul(da.basis(), ph[e]);
      FieldMatrix sab(f, ka, kb);
      for (std::size_t r = 0; r < ka; ++r) {
        Vec coords = db.coords(img.row(r));
        for (std::size_t c = 0; c < kb; ++c) sab.set(r, c, coords[c]);
      }
      FieldMatrix pc = claimed.phi(t);
      for (std::size_t i = 0; i < ka; ++i) {
        for (std::size_t j = 0; j < cb; ++j) {
          Vec row(nu, 0);
          for (std::size_t m = 0; m < kb; ++m)
            row[ub(m, j)] = f.add(row[ub(m, j)], sab.at(i, m));
          for (std::size_t m = 0; m < ca; ++m)
            row[ua(i, m)] = f.sub(row[ua(i, m)], pc.at(m, j));
          eqs.push_back(std::move(row));
        }
      }
      FieldMatrix rb = restrict_action(sph[e], db);
      FieldMatrix spc = claimed.sigma_prime(t);
      for (std::size_t i = 0; i < kb; ++i) {
        for (std::size_t j = 0; j < cb; ++j) {
          Vec row(nu, 0);
          for (std::size_t m = 0; m < kb; ++m)
            row[ub(m, j)] = f.add(row[ub(m, j)], rb.at(i, m));
          for (std::size_t m = 0; m < cb; ++m)
            row[ub(i, m)] = f.sub(row[ub(i, m)], spc.at(m, j));
          eqs.push_back(std::move(row));
        }
      }
    }
    std::vector<Vec> kernel = kernel_basis(f, std::move(eqs), nu);
    // Scan the solution space for projections surjective on both sorts.
    std::size_t d = kernel.size();
    std::vector<std::uint32_t> digits(d, 0);
    while (true) {
      if (!budget.tick()) return false;
      Vec u(nu, 0);
      for (std::size_t i = 0; i < d; ++i)
        if (digits[i] != 0)
          u = vec_add(f, u, vec_scale(f, digits[i], kernel[i]));
      FieldMatrix qa(f, ka, ca), qb(f, kb, cb);
      for (std::size_t i = 0; i < ka; ++i)
        for (std::size_t j = 0; j < ca; ++j) qa.set(i, j, u[ua(i, j)]);
      for (std::size_t i = 0; i < kb; ++i)
        for (std::size_t j = 0; j < cb; ++j) qb.set(i, j, u[ub(i, j)]);
      if (rank_of(qa) == ca && rank_of(qb) == cb) {
        LinearDivisorWitness w;
        w.sub_elems = sub;
        w.elem_map = pi;
        w.delta_a = da;
        w.delta_b = db;
        auto pa = solve_right(da.basis(), qa);
        auto pb = solve_right(db.basis(), qb);
        if (!pa || !pb)
          throw InternalError("projection lift failed in divisor search");
        w.pa = *pa;
        w.pb = *pb;
        WitnessCheck chk = verify_witness(claimed, host, w);
        if (!chk.ok)
          throw InternalError(
              "linear divisor search produced a bad witness: " + chk.detail);
        found = std::move(w);
        return true;
      }
      std::size_t i = 0;
      while (i < d && digits[i] + 1 == f.p) digits[i++] = 0;
      if (i == d) break;
      ++digits[i];
    }
    return false;
  }
};

}  // namespace

PureOracleResult divisor_oracle(const PureAutomaton& claimed,
                                const PureAutomaton& host,
                                std::uint64_t budget) {
  PureOracleSearch s{claimed, host, BudgetCounter{budget}, std::nullopt};
  s.run();
  PureOracleResult r;
  r.nodes_used = s.budget.used;
  if (s.found) {
    r.verdict = OracleVerdict::Found;
    r.witness = std::move(s.found);
  } else {
    r.verdict = s.budget.dead ? OracleVerdict::Exhausted
                              : OracleVerdict::Refuted;
  }
  return r;
}

LinearOracleResult divisor_oracle(const LinearAutomaton& claimed,
                                  const LinearAutomaton& host,
                                  std::uint64_t budget) {
  LinearOracleSearch s{claimed, host, BudgetCounter{budget}, std::nullopt,
                       false};
  s.run();
  LinearOracleResult r;
  r.nodes_used = s.budget.used;
  if (s.found) {
    r.verdict = OracleVerdict::Found;
    r.witness = std::move(s.found);
  } else if (s.type_refuted) {
    r.verdict = OracleVerdict::Refuted;
  } else {
    r.verdict = s.budget.dead ? OracleVerdict::Exhausted
                              : OracleVerdict::Refuted;
  }
  return r;
}

LinearAutomaton assemble_host(const std::vector<DecompositionTerm>& terms) {
  if (terms.empty()) throw Error("assemble_host: no terms");
  auto lift = [](const DecompositionTerm& t) {
    return t.pure ? wreath_linear_pure(t.linear, *t.pure).automaton : t.linear;
  };
  LinearAutomaton host = lift(terms.back());
  for (std::size_t i = terms.size() - 1; i > 0; --i)
    host = tri_automata(lift(terms[i - 1]), host);
  return host;
}

namespace {

bool same_linear_automaton(const LinearAutomaton& a, const LinearAutomaton& b) {
  return a.field.p == b.field.p && a.dimA == b.dimA && a.dimB == b.dimB &&
         a.gamma.size() == b.gamma.size() &&
         a.gamma.table() == b.gamma.table() && a.rep == b.rep;
}

// Oracle-backed check of one divisor claim; fills witness/flag and appends a
// note when the claim could not be settled within budget.
void settle_claim(const LinearAutomaton& claimed, const LinearAutomaton& host,
                  std::uint64_t budget, const char* what,
                  std::optional<LinearDivisorWitness>& witness, bool& verified,
                  std::string& note) {
  auto add_note = [&note](std::string s) {
    if (!note.empty()) note += "; ";
    note += std::move(s);
  };
  LinearOracleResult r;
  try {
    r = divisor_oracle(claimed, host, budget);
  } catch (const CapError&) {
    add_note(std::string(what) + ": paper-backed-unverified (host too large)");
    return;
  }
  switch (r.verdict) {
    case OracleVerdict::Found:
      witness = std::move(r.witness);
      verified = true;
      break;
    case OracleVerdict::Exhausted:
      add_note(std::string(what) +
               ": paper-backed-unverified (oracle budget exhausted)");
      break;
    case OracleVerdict::Refuted:
      add_note(std::string(what) + ": refuted by the oracle");
      break;
  }
}

}  // namespace

CorrectDecomposition make_correct_decomposition(const LinearAutomaton& target,
                                                std::vector<DecompositionTerm> terms,
                                                std::uint64_t budget) {
  if (terms.empty()) throw Error("make_correct_decomposition: no terms");
  CorrectDecomposition cd;
  cd.target = target;
  cd.terms = std::move(terms);
  cd.tri_ops = cd.terms.size() - 1;
  for (const DecompositionTerm& t : cd.terms)
    if (t.pure) ++cd.wr_linear_ops;
  cd.factor_witnesses.resize(cd.terms.size());
  cd.factor_verified.assign(cd.terms.size(), 0);
  try {
    LinearAutomaton host = assemble_host(cd.terms);
    settle_claim(cd.target, host, budget, "target claim", cd.target_witness,
                 cd.target_verified, cd.note);
  } catch (const CapError&) {
    cd.note = "target claim: paper-backed-unverified (host too large)";
  }
  for (std::size_t i = 0; i < cd.terms.size(); ++i) {
    bool ok = false;
    settle_claim(cd.terms[i].linear, cd.target, budget,
                 ("factor " + std::to_string(i)).c_str(),
                 cd.factor_witnesses[i], ok, cd.note);
    cd.factor_verified[i] = ok ? 1 : 0;
  }
  return cd;
}

CorrectDecomposition transitive_substitute(
    const CorrectDecomposition& outer,
    const std::vector<std::optional<CorrectDecomposition>>& inner,
    std::uint64_t budget) {
  if (inner.size() != outer.terms.size())
    throw Error("transitive_substitute: one inner slot per outer factor");
  if (!outer.target_verified)
    throw Error("transitive_substitute: outer target claim not verified");
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (!outer.factor_verified[i])
      throw Error("transitive_substitute: outer factor claim not verified");
    if (!inner[i]) continue;
    if (!inner[i]->target_verified)
      throw Error("transitive_substitute: inner target claim not verified");
    for (char v : inner[i]->factor_verified)
      if (!v) throw Error("transitive_substitute: inner factor not verified");
    if (!same_linear_automaton(inner[i]->target, outer.terms[i].linear))
      throw Error("transitive_substitute: inner target does not match factor " +
                  std::to_string(i));
  }
  CorrectDecomposition cd;
  cd.target = outer.target;
  cd.wr_pure_ops = outer.wr_pure_ops;
  for (std::size_t i = 0; i < outer.terms.size(); ++i) {
    if (!inner[i]) {
      cd.terms.push_back(outer.terms[i]);
      cd.factor_witnesses.push_back(outer.factor_witnesses[i]);
      cd.factor_verified.push_back(1);
      continue;
    }
    const CorrectDecomposition& in = *inner[i];
    cd.wr_pure_ops += in.wr_pure_ops;
    for (std::size_t j = 0; j < in.terms.size(); ++j) {
      DecompositionTerm t;
      t.linear = in.terms[j].linear;
      if (in.terms[j].pure && outer.terms[i].pure) {
        // (L wr P1) wr P2 = L wr (P1 wr P2): one linear wreath plus one pure
        // wreath, the same two operations as before the re-association.
        t.pure = wreath_pure(*in.terms[j].pure, *outer.terms[i].pure).automaton;
        ++cd.wr_pure_ops;
      } else if (in.terms[j].pure) {
        t.pure = in.terms[j].pure;
      } else if (outer.terms[i].pure) {
        t.pure = outer.terms[i].pure;
      }
      cd.terms.push_back(std::move(t));
      LinearDivisorWitness composed = compose_witnesses(
          in.terms[j].linear, in.target, cd.target, *in.factor_witnesses[j],
          *outer.factor_witnesses[i]);
      WitnessCheck chk =
          verify_witness(in.terms[j].linear, cd.target, composed);
      if (!chk.ok)
        throw InternalError("composed factor witness failed verification: " +
                            chk.detail);
      cd.factor_witnesses.push_back(std::move(composed));
      cd.factor_verified.push_back(1);
    }
  }
  cd.tri_ops = cd.terms.size() - 1;
  for (const DecompositionTerm& t : cd.terms)
    if (t.pure) ++cd.wr_linear_ops;
  try {
    LinearAutomaton host = assemble_host(cd.terms);
    settle_claim(cd.target, host, budget, "composed target claim",
                 cd.target_witness, cd.target_verified, cd.note);
  } catch (const CapError&) {
    cd.note = "composed target claim: paper-backed-unverified (host too large)";
  }
  return cd;
}

}  // namespace linat
