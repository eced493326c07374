#include "linat/semigroup.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace linat {
namespace {

// Detects the (unique) two-sided zero, if any.
std::optional<std::uint32_t> detect_zero(const FiniteSemigroup& s) {
  for (std::uint32_t z = 0; z < s.size(); ++z) {
    bool ok = true;
    for (std::uint32_t x = 0; x < s.size() && ok; ++x)
      ok = s.mul(z, x) == z && s.mul(x, z) == z;
    if (ok) return z;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> detect_identity(const FiniteSemigroup& s) {
  for (std::uint32_t e = 0; e < s.size(); ++e) {
    bool ok = true;
    for (std::uint32_t x = 0; x < s.size() && ok; ++x)
      ok = s.mul(e, x) == x && s.mul(x, e) == x;
    if (ok) return e;
  }
  return std::nullopt;
}

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

FiniteSemigroup FiniteSemigroup::from_table(std::size_t n, std::vector<std::uint32_t> table,
                                            std::optional<std::uint32_t> zero,
                                            std::optional<std::uint32_t> identity,
                                            std::vector<std::string> labels) {
  if (n == 0) throw Error("semigroup must be nonempty");
  if (table.size() != n * n) throw Error("multiplication table has wrong size");
  for (auto v : table)
    if (v >= n) throw Error("multiplication table entry out of range");
  if (!labels.empty() && labels.size() != n)
    throw Error("label count does not match semigroup order");
  FiniteSemigroup s;
  s.n_ = n;
  s.table_ = std::move(table);
  s.labels_ = std::move(labels);
  if (n <= caps().assoc_check) {
    if (!s.verify_associativity()) {
      for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
          for (std::uint32_t c = 0; c < n; ++c)
            if (s.mul(s.mul(a, b), c) != s.mul(a, s.mul(b, c))) {
              std::ostringstream os;
              os << "multiplication table is not associative: (" << a << " "
                 << b << ") " << c << " = " << s.mul(s.mul(a, b), c) << " but "
                 << a << " (" << b << " " << c << ") = "
                 << s.mul(a, s.mul(b, c));
              throw Error(os.str());
            }
      throw InternalError("associativity check disagreed with itself");
    }
    s.assoc_checked_ = true;
  }
  if (zero) {
    if (*zero >= n) throw Error("zero index out of range");
    for (std::uint32_t x = 0; x < n; ++x)
      if (s.mul(*zero, x) != *zero || s.mul(x, *zero) != *zero)
        throw Error("declared zero is not absorbing");
    s.zero_ = zero;
  } else {
    s.zero_ = detect_zero(s);
  }
  if (identity) {
    if (*identity >= n) throw Error("identity index out of range");
    for (std::uint32_t x = 0; x < n; ++x)
      if (s.mul(*identity, x) != x || s.mul(x, *identity) != x)
        throw Error("declared identity is not neutral");
    s.identity_ = identity;
  } else {
    s.identity_ = detect_identity(s);
  }
  return s;
}

bool FiniteSemigroup::verify_associativity() const {
  for (std::uint32_t a = 0; a < n_; ++a)
    for (std::uint32_t b = 0; b < n_; ++b) {
      const std::uint32_t ab = mul(a, b);
      for (std::uint32_t c = 0; c < n_; ++c)
        if (mul(ab, c) != mul(a, mul(b, c))) return false;
    }
  return true;
}

bool FiniteSemigroup::is_group() const {
  if (!identity_) return false;
  // With associativity, a Latin square containing an identity is a group.
  std::vector<bool> seen(n_);
  for (std::uint32_t i = 0; i < n_; ++i) {
    std::fill(seen.begin(), seen.end(), false);
    for (std::uint32_t j = 0; j < n_; ++j) seen[mul(i, j)] = true;
    for (bool b : seen)
      if (!b) return false;
    std::fill(seen.begin(), seen.end(), false);
    for (std::uint32_t j = 0; j < n_; ++j) seen[mul(j, i)] = true;
    for (bool b : seen)
      if (!b) return false;
  }
  return true;
}

std::vector<std::uint32_t> FiniteSemigroup::idempotents() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < n_; ++i)
    if (mul(i, i) == i) out.push_back(i);
  return out;
}

std::uint32_t FiniteSemigroup::inverse(std::uint32_t g) const {
  if (!identity_) throw Error("inverse requested in a semigroup without identity");
  for (std::uint32_t h = 0; h < n_; ++h)
    if (mul(g, h) == *identity_ && mul(h, g) == *identity_) return h;
  throw Error("element has no inverse");
}

bool FiniteSemigroup::operator==(const FiniteSemigroup& o) const {
  return n_ == o.n_ && table_ == o.table_;
}

FlipFlop flip_flop(std::size_t m) {
  if (m == 0) throw Error("flip-flop needs a nonempty state set");
  std::vector<std::uint32_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) table[i * m + j] = static_cast<std::uint32_t>(j);
  std::vector<std::string> labels(m);
  for (std::size_t j = 0; j < m; ++j) labels[j] = "to" + std::to_string(j);
  FlipFlop ff;
  ff.semigroup = FiniteSemigroup::from_table(m, std::move(table), std::nullopt, std::nullopt,
                                             std::move(labels));
  ff.carrier = m;
  ff.action.resize(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t j = 0; j < m; ++j) ff.action[a * m + j] = static_cast<std::uint32_t>(j);
  return ff;
}

FiniteSemigroup left_zero(std::size_t m) {
  if (m == 0) throw Error("left-zero semigroup must be nonempty");
  std::vector<std::uint32_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) table[i * m + j] = static_cast<std::uint32_t>(i);
  return FiniteSemigroup::from_table(m, std::move(table));
}

bool is_ideal(const FiniteSemigroup& s, const std::vector<std::uint32_t>& subset) {
  std::vector<bool> in(s.size(), false);
  for (auto x : subset) {
    if (x >= s.size()) throw Error("ideal member out of range");
    in[x] = true;
  }
  for (auto x : subset)
    for (std::uint32_t g = 0; g < s.size(); ++g)
      if (!in[s.mul(x, g)] || !in[s.mul(g, x)]) return false;
  return true;
}

std::vector<std::uint32_t> principal_ideal(const FiniteSemigroup& s, std::uint32_t x) {
  if (x >= s.size()) throw Error("element out of range");
  std::vector<std::uint32_t> out = {x};
  for (std::uint32_t g = 0; g < s.size(); ++g) {
    out.push_back(s.mul(x, g));
    out.push_back(s.mul(g, x));
    for (std::uint32_t h = 0; h < s.size(); ++h) out.push_back(s.mul(s.mul(g, x), h));
  }
  return sorted_unique(std::move(out));
}

std::vector<std::vector<std::uint32_t>> ideals(const FiniteSemigroup& s) {
  // Every ideal is a union of principal ideals, and unions of ideals are
  // ideals, so close the principal ideals under union starting from the empty
  // set.
  std::vector<std::vector<std::uint32_t>> principals;
  for (std::uint32_t x = 0; x < s.size(); ++x) principals.push_back(principal_ideal(s, x));
  std::set<std::vector<std::uint32_t>> found;
  found.insert(std::vector<std::uint32_t>{});
  std::vector<std::vector<std::uint32_t>> queue = {{}};
  while (!queue.empty()) {
    std::vector<std::uint32_t> cur = std::move(queue.back());
    queue.pop_back();
    for (const auto& p : principals) {
      std::vector<std::uint32_t> u;
      std::set_union(cur.begin(), cur.end(), p.begin(), p.end(), std::back_inserter(u));
      if (found.insert(u).second) {
        if (found.size() > caps().closure) throw CapError("ideal lattice exceeds cap");
        queue.push_back(std::move(u));
      }
    }
  }
  std::vector<std::vector<std::uint32_t>> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<std::uint32_t> min_ideal_above(const FiniteSemigroup& s,
                                           const std::vector<std::uint32_t>& u) {
  std::vector<std::uint32_t> base = sorted_unique(u);
  if (!base.empty() && !is_ideal(s, base)) throw Error("base set is not an ideal");
  if (base.size() == s.size()) throw Error("no ideal strictly above the whole semigroup");
  // Any ideal strictly above u contains u together with the principal ideal of
  // one outside element, so the inclusion-minimal candidates are among these.
  std::vector<std::vector<std::uint32_t>> cands;
  for (std::uint32_t x = 0; x < s.size(); ++x) {
    if (std::binary_search(base.begin(), base.end(), x)) continue;
    auto p = principal_ideal(s, x);
    std::vector<std::uint32_t> c;
    std::set_union(base.begin(), base.end(), p.begin(), p.end(), std::back_inserter(c));
    cands.push_back(std::move(c));
  }
  std::vector<std::vector<std::uint32_t>> minimal;
  for (const auto& c : cands) {
    bool is_min = true;
    for (const auto& d : cands)
      if (d.size() < c.size() && std::includes(c.begin(), c.end(), d.begin(), d.end())) {
        is_min = false;
        break;
      }
    if (is_min) minimal.push_back(c);
  }
  std::sort(minimal.begin(), minimal.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return minimal.front();
}

ReesQuotient rees_quotient(const FiniteSemigroup& s, const std::vector<std::uint32_t>& u) {
  std::vector<std::uint32_t> base = sorted_unique(u);
  if (!base.empty() && !is_ideal(s, base)) throw Error("Rees quotient requires an ideal");
  ReesQuotient out;
  out.old_to_new.assign(s.size(), 0);
  std::uint32_t next = 1;
  std::vector<std::uint32_t> new_to_old;  // index 1.. -> surviving old element
  for (std::uint32_t x = 0; x < s.size(); ++x) {
    if (std::binary_search(base.begin(), base.end(), x)) continue;
    out.old_to_new[x] = next++;
    new_to_old.push_back(x);
  }
  const std::size_t n = 1 + new_to_old.size();
  std::vector<std::uint32_t> table(n * n, 0);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j)
      table[i * n + j] = out.old_to_new[s.mul(new_to_old[i - 1], new_to_old[j - 1])];
  std::vector<std::string> labels;
  if (!s.labels().empty()) {
    labels.resize(n);
    labels[0] = "0";
    for (std::size_t i = 1; i < n; ++i) labels[i] = s.labels()[new_to_old[i - 1]];
  }
  out.semigroup = FiniteSemigroup::from_table(n, std::move(table), 0, std::nullopt,
                                              std::move(labels));
  return out;
}

FiniteSemigroup adjoin_zero(const FiniteSemigroup& s) {
  return rees_quotient(s, {}).semigroup;
}

bool is_completely_zero_simple(const FiniteSemigroup& s) {
  auto z = s.zero();
  if (!z || s.size() < 2) return false;
  bool square_nonzero = false;
  for (std::uint32_t i = 0; i < s.size() && !square_nonzero; ++i)
    for (std::uint32_t j = 0; j < s.size() && !square_nonzero; ++j)
      if (s.mul(i, j) != *z) square_nonzero = true;
  if (!square_nonzero) return false;
  // 0-simple: the principal ideal of every nonzero element is everything.
  // Finite 0-simple semigroups are completely 0-simple.
  for (std::uint32_t x = 0; x < s.size(); ++x) {
    if (x == *z) continue;
    if (principal_ideal(s, x).size() != s.size()) return false;
  }
  return true;
}

FiniteSemigroup subsemigroup(const FiniteSemigroup& s, const std::vector<std::uint32_t>& subset) {
  std::vector<std::uint32_t> elems = sorted_unique(subset);
  if (elems.empty()) throw Error("subsemigroup must be nonempty");
  std::vector<std::uint32_t> pos(s.size(), UINT32_MAX);
  for (std::uint32_t i = 0; i < elems.size(); ++i) {
    if (elems[i] >= s.size()) throw Error("subsemigroup member out of range");
    pos[elems[i]] = i;
  }
  const std::size_t n = elems.size();
  std::vector<std::uint32_t> table(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::uint32_t p = s.mul(elems[i], elems[j]);
      if (pos[p] == UINT32_MAX) throw Error("subset is not closed under multiplication");
      table[i * n + j] = pos[p];
    }
  std::vector<std::string> labels;
  if (!s.labels().empty()) {
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = s.labels()[elems[i]];
  }
  return FiniteSemigroup::from_table(n, std::move(table), std::nullopt, std::nullopt,
                                     std::move(labels));
}

std::uint32_t ReesStructure::element_of(std::size_t x, std::uint32_t g, std::size_t y) const {
  if (!source) throw InternalError("Rees structure lost its source semigroup");
  if (x >= x_size || y >= y_size || g >= group.size())
    throw Error("Rees coordinate out of range");
  return source->mul(source->mul(row_reps[x], group_elems[g]), col_reps[y]);
}

void ReesStructure::triple_of(std::uint32_t elem, std::size_t& x, std::uint32_t& g,
                              std::size_t& y) const {
  if (elem >= elem_code.size() || elem_code[elem] == 0)
    throw Error("element has no Rees coordinates");
  std::uint32_t code = elem_code[elem] - 1;
  y = code % y_size;
  code /= static_cast<std::uint32_t>(y_size);
  g = code % static_cast<std::uint32_t>(group.size());
  x = code / static_cast<std::uint32_t>(group.size());
}

ReesStructure rees_structure(const FiniteSemigroup& s) {
  if (!is_completely_zero_simple(s))
    throw Error("Rees coordinates need a completely 0-simple semigroup");
  const std::uint32_t z = *s.zero();
  const std::size_t n = s.size();

  // Green's R and L classes of the nonzero elements, via principal one-sided
  // ideals.
  auto r_key = [&](std::uint32_t a) {
    std::vector<std::uint32_t> k = {a};
    for (std::uint32_t g = 0; g < n; ++g) k.push_back(s.mul(a, g));
    return sorted_unique(std::move(k));
  };
  auto l_key = [&](std::uint32_t a) {
    std::vector<std::uint32_t> k = {a};
    for (std::uint32_t g = 0; g < n; ++g) k.push_back(s.mul(g, a));
    return sorted_unique(std::move(k));
  };
  std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> rcls, lcls;
  for (std::uint32_t a = 0; a < n; ++a) {
    if (a == z) continue;
    rcls[r_key(a)].push_back(a);
    lcls[l_key(a)].push_back(a);
  }
  std::vector<std::vector<std::uint32_t>> rclasses, lclasses;
  for (auto& [k, v] : rcls) rclasses.push_back(v);
  for (auto& [k, v] : lcls) lclasses.push_back(v);
  auto by_least = [](const auto& a, const auto& b) { return a.front() < b.front(); };
  std::sort(rclasses.begin(), rclasses.end(), by_least);
  std::sort(lclasses.begin(), lclasses.end(), by_least);

  std::vector<std::uint32_t> rof(n, UINT32_MAX), lof(n, UINT32_MAX);
  for (std::uint32_t i = 0; i < rclasses.size(); ++i)
    for (auto a : rclasses[i]) rof[a] = i;
  for (std::uint32_t j = 0; j < lclasses.size(); ++j)
    for (auto a : lclasses[j]) lof[a] = j;

  std::uint32_t e = UINT32_MAX;
  for (auto i : s.idempotents())
    if (i != z) {
      e = i;
      break;
    }
  if (e == UINT32_MAX) throw InternalError("completely 0-simple semigroup without idempotent");
  const std::uint32_t x0 = rof[e], y0 = lof[e];

  ReesStructure rs;
  rs.source = &s;
  rs.zero_elem = z;
  rs.x_size = rclasses.size();
  rs.y_size = lclasses.size();

  // H-class members as intersections R_x with L_y.
  auto h_class = [&](std::uint32_t x, std::uint32_t y) {
    std::vector<std::uint32_t> out;
    for (auto a : rclasses[x])
      if (lof[a] == y) out.push_back(a);
    return out;  // sorted: rclasses[x] is sorted
  };

  rs.group_elems = h_class(x0, y0);
  rs.group_identity_elem = e;
  std::vector<std::uint32_t> gpos(n, UINT32_MAX);
  for (std::uint32_t i = 0; i < rs.group_elems.size(); ++i) gpos[rs.group_elems[i]] = i;
  {
    const std::size_t m = rs.group_elems.size();
    std::vector<std::uint32_t> gt(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        std::uint32_t p = s.mul(rs.group_elems[i], rs.group_elems[j]);
        if (gpos[p] == UINT32_MAX)
          throw InternalError("group H-class is not closed under multiplication");
        gt[i * m + j] = gpos[p];
      }
    std::vector<std::string> glabels;
    if (!s.labels().empty()) {
      glabels.resize(m);
      for (std::size_t i = 0; i < m; ++i) glabels[i] = s.labels()[rs.group_elems[i]];
    }
    rs.group = FiniteSemigroup::from_table(m, std::move(gt), std::nullopt, gpos[e],
                                           std::move(glabels));
    if (!rs.group.is_group()) throw InternalError("H-class of an idempotent is not a group");
  }

  rs.row_reps.resize(rs.x_size);
  for (std::uint32_t x = 0; x < rs.x_size; ++x) {
    auto h = h_class(x, y0);
    if (h.empty()) throw InternalError("empty H-class in a completely 0-simple semigroup");
    rs.row_reps[x] = (x == x0) ? e : h.front();
  }
  rs.col_reps.resize(rs.y_size);
  for (std::uint32_t y = 0; y < rs.y_size; ++y) {
    auto h = h_class(x0, y);
    if (h.empty()) throw InternalError("empty H-class in a completely 0-simple semigroup");
    rs.col_reps[y] = (y == y0) ? e : h.front();
  }

  rs.sandwich.assign(rs.y_size * rs.x_size, 0);
  for (std::uint32_t y = 0; y < rs.y_size; ++y)
    for (std::uint32_t x = 0; x < rs.x_size; ++x) {
      std::uint32_t p = s.mul(rs.col_reps[y], rs.row_reps[x]);
      if (p == z) continue;
      if (gpos[p] == UINT32_MAX)
        throw InternalError("sandwich product escapes the structure group");
      rs.sandwich[y * rs.x_size + x] = 1 + gpos[p];
    }

  // Coordinates (x, g, y) -> r_x g q_y must enumerate the nonzero elements
  // exactly once.
  rs.elem_code.assign(n, 0);
  const std::uint32_t gsz = static_cast<std::uint32_t>(rs.group.size());
  for (std::uint32_t x = 0; x < rs.x_size; ++x)
    for (std::uint32_t g = 0; g < gsz; ++g)
      for (std::uint32_t y = 0; y < rs.y_size; ++y) {
        std::uint32_t m = rs.element_of(x, g, y);
        if (m == z) throw InternalError("Rees coordinates hit the zero element");
        std::uint32_t code = 1 + (x * gsz + g) * static_cast<std::uint32_t>(rs.y_size) + y;
        if (rs.elem_code[m] != 0) throw InternalError("Rees coordinates collide");
        rs.elem_code[m] = code;
      }
  for (std::uint32_t a = 0; a < n; ++a)
    if (a != z && rs.elem_code[a] == 0)
      throw InternalError("Rees coordinates miss a nonzero element");
  return rs;
}

namespace {

// Subgroup generated by a subset, by table closure (finite, so a subsemigroup
// of a group is a subgroup).
std::vector<std::uint32_t> generated_subgroup(const FiniteSemigroup& g,
                                              std::vector<std::uint32_t> gens) {
  std::vector<bool> in(g.size(), false);
  std::vector<std::uint32_t> queue;
  for (auto x : gens)
    if (!in[x]) {
      in[x] = true;
      queue.push_back(x);
    }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (std::uint32_t p : {g.mul(queue[head], queue[i]), g.mul(queue[i], queue[head])})
        if (!in[p]) {
          in[p] = true;
          queue.push_back(p);
        }
    }
  std::sort(queue.begin(), queue.end());
  return queue;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> subgroups(const FiniteSemigroup& g) {
  if (!g.is_group()) throw Error("subgroup enumeration needs a group");
  const std::uint32_t e = *g.identity();
  std::set<std::vector<std::uint32_t>> found;
  std::vector<std::vector<std::uint32_t>> queue;
  found.insert({e});
  queue.push_back({e});
  while (!queue.empty()) {
    std::vector<std::uint32_t> h = std::move(queue.back());
    queue.pop_back();
    for (std::uint32_t x = 0; x < g.size(); ++x) {
      if (std::binary_search(h.begin(), h.end(), x)) continue;
      std::vector<std::uint32_t> gens = h;
      gens.push_back(x);
      auto k = generated_subgroup(g, std::move(gens));
      if (found.insert(k).second) queue.push_back(std::move(k));
    }
  }
  std::vector<std::vector<std::uint32_t>> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

bool is_normal_in(const FiniteSemigroup& g, const std::vector<std::uint32_t>& subset) {
  std::vector<bool> in(g.size(), false);
  for (auto x : subset) in[x] = true;
  for (std::uint32_t x = 0; x < g.size(); ++x) {
    std::uint32_t xi = g.inverse(x);
    for (auto h : subset)
      if (!in[g.mul(g.mul(x, h), xi)]) return false;
  }
  return true;
}

std::vector<std::vector<std::uint32_t>> normal_subgroups(const FiniteSemigroup& g) {
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& h : subgroups(g))
    if (is_normal_in(g, h)) out.push_back(h);
  return out;
}

std::vector<std::vector<std::uint32_t>> maximal_proper_normal_subgroups(const FiniteSemigroup& g) {
  auto normals = normal_subgroups(g);
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& a : normals) {
    if (a.size() == g.size()) continue;
    bool maximal = true;
    for (const auto& b : normals) {
      if (b.size() == g.size() || b.size() <= a.size()) continue;
      if (std::includes(b.begin(), b.end(), a.begin(), a.end())) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(a);
  }
  return out;  // inherits (size, lex) order from subgroups()
}

bool is_simple_group(const FiniteSemigroup& g) {
  if (!g.is_group() || g.size() < 2) return false;
  return normal_subgroups(g).size() == 2;
}

std::vector<std::vector<std::uint32_t>> composition_series(const FiniteSemigroup& g) {
  if (!g.is_group()) throw Error("composition series needs a group");
  std::vector<std::uint32_t> whole(g.size());
  for (std::uint32_t i = 0; i < g.size(); ++i) whole[i] = i;
  std::vector<std::vector<std::uint32_t>> series = {whole};
  std::vector<std::uint32_t> cur = whole;
  while (cur.size() > 1) {
    FiniteSemigroup sub = subsemigroup(g, cur);
    auto maxima = maximal_proper_normal_subgroups(sub);
    if (maxima.empty()) throw InternalError("nontrivial group without maximal normal subgroup");
    // maxima is (size, lex)-sorted; take the lexicographically least among the
    // largest (a maximal normal subgroup of largest order gives the smallest
    // simple factor first; any choice is valid, this one is deterministic).
    std::vector<std::uint32_t> next_local = maxima.back();
    for (const auto& m : maxima)
      if (m.size() == maxima.back().size()) {
        next_local = m;
        break;
      }
    std::vector<std::uint32_t> next;
    for (auto i : next_local) next.push_back(cur[i]);
    std::sort(next.begin(), next.end());
    series.push_back(next);
    cur = std::move(next);
  }
  return series;
}

QuotientGroup quotient_group(const FiniteSemigroup& g, const std::vector<std::uint32_t>& normal) {
  if (!g.is_group()) throw Error("group quotient needs a group");
  std::vector<std::uint32_t> nset = sorted_unique(normal);
  if (!is_normal_in(g, nset)) throw Error("quotient requires a normal subgroup");
  QuotientGroup out;
  out.coset_of.assign(g.size(), UINT32_MAX);
  for (std::uint32_t x = 0; x < g.size(); ++x) {
    if (out.coset_of[x] != UINT32_MAX) continue;
    std::uint32_t c = static_cast<std::uint32_t>(out.coset_rep.size());
    out.coset_rep.push_back(x);  // x is the least member: scan order
    for (auto h : nset) out.coset_of[g.mul(x, h)] = c;
    if (out.coset_of[x] != c) throw InternalError("coset does not contain its representative");
  }
  const std::size_t m = out.coset_rep.size();
  std::vector<std::uint32_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      table[i * m + j] = out.coset_of[g.mul(out.coset_rep[i], out.coset_rep[j])];
  std::vector<std::string> labels;
  if (!g.labels().empty()) {
    labels.resize(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = g.labels()[out.coset_rep[i]] + "N";
  }
  out.group = FiniteSemigroup::from_table(m, std::move(table), std::nullopt,
                                          out.coset_of[*g.identity()], std::move(labels));
  if (!out.group.is_group()) throw InternalError("quotient by a normal subgroup is not a group");
  return out;
}

std::uint64_t WreathSemigroup::encode(const std::vector<std::uint32_t>& f,
                                      std::uint32_t t) const {
  if (f.size() != carrier || t >= n2) throw Error("wreath element out of range");
  std::uint64_t fidx = 0, place = 1;
  for (std::size_t c = 0; c < carrier; ++c) {
    if (f[c] >= n1) throw Error("wreath element out of range");
    fidx += place * f[c];
    place *= n1;
  }
  return fidx * n2 + t;
}

std::uint32_t WreathSemigroup::f_at(std::uint64_t elem, std::size_t c) const {
  std::uint64_t fidx = elem / n2;
  for (std::size_t i = 0; i < c; ++i) fidx /= n1;
  return static_cast<std::uint32_t>(fidx % n1);
}

std::uint32_t WreathSemigroup::second(std::uint64_t elem) const {
  return static_cast<std::uint32_t>(elem % n2);
}

WreathSemigroup wreath_semigroup(const FiniteSemigroup& g1, std::size_t carrier,
                                 const std::vector<std::uint32_t>& act,
                                 const FiniteSemigroup& g2, std::size_t cap) {
  if (carrier == 0) throw Error("wreath carrier must be nonempty");
  if (act.size() != carrier * g2.size()) throw Error("carrier action table has wrong size");
  for (auto v : act)
    if (v >= carrier) throw Error("carrier action entry out of range");
  // The action must be a right action: c o (t t') = (c o t) o t'.
  for (std::size_t c = 0; c < carrier; ++c)
    for (std::uint32_t t = 0; t < g2.size(); ++t)
      for (std::uint32_t u = 0; u < g2.size(); ++u)
        if (act[act[c * g2.size() + t] * g2.size() + u] != act[c * g2.size() + g2.mul(t, u)])
          throw Error("carrier action is not compatible with multiplication");

  double count = static_cast<double>(g2.size());
  for (std::size_t c = 0; c < carrier; ++c) {
    count *= static_cast<double>(g1.size());
    if (count > static_cast<double>(cap))
      throw CapError("wreath product exceeds cap of " + std::to_string(cap) + " elements");
  }
  const std::uint64_t n = [&] {
    std::uint64_t v = g2.size();
    for (std::size_t c = 0; c < carrier; ++c) v *= g1.size();
    return v;
  }();
  if (n > caps().table) throw CapError("wreath product exceeds table cap");

  WreathSemigroup w;
  w.n1 = g1.size();
  w.carrier = carrier;
  w.n2 = g2.size();
  std::vector<std::uint32_t> table(n * n);
  std::vector<std::uint32_t> f(carrier), fp(carrier), prod(carrier);
  for (std::uint64_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < carrier; ++c) f[c] = w.f_at(a, c);
    const std::uint32_t t = w.second(a);
    for (std::uint64_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < carrier; ++c) fp[c] = w.f_at(b, c);
      const std::uint32_t tp = w.second(b);
      for (std::size_t c = 0; c < carrier; ++c)
        prod[c] = g1.mul(f[c], fp[act[c * g2.size() + t]]);
      table[a * n + b] = static_cast<std::uint32_t>(w.encode(prod, g2.mul(t, tp)));
    }
  }
  w.semigroup = FiniteSemigroup::from_table(n, std::move(table));
  return w;
}

SemigroupCongruence congruence_from_keys(const FiniteSemigroup& s,
                                         const std::vector<std::string>& keys) {
  if (keys.size() != s.size()) throw Error("key count does not match semigroup order");
  SemigroupCongruence out;
  out.class_of.assign(s.size(), UINT32_MAX);
  std::map<std::string, std::uint32_t> idx;
  for (std::uint32_t x = 0; x < s.size(); ++x) {
    auto [it, fresh] = idx.emplace(keys[x], static_cast<std::uint32_t>(out.classes.size()));
    if (fresh) out.classes.push_back({});
    out.class_of[x] = it->second;
    out.classes[it->second].push_back(x);
  }
  // Reorder classes by least member for determinism.
  std::vector<std::uint32_t> order(out.classes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return out.classes[a].front() < out.classes[b].front();
  });
  std::vector<std::uint32_t> rank(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  std::vector<std::vector<std::uint32_t>> classes(out.classes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) classes[i] = std::move(out.classes[order[i]]);
  out.classes = std::move(classes);
  for (auto& c : out.class_of) c = rank[c];

  for (const auto& cls : out.classes) {
    const std::uint32_t rep = cls.front();
    for (auto a : cls)
      for (std::uint32_t c = 0; c < s.size(); ++c)
        if (out.class_of[s.mul(a, c)] != out.class_of[s.mul(rep, c)] ||
            out.class_of[s.mul(c, a)] != out.class_of[s.mul(c, rep)])
          throw Error("key partition is not a congruence");
  }
  return out;
}

FiniteSemigroup quotient_semigroup(const FiniteSemigroup& s, const SemigroupCongruence& c) {
  const std::size_t m = c.classes.size();
  std::vector<std::uint32_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      table[i * m + j] = c.class_of[s.mul(c.classes[i].front(), c.classes[j].front())];
  std::vector<std::string> labels;
  if (!s.labels().empty()) {
    labels.resize(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = s.labels()[c.classes[i].front()];
  }
  return FiniteSemigroup::from_table(m, std::move(table), std::nullopt, std::nullopt,
                                     std::move(labels));
}

}  // namespace linat
