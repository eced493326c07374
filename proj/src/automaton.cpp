#include "linat/automaton.hpp"

#include <sstream>

namespace linat {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t limit,
                          const char* what) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > limit / base)
      throw CapError(std::string(what) + " exceeds cap of " + std::to_string(limit));
    r *= base;
  }
  return r;
}

}  // namespace

PureAutomaton PureAutomaton::make(std::size_t nA, std::size_t nB, FiniteSemigroup gamma,
                                  std::vector<std::uint32_t> circ,
                                  std::vector<std::uint32_t> star) {
  if (nA == 0) throw Error("pure automaton needs a nonempty state set");
  const std::size_t n = gamma.size();
  if (n == 0) throw Error("pure automaton needs a nonempty semigroup");
  if (circ.size() != nA * n) throw Error("transition table has wrong size");
  if (nB == 0 && !star.empty()) throw Error("output table present but output set empty");
  if (nB > 0 && star.size() != nA * n) throw Error("output table has wrong size");
  for (std::uint32_t v : circ)
    if (v >= nA) throw Error("transition target out of range");
  for (std::uint32_t v : star)
    if (v >= nB) throw Error("output value out of range");
  PureAutomaton a;
  a.nA = nA;
  a.nB = nB;
  a.gamma = std::move(gamma);
  a.circ = std::move(circ);
  a.star = std::move(star);
  return a;
}

LinearAutomaton LinearAutomaton::make(PrimeField field, std::size_t dimA, std::size_t dimB,
                                      FiniteSemigroup gamma, std::vector<FieldMatrix> rep) {
  if (gamma.size() == 0) throw Error("linear automaton needs a nonempty semigroup");
  if (rep.size() != gamma.size()) throw Error("one block matrix per element required");
  const std::size_t d = dimA + dimB;
  for (const FieldMatrix& m : rep) {
    if (m.rows() != d || m.cols() != d) throw Error("block matrix has wrong shape");
    if (!(m.field() == field)) throw Error("block matrix over wrong field");
    for (std::size_t r = dimA; r < d; ++r)
      for (std::size_t c = 0; c < dimA; ++c)
        if (m.at(r, c) != 0) throw Error("lower left block must be zero");
  }
  LinearAutomaton l;
  l.field = field;
  l.dimA = dimA;
  l.dimB = dimB;
  l.gamma = std::move(gamma);
  l.rep = std::move(rep);
  return l;
}

LinearAutomaton LinearAutomaton::from_blocks(PrimeField field, std::size_t dimA,
                                             std::size_t dimB, FiniteSemigroup gamma,
                                             const std::vector<FieldMatrix>& sigmas,
                                             const std::vector<FieldMatrix>& phis,
                                             const std::vector<FieldMatrix>& sigma_primes) {
  const std::size_t n = gamma.size();
  if (sigmas.size() != n || phis.size() != n || sigma_primes.size() != n)
    throw Error("one sigma/phi/sigmaPrime triple per element required");
  std::vector<FieldMatrix> rep;
  rep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sigmas[i].rows() != dimA || sigmas[i].cols() != dimA ||
        phis[i].rows() != dimA || phis[i].cols() != dimB ||
        sigma_primes[i].rows() != dimB || sigma_primes[i].cols() != dimB)
      throw Error("block has wrong shape");
    FieldMatrix m(field, dimA + dimB, dimA + dimB);
    m.paste(0, 0, sigmas[i]);
    m.paste(0, dimA, phis[i]);
    m.paste(dimA, dimA, sigma_primes[i]);
    rep.push_back(std::move(m));
  }
  return make(field, dimA, dimB, std::move(gamma), std::move(rep));
}

LinearRepresentation LinearRepresentation::make(PrimeField field, std::size_t dim,
                                                FiniteSemigroup gamma,
                                                std::vector<FieldMatrix> mats) {
  if (gamma.size() == 0) throw Error("representation needs a nonempty semigroup");
  if (mats.size() != gamma.size()) throw Error("one matrix per element required");
  for (const FieldMatrix& m : mats)
    if (m.rows() != dim || m.cols() != dim || !(m.field() == field))
      throw Error("representation matrix has wrong shape or field");
  LinearRepresentation r;
  r.field = field;
  r.dim = dim;
  r.gamma = std::move(gamma);
  r.mats = std::move(mats);
  return r;
}

LinearRepresentation automaton_as_representation(const LinearAutomaton& l) {
  return LinearRepresentation::make(l.field, l.dim(), l.gamma, l.rep);
}

LinearAutomaton representation_as_automaton(const LinearRepresentation& r) {
  return LinearAutomaton::make(r.field, r.dim, 0, r.gamma, r.mats);
}

std::string AxiomReport::describe() const {
  if (violations.empty()) return "ok";
  std::ostringstream os;
  os << violations.size() << " violation(s); first: axiom " << violations[0].axiom
     << " at elements (" << violations[0].g1 << ", " << violations[0].g2 << ")";
  return os.str();
}

AxiomReport check_pure_axioms(const PureAutomaton& a) {
  AxiomReport rep;
  const std::size_t n = a.gamma.size();
  for (std::uint32_t g1 = 0; g1 < n; ++g1)
    for (std::uint32_t g2 = 0; g2 < n; ++g2) {
      const std::uint32_t g12 = a.gamma.mul(g1, g2);
      for (std::uint32_t s = 0; s < a.nA; ++s) {
        if (a.circ_at(s, g12) != a.circ_at(a.circ_at(s, g1), g2))
          rep.violations.push_back({1, g1, g2, s});
        if (a.nB > 0 && a.star_at(s, g12) != a.star_at(a.circ_at(s, g1), g2))
          rep.violations.push_back({2, g1, g2, s});
      }
    }
  return rep;
}

AxiomReport check_linear_axioms(const LinearAutomaton& l) {
  AxiomReport rep;
  const std::size_t n = l.gamma.size();
  for (std::uint32_t g1 = 0; g1 < n; ++g1)
    for (std::uint32_t g2 = 0; g2 < n; ++g2) {
      const FieldMatrix prod = mat_mul(l.rep[g1], l.rep[g2]);
      const FieldMatrix& tgt = l.rep[l.gamma.mul(g1, g2)];
      if (!(prod.block(0, 0, l.dimA, l.dimA) == tgt.block(0, 0, l.dimA, l.dimA)))
        rep.violations.push_back({1, g1, g2, 0});
      if (!(prod.block(0, l.dimA, l.dimA, l.dimB) == tgt.block(0, l.dimA, l.dimA, l.dimB)))
        rep.violations.push_back({2, g1, g2, 0});
      if (!(prod.block(l.dimA, l.dimA, l.dimB, l.dimB) ==
            tgt.block(l.dimA, l.dimA, l.dimB, l.dimB)))
        rep.violations.push_back({3, g1, g2, 0});
    }
  return rep;
}

AxiomReport check_representation(const LinearRepresentation& r) {
  AxiomReport rep;
  const std::size_t n = r.gamma.size();
  for (std::uint32_t g1 = 0; g1 < n; ++g1)
    for (std::uint32_t g2 = 0; g2 < n; ++g2)
      if (!(mat_mul(r.mats[g1], r.mats[g2]) == r.mats[r.gamma.mul(g1, g2)]))
        rep.violations.push_back({1, g1, g2, 0});
  return rep;
}

PureAutomaton universal_pure(std::size_t nA, std::size_t nB) {
  if (nA == 0) throw Error("universal pure automaton needs a nonempty state set");
  const std::uint64_t limit = caps().table;
  const std::uint64_t n_sigma = checked_pow(nA, nA, limit, "universal pure semigroup");
  const std::uint64_t n_f =
      nB == 0 ? 1 : checked_pow(nB, nA, limit, "universal pure semigroup");
  if (n_sigma > limit / n_f)
    throw CapError("universal pure semigroup exceeds cap of " + std::to_string(limit));
  const std::size_t n = static_cast<std::size_t>(n_sigma * n_f);

  // Element i = sidx + nA^nA * fidx; s(a) = digit a of sidx in base nA,
  // f(a) = digit a of fidx in base nB.
  auto s_of = [&](std::size_t idx, std::uint32_t a) {
    std::size_t v = idx % n_sigma;
    for (std::uint32_t k = 0; k < a; ++k) v /= nA;
    return static_cast<std::uint32_t>(v % nA);
  };
  auto f_of = [&](std::size_t idx, std::uint32_t a) {
    std::size_t v = idx / n_sigma;
    for (std::uint32_t k = 0; k < a; ++k) v /= nB;
    return static_cast<std::uint32_t>(v % nB);
  };
  auto encode = [&](const std::vector<std::uint32_t>& s,
                    const std::vector<std::uint32_t>& f) {
    std::size_t sidx = 0, fidx = 0;
    for (std::size_t a = nA; a-- > 0;) sidx = sidx * nA + s[a];
    if (nB > 0)
      for (std::size_t a = nA; a-- > 0;) fidx = fidx * nB + f[a];
    return static_cast<std::uint32_t>(sidx + n_sigma * fidx);
  };

  // (s1, f1)(s2, f2) = (s1 followed by s2, s1 followed by f2): states first
  // move along the left factor.
  std::vector<std::uint32_t> table(n * n);
  std::vector<std::uint32_t> s(nA), f(nA);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::uint32_t a = 0; a < nA; ++a) {
        const std::uint32_t mid = s_of(i, a);
        s[a] = s_of(j, mid);
        if (nB > 0) f[a] = f_of(j, mid);
      }
      table[i * n + j] = encode(s, f);
    }
  FiniteSemigroup gamma = FiniteSemigroup::from_table(n, std::move(table));

  std::vector<std::uint32_t> circ(nA * n), star;
  if (nB > 0) star.resize(nA * n);
  for (std::uint32_t a = 0; a < nA; ++a)
    for (std::size_t g = 0; g < n; ++g) {
      circ[a * n + g] = s_of(g, a);
      if (nB > 0) star[a * n + g] = f_of(g, a);
    }
  return PureAutomaton::make(nA, nB, std::move(gamma), std::move(circ), std::move(star));
}

LinearAutomaton universal_linear(PrimeField field, std::size_t dimA, std::size_t dimB) {
  const std::size_t cells = dimA * dimA + dimA * dimB + dimB * dimB;
  const std::uint64_t n64 = checked_pow(field.p, cells, caps().table, "universal linear semigroup");
  const std::size_t n = static_cast<std::size_t>(n64);
  const std::size_t d = dimA + dimB;

  // Element index: little-endian base-p digits over sigma row-major, then phi
  // row-major, then sigmaPrime row-major.
  auto decode = [&](std::size_t idx) {
    FieldMatrix m(field, d, d);
    auto next = [&]() {
      std::uint32_t v = static_cast<std::uint32_t>(idx % field.p);
      idx /= field.p;
      return v;
    };
    for (std::size_t r = 0; r < dimA; ++r)
      for (std::size_t c = 0; c < dimA; ++c) m.set(r, c, next());
    for (std::size_t r = 0; r < dimA; ++r)
      for (std::size_t c = 0; c < dimB; ++c) m.set(r, dimA + c, next());
    for (std::size_t r = 0; r < dimB; ++r)
      for (std::size_t c = 0; c < dimB; ++c) m.set(dimA + r, dimA + c, next());
    return m;
  };
  auto encode = [&](const FieldMatrix& m) {
    std::uint64_t idx = 0, scale = 1;
    auto push = [&](std::uint32_t v) {
      idx += scale * v;
      scale *= field.p;
    };
    for (std::size_t r = 0; r < dimA; ++r)
      for (std::size_t c = 0; c < dimA; ++c) push(m.at(r, c));
    for (std::size_t r = 0; r < dimA; ++r)
      for (std::size_t c = 0; c < dimB; ++c) push(m.at(r, dimA + c));
    for (std::size_t r = 0; r < dimB; ++r)
      for (std::size_t c = 0; c < dimB; ++c) push(m.at(dimA + r, dimA + c));
    return static_cast<std::uint32_t>(idx);
  };

  std::vector<FieldMatrix> rep;
  rep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rep.push_back(decode(i));
  std::vector<std::uint32_t> table(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = encode(mat_mul(rep[i], rep[j]));
  FiniteSemigroup gamma = FiniteSemigroup::from_table(n, std::move(table));
  return LinearAutomaton::make(field, dimA, dimB, std::move(gamma), std::move(rep));
}

namespace {

std::vector<std::string> pure_action_keys(const PureAutomaton& a) {
  const std::size_t n = a.gamma.size();
  std::vector<std::string> keys(n);
  for (std::size_t g = 0; g < n; ++g) {
    std::ostringstream os;
    for (std::uint32_t s = 0; s < a.nA; ++s) {
      os << a.circ_at(s, static_cast<std::uint32_t>(g)) << ',';
      if (a.nB > 0) os << a.star_at(s, static_cast<std::uint32_t>(g)) << ';';
    }
    keys[g] = os.str();
  }
  return keys;
}

std::vector<std::string> matrix_keys(const std::vector<FieldMatrix>& mats) {
  std::vector<std::string> keys(mats.size());
  for (std::size_t g = 0; g < mats.size(); ++g) {
    std::ostringstream os;
    for (std::uint32_t v : mats[g].data()) os << v << ',';
    keys[g] = os.str();
  }
  return keys;
}

}  // namespace

FaithfulPure faithful(const PureAutomaton& a) {
  SemigroupCongruence cong = congruence_from_keys(a.gamma, pure_action_keys(a));
  FiniteSemigroup q = quotient_semigroup(a.gamma, cong);
  const std::size_t m = q.size();
  std::vector<std::uint32_t> circ(a.nA * m), star;
  if (a.nB > 0) star.resize(a.nA * m);
  for (std::uint32_t s = 0; s < a.nA; ++s)
    for (std::uint32_t c = 0; c < m; ++c) {
      const std::uint32_t g = cong.classes[c].front();
      circ[s * m + c] = a.circ_at(s, g);
      if (a.nB > 0) star[s * m + c] = a.star_at(s, g);
    }
  return {PureAutomaton::make(a.nA, a.nB, std::move(q), std::move(circ), std::move(star)),
          cong.class_of};
}

FaithfulLinear faithful(const LinearAutomaton& l) {
  SemigroupCongruence cong = congruence_from_keys(l.gamma, matrix_keys(l.rep));
  FiniteSemigroup q = quotient_semigroup(l.gamma, cong);
  std::vector<FieldMatrix> rep;
  rep.reserve(q.size());
  for (const auto& cls : cong.classes) rep.push_back(l.rep[cls.front()]);
  return {LinearAutomaton::make(l.field, l.dimA, l.dimB, std::move(q), std::move(rep)),
          cong.class_of};
}

LinearRepresentation faithful_representation(const LinearRepresentation& r) {
  SemigroupCongruence cong = congruence_from_keys(r.gamma, matrix_keys(r.mats));
  FiniteSemigroup q = quotient_semigroup(r.gamma, cong);
  std::vector<FieldMatrix> mats;
  mats.reserve(q.size());
  for (const auto& cls : cong.classes) mats.push_back(r.mats[cls.front()]);
  return LinearRepresentation::make(r.field, r.dim, std::move(q), std::move(mats));
}

PureAutomaton flip_flop_automaton(std::size_t m) {
  FlipFlop ff = flip_flop(m);
  return PureAutomaton::make(ff.carrier, 0, std::move(ff.semigroup), std::move(ff.action), {});
}

PureAutomaton regular_pure(const FiniteSemigroup& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> circ(n * n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t x = 0; x < n; ++x) circ[a * n + x] = g.mul(a, x);
  return PureAutomaton::make(n, 0, g, std::move(circ), {});
}

bool is_transitive(const PureAutomaton& a) {
  const std::size_t n = a.gamma.size();
  for (std::uint32_t x = 0; x < a.nA; ++x)
    for (std::uint32_t y = 0; y < a.nA; ++y) {
      if (x == y) continue;
      bool hit = false;
      for (std::uint32_t g = 0; g < n && !hit; ++g) hit = a.circ_at(x, g) == y;
      if (!hit) return false;
    }
  return true;
}

namespace {

std::vector<std::string> word_labels(const std::vector<std::vector<std::uint32_t>>& words,
                                     std::vector<std::string> gen_labels, std::size_t n_gens) {
  if (gen_labels.empty())
    for (std::size_t i = 0; i < n_gens; ++i) gen_labels.push_back("g" + std::to_string(i));
  if (gen_labels.size() != n_gens) throw Error("one label per generator required");
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    std::string s;
    for (std::uint32_t g : w) s += gen_labels[g];
    out.push_back(std::move(s));
  }
  return out;
}

FiniteSemigroup relabel(const FiniteSemigroup& s, std::vector<std::string> labels) {
  return FiniteSemigroup::from_table(s.size(), s.table(), s.zero(), s.identity(),
                                     std::move(labels));
}

}  // namespace

LinearRepresentation representation_from_generators(PrimeField field, std::size_t dim,
                                                    const std::vector<FieldMatrix>& gens,
                                                    const std::vector<std::string>& gen_labels) {
  for (const FieldMatrix& m : gens)
    if (m.rows() != dim || m.cols() != dim || !(m.field() == field))
      throw Error("generator matrix has wrong shape or field");
  ClosureResult<FieldMatrix> cl = closure(gens, mat_mul, caps().closure);
  if (cl.semigroup.size() == 0)
    throw CapError("generated semigroup too large for a multiplication table");
  FiniteSemigroup gamma = relabel(cl.semigroup, word_labels(cl.words, gen_labels, gens.size()));
  return LinearRepresentation::make(field, dim, std::move(gamma), std::move(cl.elements));
}

LinearAutomaton linear_automaton_from_generators(PrimeField field, std::size_t dimA,
                                                 std::size_t dimB,
                                                 const std::vector<FieldMatrix>& gens,
                                                 const std::vector<std::string>& gen_labels) {
  LinearRepresentation r = representation_from_generators(field, dimA + dimB, gens, gen_labels);
  return LinearAutomaton::make(field, dimA, dimB, std::move(r.gamma), std::move(r.mats));
}

PureAutomaton pure_automaton_from_generators(
    std::size_t nA, std::size_t nB, const std::vector<std::vector<std::uint32_t>>& circ_cols,
    const std::vector<std::vector<std::uint32_t>>& star_cols,
    const std::vector<std::string>& gen_labels) {
  if (nA == 0) throw Error("pure automaton needs a nonempty state set");
  if (circ_cols.empty()) throw Error("at least one generator required");
  if (nB > 0 && star_cols.size() != circ_cols.size())
    throw Error("one output column per generator required");
  if (nB == 0 && !star_cols.empty()) throw Error("output column present but output set empty");
  using Col = std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>;
  std::vector<Col> gens;
  for (std::size_t i = 0; i < circ_cols.size(); ++i) {
    if (circ_cols[i].size() != nA) throw Error("transition column has wrong size");
    for (std::uint32_t v : circ_cols[i])
      if (v >= nA) throw Error("transition target out of range");
    std::vector<std::uint32_t> f;
    if (nB > 0) {
      if (star_cols[i].size() != nA) throw Error("output column has wrong size");
      for (std::uint32_t v : star_cols[i])
        if (v >= nB) throw Error("output value out of range");
      f = star_cols[i];
    }
    gens.push_back({circ_cols[i], std::move(f)});
  }
  auto mul = [nA, nB](const Col& x, const Col& y) {
    Col r;
    r.first.resize(nA);
    if (nB > 0) r.second.resize(nA);
    for (std::size_t a = 0; a < nA; ++a) {
      r.first[a] = y.first[x.first[a]];
      if (nB > 0) r.second[a] = y.second[x.first[a]];
    }
    return r;
  };
  ClosureResult<Col> cl = closure(gens, mul, caps().closure);
  if (cl.semigroup.size() == 0)
    throw CapError("generated semigroup too large for a multiplication table");
  FiniteSemigroup gamma = relabel(cl.semigroup, word_labels(cl.words, gen_labels, gens.size()));
  const std::size_t n = gamma.size();
  std::vector<std::uint32_t> circ(nA * n), star;
  if (nB > 0) star.resize(nA * n);
  for (std::uint32_t a = 0; a < nA; ++a)
    for (std::size_t g = 0; g < n; ++g) {
      circ[a * n + g] = cl.elements[g].first[a];
      if (nB > 0) star[a * n + g] = cl.elements[g].second[a];
    }
  return PureAutomaton::make(nA, nB, std::move(gamma), std::move(circ), std::move(star));
}

}  // namespace linat
