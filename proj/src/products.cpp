#include "linat/products.hpp"

#include <map>
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
  if (r > limit)
    throw CapError(std::string(what) + " exceeds cap of " + std::to_string(limit));
  return r;
}

void require_matching_outputs(const PureAutomaton& a1, const PureAutomaton& a2) {
  if ((a1.nB == 0) != (a2.nB == 0))
    throw Error("output sorts must both be present or both be absent");
}

}  // namespace

std::string TripleViolation::describe() const {
  std::ostringstream os;
  if (kind == 1)
    os << "beta is not multiplicative at (" << g1 << ", " << g2 << ")";
  else
    os << "alpha condition fails at (" << g1 << ", " << g2 << ", point " << point << ")";
  return os.str();
}

std::optional<TripleViolation> check_cascade_triple(const CascadeTriple& t,
                                                    const FiniteSemigroup& gamma1,
                                                    const PureAutomaton& a2) {
  const std::size_t n = t.gamma.size();
  const std::size_t pts = t.points;
  if (pts != a2.nA) throw Error("triple points do not match the pure carrier");
  if (t.beta.size() != n || t.alpha.size() != n * pts) throw Error("triple tables have wrong size");
  for (std::uint32_t v : t.beta)
    if (v >= a2.gamma.size()) throw Error("beta value out of range");
  for (std::uint32_t v : t.alpha)
    if (v >= gamma1.size()) throw Error("alpha value out of range");
  for (std::uint32_t g1 = 0; g1 < n; ++g1)
    for (std::uint32_t g2 = 0; g2 < n; ++g2) {
      const std::uint32_t g12 = t.gamma.mul(g1, g2);
      if (t.beta[g12] != a2.gamma.mul(t.beta[g1], t.beta[g2]))
        return TripleViolation{1, g1, g2, 0};
      for (std::uint32_t a = 0; a < pts; ++a) {
        const std::uint32_t moved = a2.circ_at(a, t.beta[g1]);
        if (t.alpha[g12 * pts + a] !=
            gamma1.mul(t.alpha[g1 * pts + a], t.alpha[g2 * pts + moved]))
          return TripleViolation{2, g1, g2, a};
      }
    }
  return std::nullopt;
}

PureAutomaton cascade_pure(const PureAutomaton& a1, const PureAutomaton& a2,
                           const CascadeTriple& t) {
  require_matching_outputs(a1, a2);
  if (auto v = check_cascade_triple(t, a1.gamma, a2)) throw Error(v->describe());
  const std::size_t n = t.gamma.size();
  const std::size_t nA = a1.nA * a2.nA;
  const std::size_t nB = a1.nB * a2.nB;
  std::vector<std::uint32_t> circ(nA * n), star;
  if (nB > 0) star.resize(nA * n);
  for (std::uint32_t x1 = 0; x1 < a1.nA; ++x1)
    for (std::uint32_t x2 = 0; x2 < a2.nA; ++x2) {
      const std::uint32_t s = x1 * a2.nA + x2;
      for (std::uint32_t g = 0; g < n; ++g) {
        const std::uint32_t left = t.alpha[g * t.points + x2];
        const std::uint32_t right = t.beta[g];
        circ[s * n + g] = a1.circ_at(x1, left) * a2.nA + a2.circ_at(x2, right);
        if (nB > 0)
          star[s * n + g] = a1.star_at(x1, left) * a2.nB + a2.star_at(x2, right);
      }
    }
  return PureAutomaton::make(nA, nB, t.gamma, std::move(circ), std::move(star));
}

PureWreath wreath_pure(const PureAutomaton& a1, const PureAutomaton& a2) {
  require_matching_outputs(a1, a2);
  WreathSemigroup w =
      wreath_semigroup(a1.gamma, a2.nA, a2.circ, a2.gamma, caps().wreath);
  const std::size_t n = w.semigroup.size();
  CascadeTriple t;
  t.gamma = w.semigroup;
  t.points = a2.nA;
  t.alpha.resize(n * a2.nA);
  t.beta.resize(n);
  for (std::uint32_t e = 0; e < n; ++e) {
    t.beta[e] = w.second(e);
    for (std::uint32_t x = 0; x < a2.nA; ++x) t.alpha[e * a2.nA + x] = w.f_at(e, x);
  }
  PureAutomaton prod = cascade_pure(a1, a2, t);
  return {std::move(prod), std::move(t), std::move(w)};
}

EmbeddingReport verify_pure_embedding(const PureAutomaton& src, const PureAutomaton& dst,
                                      const PureEmbedding& e) {
  auto fail = [](std::string s) { return EmbeddingReport{false, std::move(s)}; };
  const std::size_t n = src.gamma.size();
  if (e.elem_map.size() != n) return fail("element map has wrong size");
  if (e.stateA_map.size() != src.nA) return fail("state map has wrong size");
  if (src.nB > 0 && e.stateB_map.size() != src.nB) return fail("output map has wrong size");
  for (std::uint32_t v : e.elem_map)
    if (v >= dst.gamma.size()) return fail("element map out of range");
  for (std::uint32_t v : e.stateA_map)
    if (v >= dst.nA) return fail("state map out of range");
  for (std::uint32_t v : e.stateB_map)
    if (v >= dst.nB) return fail("output map out of range");

  std::vector<bool> seenA(dst.nA, false);
  for (std::uint32_t v : e.stateA_map) {
    if (seenA[v]) return fail("state map not injective");
    seenA[v] = true;
  }
  if (src.nB > 0) {
    std::vector<bool> seenB(dst.nB, false);
    for (std::uint32_t v : e.stateB_map) {
      if (seenB[v]) return fail("output map not injective");
      seenB[v] = true;
    }
  }

  for (std::uint32_t g = 0; g < n; ++g)
    for (std::uint32_t h = 0; h < n; ++h)
      if (dst.gamma.mul(e.elem_map[g], e.elem_map[h]) != e.elem_map[src.gamma.mul(g, h)]) {
        std::ostringstream os;
        os << "element map not a homomorphism at (" << g << ", " << h << ")";
        return fail(os.str());
      }

  for (std::uint32_t a = 0; a < src.nA; ++a)
    for (std::uint32_t g = 0; g < n; ++g) {
      if (dst.circ_at(e.stateA_map[a], e.elem_map[g]) != e.stateA_map[src.circ_at(a, g)]) {
        std::ostringstream os;
        os << "transition does not commute at state " << a << ", element " << g;
        return fail(os.str());
      }
      if (src.nB > 0 &&
          dst.star_at(e.stateA_map[a], e.elem_map[g]) != e.stateB_map[src.star_at(a, g)]) {
        std::ostringstream os;
        os << "output does not commute at state " << a << ", element " << g;
        return fail(os.str());
      }
    }

  // Injectivity is required only modulo the action kernel of the source.
  auto same_action = [&](std::uint32_t g, std::uint32_t h) {
    for (std::uint32_t a = 0; a < src.nA; ++a) {
      if (src.circ_at(a, g) != src.circ_at(a, h)) return false;
      if (src.nB > 0 && src.star_at(a, g) != src.star_at(a, h)) return false;
    }
    return true;
  };
  for (std::uint32_t g = 0; g < n; ++g)
    for (std::uint32_t h = g + 1; h < n; ++h)
      if (e.elem_map[g] == e.elem_map[h] && !same_action(g, h)) {
        std::ostringstream os;
        os << "element map collapses distinct actions " << g << " and " << h;
        return fail(os.str());
      }
  return {};
}

PureEmbedding embed_cascade_in_wreath(const PureAutomaton& c, const CascadeTriple& t,
                                      const PureWreath& w) {
  const std::size_t n = t.gamma.size();
  if (c.gamma.size() != n) throw Error("cascade automaton does not match the triple");
  if (t.points != w.wreath.carrier) throw Error("triple does not match the wreath carrier");
  PureEmbedding e;
  e.elem_map.resize(n);
  std::vector<std::uint32_t> f(t.points);
  for (std::uint32_t g = 0; g < n; ++g) {
    for (std::uint32_t x = 0; x < t.points; ++x) f[x] = t.alpha[g * t.points + x];
    e.elem_map[g] = static_cast<std::uint32_t>(w.wreath.encode(f, t.beta[g]));
  }
  e.stateA_map.resize(c.nA);
  for (std::uint32_t a = 0; a < c.nA; ++a) e.stateA_map[a] = a;
  if (c.nB > 0) {
    e.stateB_map.resize(c.nB);
    for (std::uint32_t b = 0; b < c.nB; ++b) e.stateB_map[b] = b;
  }
  EmbeddingReport rep = verify_pure_embedding(c, w.automaton, e);
  if (!rep.ok)
    throw InternalError("cascade-to-wreath witness failed verification: " + rep.detail);
  return e;
}

std::uint32_t TriRep::encode(std::uint32_t i1, std::size_t phi_idx, std::uint32_t i2) const {
  return static_cast<std::uint32_t>((i1 * hom_count + phi_idx) * n2 + i2);
}

TriRep tri_reps(const LinearRepresentation& r1, const LinearRepresentation& r2) {
  if (!(r1.field == r2.field)) throw Error("triangular product needs a common field");
  const PrimeField field = r1.field;
  LinearRepresentation f1 = faithful_representation(r1);
  LinearRepresentation f2 = faithful_representation(r2);
  const std::size_t d1 = f1.dim, d2 = f2.dim;
  const std::size_t n1 = f1.gamma.size(), n2 = f2.gamma.size();
  const std::uint64_t limit = std::min<std::uint64_t>(caps().wreath, caps().table);
  const std::uint64_t hom = checked_pow(field.p, d1 * d2, limit, "triangular product");
  if (n1 > limit / hom || n1 * hom > limit / n2)
    throw CapError("triangular product exceeds cap of " + std::to_string(limit));
  const std::size_t n = static_cast<std::size_t>(n1 * hom * n2);

  auto phi_matrix = [&](std::size_t idx) {
    FieldMatrix m(field, d1, d2);
    for (std::size_t r = 0; r < d1; ++r)
      for (std::size_t c = 0; c < d2; ++c) {
        m.set(r, c, static_cast<std::uint32_t>(idx % field.p));
        idx /= field.p;
      }
    return m;
  };
  auto phi_index = [&](const FieldMatrix& m) {
    std::uint64_t idx = 0, scale = 1;
    for (std::size_t r = 0; r < d1; ++r)
      for (std::size_t c = 0; c < d2; ++c) {
        idx += scale * m.at(r, c);
        scale *= field.p;
      }
    return static_cast<std::size_t>(idx);
  };

  std::vector<FieldMatrix> mats;
  mats.reserve(n);
  for (std::uint32_t i1 = 0; i1 < n1; ++i1)
    for (std::uint64_t ph = 0; ph < hom; ++ph) {
      FieldMatrix blockA(field, d1 + d2, d1 + d2);
      blockA.paste(0, 0, f1.mats[i1]);
      blockA.paste(0, d1, phi_matrix(ph));
      for (std::uint32_t i2 = 0; i2 < n2; ++i2) {
        FieldMatrix m = blockA;
        m.paste(d1, d1, f2.mats[i2]);
        mats.push_back(std::move(m));
      }
    }

  // (g1, phi, g2)(h1, psi, h2) = (g1 h1, g1 psi + phi h2, g2 h2).
  std::vector<std::uint32_t> table(n * n);
  for (std::uint32_t i1 = 0; i1 < n1; ++i1)
    for (std::uint64_t ph = 0; ph < hom; ++ph) {
      const FieldMatrix phm = phi_matrix(ph);
      for (std::uint32_t i2 = 0; i2 < n2; ++i2) {
        const std::uint32_t a = static_cast<std::uint32_t>((i1 * hom + ph) * n2 + i2);
        for (std::uint32_t j1 = 0; j1 < n1; ++j1)
          for (std::uint64_t qh = 0; qh < hom; ++qh) {
            const FieldMatrix left = mat_mul(f1.mats[i1], phi_matrix(qh));
            for (std::uint32_t j2 = 0; j2 < n2; ++j2) {
              const std::uint32_t b = static_cast<std::uint32_t>((j1 * hom + qh) * n2 + j2);
              const FieldMatrix newphi = mat_add(left, mat_mul(phm, f2.mats[j2]));
              table[a * n + b] = static_cast<std::uint32_t>(
                  (f1.gamma.mul(i1, j1) * hom + phi_index(newphi)) * n2 +
                  f2.gamma.mul(i2, j2));
            }
          }
      }
    }
  FiniteSemigroup gamma = FiniteSemigroup::from_table(n, std::move(table));
  TriRep out;
  out.rep = LinearRepresentation::make(field, d1 + d2, std::move(gamma), std::move(mats));
  out.n1 = n1;
  out.hom_count = static_cast<std::size_t>(hom);
  out.n2 = n2;
  return out;
}

LinearAutomaton tri_automata(const LinearAutomaton& l1, const LinearAutomaton& l2) {
  if (!(l1.field == l2.field)) throw Error("triangular product needs a common field");
  const PrimeField field = l1.field;
  std::vector<FieldMatrix> sA1, sA2, sB1, sB2;
  for (std::uint32_t g = 0; g < l1.gamma.size(); ++g) {
    sA1.push_back(l1.sigma(g));
    sB1.push_back(l1.sigma_prime(g));
  }
  for (std::uint32_t g = 0; g < l2.gamma.size(); ++g) {
    sA2.push_back(l2.sigma(g));
    sB2.push_back(l2.sigma_prime(g));
  }
  LinearRepresentation rA1 = LinearRepresentation::make(field, l1.dimA, l1.gamma, sA1);
  LinearRepresentation rA2 = LinearRepresentation::make(field, l2.dimA, l2.gamma, sA2);
  LinearRepresentation rB1 = LinearRepresentation::make(field, l1.dimB, l1.gamma, sB1);
  LinearRepresentation rB2 = LinearRepresentation::make(field, l2.dimB, l2.gamma, sB2);
  TriRep aSide = tri_reps(rA1, rA2);
  TriRep bSide = tri_reps(rB1, rB2);
  TriRep outer = tri_reps(aSide.rep, bSide.rep);
  return LinearAutomaton::make(field, l1.dimA + l2.dimA, l1.dimB + l2.dimB,
                               std::move(outer.rep.gamma), std::move(outer.rep.mats));
}

LinearWreath wreath_linear_pure(const LinearAutomaton& l, const PureAutomaton& psi) {
  if (psi.nB != 0) throw Error("the pure factor of a wreath product must be a semi-automaton");
  checked_pow(l.field.p, l.dim() * psi.nA, caps().closure, "wreath carrier");
  WreathSemigroup w = wreath_semigroup(l.gamma, psi.nA, psi.circ, psi.gamma, caps().wreath);
  const std::size_t n = w.semigroup.size();
  const std::size_t X = psi.nA;
  const std::size_t dA = l.dimA * X, dB = l.dimB * X;
  std::vector<FieldMatrix> mats;
  mats.reserve(n);
  for (std::uint32_t e = 0; e < n; ++e) {
    const std::uint32_t s = w.second(e);
    FieldMatrix m(l.field, dA + dB, dA + dB);
    for (std::size_t x = 0; x < X; ++x) {
      const std::uint32_t g = w.f_at(e, x);
      const std::size_t xs = psi.circ_at(static_cast<std::uint32_t>(x), s);
      const FieldMatrix& blk = l.rep[g];
      for (std::size_t i = 0; i < l.dimA; ++i)
        for (std::size_t j = 0; j < l.dimA; ++j)
          m.set(i * X + x, j * X + xs, blk.at(i, j));
      for (std::size_t i = 0; i < l.dimA; ++i)
        for (std::size_t j = 0; j < l.dimB; ++j)
          m.set(i * X + x, dA + j * X + xs, blk.at(i, l.dimA + j));
      for (std::size_t i = 0; i < l.dimB; ++i)
        for (std::size_t j = 0; j < l.dimB; ++j)
          m.set(dA + i * X + x, dA + j * X + xs, blk.at(l.dimA + i, l.dimA + j));
    }
    mats.push_back(std::move(m));
  }
  LinearAutomaton a = LinearAutomaton::make(l.field, dA, dB, w.semigroup, std::move(mats));
  return {std::move(a), std::move(w)};
}

LinearAutomaton cascade_linear_pure(const LinearAutomaton& l, const PureAutomaton& psi,
                                    const CascadeTriple& t) {
  if (psi.nB != 0) throw Error("the pure factor of a cascade must be a semi-automaton");
  if (auto v = check_cascade_triple(t, l.gamma, psi)) throw Error(v->describe());
  const std::size_t n = t.gamma.size();
  const std::size_t X = psi.nA;
  const std::size_t dA = l.dimA * X, dB = l.dimB * X;
  std::vector<FieldMatrix> mats;
  mats.reserve(n);
  for (std::uint32_t e = 0; e < n; ++e) {
    FieldMatrix m(l.field, dA + dB, dA + dB);
    for (std::size_t x = 0; x < X; ++x) {
      const std::uint32_t g = t.alpha[e * X + x];
      const std::size_t xb = psi.circ_at(static_cast<std::uint32_t>(x), t.beta[e]);
      const FieldMatrix& blk = l.rep[g];
      for (std::size_t i = 0; i < l.dimA; ++i)
        for (std::size_t j = 0; j < l.dimA; ++j)
          m.set(i * X + x, j * X + xb, blk.at(i, j));
      for (std::size_t i = 0; i < l.dimA; ++i)
        for (std::size_t j = 0; j < l.dimB; ++j)
          m.set(i * X + x, dA + j * X + xb, blk.at(i, l.dimA + j));
      for (std::size_t i = 0; i < l.dimB; ++i)
        for (std::size_t j = 0; j < l.dimB; ++j)
          m.set(dA + i * X + x, dA + j * X + xb, blk.at(l.dimA + i, l.dimA + j));
    }
    mats.push_back(std::move(m));
  }
  return LinearAutomaton::make(l.field, dA, dB, t.gamma, std::move(mats));
}

EmbeddingReport verify_linear_embedding(const LinearAutomaton& src, const LinearAutomaton& dst,
                                        const LinearEmbedding& e) {
  auto fail = [](std::string s) { return EmbeddingReport{false, std::move(s)}; };
  if (!(src.field == dst.field)) return fail("field mismatch");
  const std::size_t n = src.gamma.size();
  if (e.elem_map.size() != n) return fail("element map has wrong size");
  for (std::uint32_t v : e.elem_map)
    if (v >= dst.gamma.size()) return fail("element map out of range");
  if (e.tau_a.rows() != src.dimA || e.tau_a.cols() != dst.dimA)
    return fail("state map has wrong shape");
  if (e.tau_b.rows() != src.dimB || e.tau_b.cols() != dst.dimB)
    return fail("output map has wrong shape");
  if (rank_of(e.tau_a) != src.dimA) return fail("state map not injective");
  if (rank_of(e.tau_b) != src.dimB) return fail("output map not injective");

  for (std::uint32_t g = 0; g < n; ++g)
    for (std::uint32_t h = 0; h < n; ++h)
      if (dst.gamma.mul(e.elem_map[g], e.elem_map[h]) != e.elem_map[src.gamma.mul(g, h)]) {
        std::ostringstream os;
        os << "element map not a homomorphism at (" << g << ", " << h << ")";
        return fail(os.str());
      }

  const FieldMatrix d = direct_sum(e.tau_a, e.tau_b);
  for (std::uint32_t g = 0; g < n; ++g)
    if (!(mat_mul(src.rep[g], d) == mat_mul(d, dst.rep[e.elem_map[g]]))) {
      std::ostringstream os;
      os << "action does not commute at element " << g;
      return fail(os.str());
    }

  for (std::uint32_t g = 0; g < n; ++g)
    for (std::uint32_t h = g + 1; h < n; ++h)
      if (e.elem_map[g] == e.elem_map[h] && !(src.rep[g] == src.rep[h])) {
        std::ostringstream os;
        os << "element map collapses distinct actions " << g << " and " << h;
        return fail(os.str());
      }
  return {};
}

namespace {

void require_semi(const LinearAutomaton& l, const char* law) {
  if (l.dimB != 0) throw Error(std::string(law) + " is stated for semi-automata");
}

MixedLawReport verified_report(const LinearAutomaton& src, const LinearAutomaton& dst,
                               LinearEmbedding e, const std::string& kind) {
  MixedLawReport r;
  r.src_size = src.gamma.size();
  r.dst_size = dst.gamma.size();
  EmbeddingReport v = verify_linear_embedding(src, dst, e);
  if (!v.ok) {
    r.holds = false;
    r.detail = v.detail;
    return r;
  }
  r.holds = true;
  r.detail = kind;
  r.witness = std::move(e);
  return r;
}

}  // namespace

MixedLawReport mixed_law1(const LinearAutomaton& l, const PureAutomaton& psi1,
                          const PureAutomaton& psi2) {
  require_semi(l, "law 1");
  LinearWreath inner = wreath_linear_pure(l, psi1);
  LinearWreath lhs = wreath_linear_pure(inner.automaton, psi2);
  PureWreath pw = wreath_pure(psi1, psi2);
  LinearWreath rhs = wreath_linear_pure(l, pw.automaton);

  const std::size_t X1 = psi1.nA, X2 = psi2.nA;
  const std::size_t n = lhs.automaton.gamma.size();
  LinearEmbedding e;
  e.elem_map.resize(n);
  std::vector<std::uint32_t> h(X1 * X2), sbar(X2);
  for (std::uint32_t el = 0; el < n; ++el) {
    const std::uint32_t s2 = lhs.wreath.second(el);
    for (std::size_t x2 = 0; x2 < X2; ++x2) {
      const std::uint32_t g = lhs.wreath.f_at(el, x2);  // element of Gamma wr^X1 Sigma1
      sbar[x2] = inner.wreath.second(g);
      for (std::size_t x1 = 0; x1 < X1; ++x1)
        h[x1 * X2 + x2] = inner.wreath.f_at(g, x1);
    }
    const std::uint64_t t = pw.wreath.encode(sbar, s2);
    e.elem_map[el] =
        static_cast<std::uint32_t>(rhs.wreath.encode(h, static_cast<std::uint32_t>(t)));
  }
  e.tau_a = FieldMatrix::identity(l.field, lhs.automaton.dimA);
  e.tau_b = FieldMatrix(l.field, 0, 0);

  MixedLawReport r = verified_report(lhs.automaton, rhs.automaton, std::move(e),
                                     "isomorphism via the canonical basis bijection");
  if (r.holds) {
    if (r.src_size != r.dst_size) {
      r.holds = false;
      r.detail = "element map is not onto";
    } else {
      std::vector<bool> seen(r.dst_size, false);
      for (std::uint32_t v : r.witness.elem_map) {
        if (seen[v]) {
          r.holds = false;
          r.detail = "element map is not injective";
          break;
        }
        seen[v] = true;
      }
    }
  }
  return r;
}

MixedLawReport mixed_law2(const LinearAutomaton& l1, const LinearAutomaton& l2,
                          const PureAutomaton& psi) {
  require_semi(l1, "law 2");
  require_semi(l2, "law 2");
  const PrimeField field = l1.field;
  LinearWreath w2 = wreath_linear_pure(l2, psi);

  LinearRepresentation f1 = faithful_representation(automaton_as_representation(l1));
  FaithfulLinear fl2 = faithful(l2);
  LinearRepresentation f2full = automaton_as_representation(fl2.automaton);
  FaithfulLinear w2f = faithful(w2.automaton);

  // Left side: L1 nabla (L2 wr Psi), built as a representation product so
  // element indices decompose as (i1, phi, i2).
  TriRep lhs = tri_reps(f1, automaton_as_representation(w2f.automaton));
  LinearAutomaton lhsAtm = LinearAutomaton::make(field, lhs.rep.dim, 0, lhs.rep.gamma, lhs.rep.mats);

  // Right side: (L1 nabla L2) wr Psi with the inner product in the same
  // representation form.
  TriRep tri12 = tri_reps(f1, f2full);
  LinearAutomaton tri12Atm =
      LinearAutomaton::make(field, tri12.rep.dim, 0, tri12.rep.gamma, tri12.rep.mats);
  LinearWreath rhs = wreath_linear_pure(tri12Atm, psi);

  const std::size_t X = psi.nA;
  const std::size_t d1 = f1.dim, d2 = f2full.dim;
  const std::size_t n = lhs.rep.gamma.size();

  // w2f class representative -> underlying wreath element.
  std::vector<std::uint32_t> rep_of(w2f.automaton.gamma.size());
  {
    std::vector<bool> have(rep_of.size(), false);
    for (std::uint32_t g = 0; g < w2.automaton.gamma.size(); ++g) {
      const std::uint32_t c = w2f.class_of[g];
      if (!have[c]) {
        rep_of[c] = g;
        have[c] = true;
      }
    }
  }

  LinearEmbedding e;
  e.elem_map.resize(n);
  std::vector<std::uint32_t> h(X);
  for (std::uint32_t el = 0; el < n; ++el) {
    const std::uint32_t i2 = el % lhs.n2;
    const std::size_t ph = (el / lhs.n2) % lhs.hom_count;
    const std::uint32_t i1 = static_cast<std::uint32_t>(el / (lhs.n2 * lhs.hom_count));
    const std::uint32_t wElem = rep_of[i2];
    const std::uint32_t s = w2.wreath.second(wElem);
    // phi : A1 -> A2 (x) KX, column blocks j * X + x; slice x of phi feeds the
    // nabla component at the position the pure part moves x to.
    std::size_t idx = ph;
    FieldMatrix phi(field, d1, d2 * X);
    for (std::size_t r = 0; r < d1; ++r)
      for (std::size_t c = 0; c < d2 * X; ++c) {
        phi.set(r, c, static_cast<std::uint32_t>(idx % field.p));
        idx /= field.p;
      }
    for (std::size_t x = 0; x < X; ++x) {
      const std::size_t xs = psi.circ_at(static_cast<std::uint32_t>(x), s);
      FieldMatrix slice(field, d1, d2);
      for (std::size_t r = 0; r < d1; ++r)
        for (std::size_t c = 0; c < d2; ++c) slice.set(r, c, phi.at(r, c * X + xs));
      std::size_t sliceIdx = 0, scale = 1;
      for (std::size_t r = 0; r < d1; ++r)
        for (std::size_t c = 0; c < d2; ++c) {
          sliceIdx += scale * slice.at(r, c);
          scale *= field.p;
        }
      const std::uint32_t g2x = w2.wreath.f_at(wElem, x);
      h[x] = tri12.encode(i1, sliceIdx, fl2.class_of[g2x]);
    }
    e.elem_map[el] = static_cast<std::uint32_t>(rhs.wreath.encode(h, s));
  }

  // tau: A1 embeds diagonally (a1 -> a1 (x) sum of basis points), A2 (x) KX
  // identically.
  FieldMatrix tau(field, d1 + d2 * X, (d1 + d2) * X);
  for (std::size_t i = 0; i < d1; ++i)
    for (std::size_t x = 0; x < X; ++x) tau.set(i, i * X + x, 1);
  for (std::size_t j = 0; j < d2; ++j)
    for (std::size_t x = 0; x < X; ++x) tau.set(d1 + j * X + x, d1 * X + j * X + x, 1);
  e.tau_a = std::move(tau);
  e.tau_b = FieldMatrix(field, 0, 0);

  return verified_report(lhsAtm, rhs.automaton, std::move(e),
                         "embedding with the diagonal first-factor carrier");
}

MixedLawReport mixed_law3(const LinearAutomaton& l1, const LinearAutomaton& l2,
                          const PureAutomaton& psi) {
  require_semi(l1, "law 3");
  require_semi(l2, "law 3");
  const PrimeField field = l1.field;
  LinearAutomaton tri12 = tri_automata(l1, l2);
  LinearWreath lhs = wreath_linear_pure(tri12, psi);
  LinearWreath w1 = wreath_linear_pure(l1, psi);
  LinearWreath w2 = wreath_linear_pure(l2, psi);
  LinearAutomaton rhs = tri_automata(w1.automaton, w2.automaton);

  // In the common basis the left action matrices are literally among the
  // right ones; the element map is matrix lookup.
  std::map<FieldMatrix, std::uint32_t> where;
  for (std::uint32_t g = 0; g < rhs.gamma.size(); ++g) where.emplace(rhs.rep[g], g);
  const std::size_t n = lhs.automaton.gamma.size();
  LinearEmbedding e;
  e.elem_map.resize(n);
  for (std::uint32_t g = 0; g < n; ++g) {
    auto it = where.find(lhs.automaton.rep[g]);
    if (it == where.end()) {
      MixedLawReport r;
      r.holds = false;
      r.src_size = n;
      r.dst_size = rhs.gamma.size();
      r.detail = "left-side action matrix missing on the right at element " + std::to_string(g);
      return r;
    }
    e.elem_map[g] = it->second;
  }
  e.tau_a = FieldMatrix::identity(field, lhs.automaton.dimA);
  e.tau_b = FieldMatrix(field, 0, 0);
  return verified_report(lhs.automaton, rhs, std::move(e), "embedding by matrix coincidence");
}

MixedLaws check_mixed_laws(const LinearAutomaton& l1, const LinearAutomaton& l2,
                           const PureAutomaton& psi1, const PureAutomaton& psi2) {
  MixedLaws out;
  out.law1 = mixed_law1(l1, psi1, psi2);
  out.law2 = mixed_law2(l1, l2, psi1);
  out.law3 = mixed_law3(l1, l2, psi1);
  return out;
}

}  // namespace linat
