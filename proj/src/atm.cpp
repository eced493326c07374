#include "linat/atm.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "linat/common.hpp"

namespace linat {

namespace {

struct Tok {
  std::string text;
  std::size_t col;  // 1-based
};

struct Line {
  std::size_t no;  // 1-based
  std::vector<Tok> toks;
};

[[noreturn]] void fail(std::size_t line, std::size_t col, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ", column " << col << ": " << msg;
  throw Error(os.str());
}

// Same message shape, but signalling a size-cap hit rather than bad input.
[[noreturn]] void fail_cap(std::size_t line, std::size_t col, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ", column " << col << ": " << msg;
  throw CapError(os.str());
}

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::size_t line_no = 1;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t end = text.find('\n', i);
    if (end == std::string::npos) end = text.size();
    Line line{line_no, {}};
    std::size_t j = i;
    while (j < end && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j < end && text[j] != '#') {
      while (j < end) {
        if (std::isspace(static_cast<unsigned char>(text[j]))) {
          ++j;
          continue;
        }
        std::size_t start = j;
        while (j < end && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        line.toks.push_back({text.substr(start, j - start), start - i + 1});
      }
      if (!line.toks.empty()) out.push_back(std::move(line));
    }
    ++line_no;
    if (end == text.size()) break;
    i = end + 1;
  }
  return out;
}

// Cursor over one line's tokens.
struct LineReader {
  const Line& line;
  std::size_t pos = 0;

  bool done() const { return pos >= line.toks.size(); }
  std::size_t here_col() const {
    if (done())
      return line.toks.empty() ? 1 : line.toks.back().col + line.toks.back().text.size();
    return line.toks[pos].col;
  }
  const Tok& take(const std::string& what) {
    if (done()) fail(line.no, here_col(), "expected " + what);
    return line.toks[pos++];
  }
  void expect(const std::string& word) {
    const Tok& t = take("'" + word + "'");
    if (t.text != word) fail(line.no, t.col, "expected '" + word + "', found '" + t.text + "'");
  }
  std::uint64_t number(const std::string& what, std::uint64_t max) {
    const Tok& t = take(what);
    if (t.text.empty() || t.text.find_first_not_of("0123456789") != std::string::npos)
      fail(line.no, t.col, "expected " + what + ", found '" + t.text + "'");
    if (t.text.size() > 19) fail(line.no, t.col, what + " is out of range");
    std::uint64_t v = std::stoull(t.text);
    if (v > max) fail(line.no, t.col, what + " " + t.text + " is out of range");
    return v;
  }
  void finish() {
    if (!done())
      fail(line.no, line.toks[pos].col, "unexpected trailing token '" + line.toks[pos].text + "'");
  }
};

// `R x C : e ... e ;` with entries below p.
FieldMatrix matrix_literal(LineReader& r, PrimeField f) {
  std::size_t rows = r.number("row count", 4096);
  r.expect("x");
  std::size_t cols = r.number("column count", 4096);
  r.expect(":");
  FieldMatrix m(f, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m.set(i, j, static_cast<std::uint32_t>(r.number("matrix entry", f.p - 1)));
  r.expect(";");
  return m;
}

struct LinearAction {
  FieldMatrix sigma, phi, sigma_prime;
};

LinearAction linear_action(LineReader& r, PrimeField f, std::size_t a, std::size_t b) {
  std::size_t at = r.here_col();
  FieldMatrix sigma = matrix_literal(r, f);
  if (sigma.rows() != a || sigma.cols() != a)
    fail(r.line.no, at, "transition block must be " + std::to_string(a) + " x " + std::to_string(a));
  at = r.here_col();
  FieldMatrix phi = matrix_literal(r, f);
  if (phi.rows() != a || phi.cols() != b)
    fail(r.line.no, at, "output block must be " + std::to_string(a) + " x " + std::to_string(b));
  at = r.here_col();
  FieldMatrix sp = matrix_literal(r, f);
  if (sp.rows() != b || sp.cols() != b)
    fail(r.line.no, at, "output transition block must be " + std::to_string(b) + " x " + std::to_string(b));
  return {std::move(sigma), std::move(phi), std::move(sp)};
}

struct PureAction {
  std::vector<std::uint32_t> circ, star;
};

PureAction pure_action(LineReader& r, std::size_t a, std::size_t b) {
  PureAction act;
  if (a == 0) fail(r.line.no, r.here_col(), "pure automaton needs at least one state");
  for (std::size_t i = 0; i < a; ++i)
    act.circ.push_back(static_cast<std::uint32_t>(r.number("state", a - 1)));
  if (b > 0) {
    r.expect("|");
    for (std::size_t i = 0; i < a; ++i)
      act.star.push_back(static_cast<std::uint32_t>(r.number("output", b - 1)));
  }
  return act;
}

// Closure of linear generators under block-matrix multiplication; elements
// keep first-seen order.
void close_linear(AtmDocument& doc, const std::vector<LinearAction>& gens,
                  PrimeField f, std::size_t line_no) {
  const std::size_t a = doc.dim_a, b = doc.dim_b, d = a + b;
  auto assemble = [&](const LinearAction& act) {
    FieldMatrix m(f, d, d);
    m.paste(0, 0, act.sigma);
    m.paste(0, a, act.phi);
    m.paste(a, a, act.sigma_prime);
    return m;
  };
  std::map<FieldMatrix, std::uint32_t> index;
  std::vector<FieldMatrix> elems;
  for (const LinearAction& g : gens) {
    FieldMatrix m = assemble(g);
    if (index.emplace(m, static_cast<std::uint32_t>(elems.size())).second)
      elems.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j) {
      FieldMatrix p = mat_mul(elems[i], elems[j]);
      if (index.count(p)) continue;
      if (elems.size() >= caps().closure || elems.size() >= caps().table)
        fail_cap(line_no, 1, "generator closure exceeds the size cap");
      index.emplace(p, static_cast<std::uint32_t>(elems.size()));
      elems.push_back(std::move(p));
    }
  doc.n = elems.size();
  doc.table.assign(doc.n * doc.n, 0);
  for (std::size_t i = 0; i < doc.n; ++i)
    for (std::size_t j = 0; j < doc.n; ++j)
      doc.table[i * doc.n + j] = index.at(mat_mul(elems[i], elems[j]));
  for (const FieldMatrix& m : elems) {
    doc.sigmas.push_back(m.block(0, 0, a, a));
    doc.phis.push_back(m.block(0, a, a, b));
    doc.sigma_primes.push_back(m.block(a, a, b, b));
  }
}

void close_pure(AtmDocument& doc, const std::vector<PureAction>& gens,
                std::size_t line_no) {
  auto compose = [&](const PureAction& g, const PureAction& h) {
    // Apply g, then h.
    PureAction out;
    out.circ.resize(doc.dim_a);
    if (!g.star.empty()) out.star.resize(doc.dim_a);
    for (std::size_t x = 0; x < doc.dim_a; ++x) {
      out.circ[x] = h.circ[g.circ[x]];
      if (!out.star.empty()) out.star[x] = h.star[g.circ[x]];
    }
    return out;
  };
  auto key = [](const PureAction& g) { return std::make_pair(g.circ, g.star); };
  std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>, std::uint32_t> index;
  std::vector<PureAction> elems;
  for (const PureAction& g : gens)
    if (index.emplace(key(g), static_cast<std::uint32_t>(elems.size())).second)
      elems.push_back(g);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j) {
      PureAction p = compose(elems[i], elems[j]);
      if (index.count(key(p))) continue;
      if (elems.size() >= caps().closure || elems.size() >= caps().table)
        fail_cap(line_no, 1, "generator closure exceeds the size cap");
      index.emplace(key(p), static_cast<std::uint32_t>(elems.size()));
      elems.push_back(std::move(p));
    }
  doc.n = elems.size();
  doc.table.assign(doc.n * doc.n, 0);
  for (std::size_t i = 0; i < doc.n; ++i)
    for (std::size_t j = 0; j < doc.n; ++j)
      doc.table[i * doc.n + j] = index.at(key(compose(elems[i], elems[j])));
  for (PureAction& e : elems) {
    doc.circ_rows.push_back(std::move(e.circ));
    doc.star_rows.push_back(std::move(e.star));
  }
}

void emit_matrix(std::ostream& os, const FieldMatrix& m) {
  os << m.rows() << " x " << m.cols() << " :";
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) os << " " << m.at(i, j);
  os << " ;";
}

}  // namespace

AtmDocument parse_atm(const std::string& text) {
  std::vector<Line> lines = tokenize(text);
  std::size_t li = 0;
  auto eof_col = [&]() -> std::pair<std::size_t, std::size_t> {
    if (lines.empty()) return {1, 1};
    const Line& last = lines.back();
    return {last.no + 1, 1};
  };
  auto next = [&](const std::string& what) -> LineReader {
    if (li >= lines.size()) {
      auto [l, c] = eof_col();
      fail(l, c, "expected " + what + " before end of file");
    }
    return LineReader{lines[li++]};
  };

  AtmDocument doc;

  {
    LineReader r = next("'format' line");
    r.expect("format");
    std::uint64_t v = r.number("format version", 1000);
    if (v != 1) fail(r.line.no, r.line.toks[1].col, "unsupported format version");
    r.finish();
    doc.format = 1;
  }
  {
    LineReader r = next("'kind' line");
    r.expect("kind");
    const Tok& t = r.take("'pure' or 'linear'");
    if (t.text == "linear")
      doc.linear = true;
    else if (t.text == "pure")
      doc.linear = false;
    else
      fail(r.line.no, t.col, "expected 'pure' or 'linear', found '" + t.text + "'");
    r.finish();
  }
  std::optional<PrimeField> field;
  if (doc.linear) {
    LineReader r = next("'field' line");
    r.expect("field");
    std::size_t at = r.here_col();
    doc.field_p = static_cast<std::uint32_t>(r.number("field characteristic", 65521));
    try {
      field.emplace(doc.field_p);
    } catch (const Error& e) {
      fail(r.line.no, at, e.what());
    }
    r.finish();
  }
  {
    LineReader r = next("'dims' line");
    r.expect("dims");
    doc.dim_a = r.number("state dimension", 4096);
    doc.dim_b = r.number("output dimension", 4096);
    r.finish();
  }

  bool generated = false;
  {
    LineReader r = next("'semigroup' line");
    r.expect("semigroup");
    const Tok& t = r.take("'cayley' or 'generators'");
    if (t.text == "cayley") {
      std::size_t at = r.here_col();
      doc.n = r.number("semigroup order", 0xFFFFFFFFull);
      if (doc.n == 0) fail(r.line.no, at, "semigroup must be nonempty");
      if (doc.n > caps().table)
        fail_cap(r.line.no, at,
                 "semigroup order " + std::to_string(doc.n) + " exceeds the size cap");
      r.expect(":");
      doc.table.reserve(doc.n * doc.n);
      for (std::size_t i = 0; i < doc.n * doc.n; ++i)
        doc.table.push_back(static_cast<std::uint32_t>(r.number("table entry", doc.n - 1)));
      r.finish();
    } else if (t.text == "generators") {
      generated = true;
      r.expect(":");
      std::size_t count = r.number("generator count", 0xFFFFFFFFull);
      if (count == 0) fail(r.line.no, t.col, "at least one generator is required");
      if (count > caps().table)
        fail_cap(r.line.no, t.col,
                 "generator count " + std::to_string(count) + " exceeds the size cap");
      r.finish();
      std::vector<LinearAction> lin_gens;
      std::vector<PureAction> pure_gens;
      for (std::size_t k = 0; k < count; ++k) {
        LineReader g = next("'gen' line");
        g.expect("gen");
        g.expect(":");
        if (doc.linear)
          lin_gens.push_back(linear_action(g, *field, doc.dim_a, doc.dim_b));
        else
          pure_gens.push_back(pure_action(g, doc.dim_a, doc.dim_b));
        g.finish();
      }
      std::size_t at_line = lines[li - 1].no;
      if (doc.linear)
        close_linear(doc, lin_gens, *field, at_line);
      else
        close_pure(doc, pure_gens, at_line);
    } else {
      fail(r.line.no, t.col, "expected 'cayley' or 'generators', found '" + t.text + "'");
    }
  }

  // Optional metadata, in canonical order.
  while (li < lines.size() && lines[li].toks[0].text == "zero") {
    if (doc.zero) fail(lines[li].no, 1, "duplicate zero line");
    LineReader r{lines[li++]};
    r.expect("zero");
    doc.zero = static_cast<std::uint32_t>(r.number("element index", doc.n - 1));
    r.finish();
  }
  while (li < lines.size() && lines[li].toks[0].text == "identity") {
    if (doc.identity) fail(lines[li].no, 1, "duplicate identity line");
    LineReader r{lines[li++]};
    r.expect("identity");
    doc.identity = static_cast<std::uint32_t>(r.number("element index", doc.n - 1));
    r.finish();
  }
  while (li < lines.size() && lines[li].toks[0].text == "label") {
    LineReader r{lines[li++]};
    r.expect("label");
    std::uint32_t idx = static_cast<std::uint32_t>(r.number("element index", doc.n - 1));
    const Tok& name = r.take("label name");
    r.finish();
    for (const auto& [i, _] : doc.labels)
      if (i == idx) fail(r.line.no, r.line.toks[1].col, "duplicate label for element " + std::to_string(idx));
    doc.labels.emplace_back(idx, name.text);
  }
  std::sort(doc.labels.begin(), doc.labels.end());

  // Action table, one line per element, unless the closure already built it.
  if (!generated) {
    std::vector<char> have(doc.n, 0);
    if (doc.linear) {
      doc.sigmas.assign(doc.n, FieldMatrix(*field, doc.dim_a, doc.dim_a));
      doc.phis.assign(doc.n, FieldMatrix(*field, doc.dim_a, doc.dim_b));
      doc.sigma_primes.assign(doc.n, FieldMatrix(*field, doc.dim_b, doc.dim_b));
    } else {
      doc.circ_rows.assign(doc.n, {});
      doc.star_rows.assign(doc.n, {});
    }
    for (std::size_t k = 0; k < doc.n; ++k) {
      LineReader r = next("'act' line");
      r.expect("act");
      std::size_t at = r.here_col();
      std::uint32_t idx = static_cast<std::uint32_t>(r.number("element index", doc.n - 1));
      if (have[idx]) fail(r.line.no, at, "duplicate action for element " + std::to_string(idx));
      have[idx] = 1;
      r.expect(":");
      if (doc.linear) {
        LinearAction act = linear_action(r, *field, doc.dim_a, doc.dim_b);
        doc.sigmas[idx] = std::move(act.sigma);
        doc.phis[idx] = std::move(act.phi);
        doc.sigma_primes[idx] = std::move(act.sigma_prime);
      } else {
        PureAction act = pure_action(r, doc.dim_a, doc.dim_b);
        doc.circ_rows[idx] = std::move(act.circ);
        doc.star_rows[idx] = std::move(act.star);
      }
      r.finish();
    }
  } else if (li < lines.size() && lines[li].toks[0].text == "act") {
    fail(lines[li].no, 1, "act lines are not allowed with a generated semigroup");
  }

  if (li < lines.size())
    fail(lines[li].no, lines[li].toks[0].col,
         "unexpected line '" + lines[li].toks[0].text + "'");

  // Generated semigroups get zero and identity detected so the document
  // matches what emitting the built automaton would produce.
  if (generated && (!doc.zero || !doc.identity)) {
    auto at = [&](std::size_t i, std::size_t j) { return doc.table[i * doc.n + j]; };
    for (std::uint32_t e = 0; e < doc.n && !(doc.zero && doc.identity); ++e) {
      bool is_zero = true, is_id = true;
      for (std::uint32_t x = 0; x < doc.n; ++x) {
        if (at(e, x) != e || at(x, e) != e) is_zero = false;
        if (at(e, x) != x || at(x, e) != x) is_id = false;
      }
      if (is_zero && !doc.zero) doc.zero = e;
      if (is_id && !doc.identity) doc.identity = e;
    }
  }
  return doc;
}

std::string emit_atm(const AtmDocument& doc) {
  std::ostringstream os;
  os << "format 1\n";
  os << "kind " << (doc.linear ? "linear" : "pure") << "\n";
  if (doc.linear) os << "field " << doc.field_p << "\n";
  os << "dims " << doc.dim_a << " " << doc.dim_b << "\n";
  os << "semigroup cayley " << doc.n << " :";
  for (std::uint32_t v : doc.table) os << " " << v;
  os << "\n";
  if (doc.zero) os << "zero " << *doc.zero << "\n";
  if (doc.identity) os << "identity " << *doc.identity << "\n";
  for (const auto& [i, name] : doc.labels) os << "label " << i << " " << name << "\n";
  for (std::size_t g = 0; g < doc.n; ++g) {
    os << "act " << g << " :";
    if (doc.linear) {
      os << " ";
      emit_matrix(os, doc.sigmas[g]);
      os << " ";
      emit_matrix(os, doc.phis[g]);
      os << " ";
      emit_matrix(os, doc.sigma_primes[g]);
    } else {
      for (std::uint32_t v : doc.circ_rows[g]) os << " " << v;
      if (!doc.star_rows[g].empty()) {
        os << " |";
        for (std::uint32_t v : doc.star_rows[g]) os << " " << v;
      }
    }
    os << "\n";
  }
  return os.str();
}

LinearAutomaton linear_from_document(const AtmDocument& doc) {
  if (!doc.linear) throw Error("document describes a pure automaton");
  PrimeField f(doc.field_p);
  std::vector<std::string> labels;
  if (!doc.labels.empty()) {
    labels.assign(doc.n, "");
    for (const auto& [i, name] : doc.labels) labels[i] = name;
  }
  FiniteSemigroup gamma =
      FiniteSemigroup::from_table(doc.n, doc.table, doc.zero, doc.identity, labels);
  return LinearAutomaton::from_blocks(f, doc.dim_a, doc.dim_b, std::move(gamma),
                                      doc.sigmas, doc.phis, doc.sigma_primes);
}

PureAutomaton pure_from_document(const AtmDocument& doc) {
  if (doc.linear) throw Error("document describes a linear automaton");
  std::vector<std::string> labels;
  if (!doc.labels.empty()) {
    labels.assign(doc.n, "");
    for (const auto& [i, name] : doc.labels) labels[i] = name;
  }
  FiniteSemigroup gamma =
      FiniteSemigroup::from_table(doc.n, doc.table, doc.zero, doc.identity, labels);
  std::vector<std::uint32_t> circ(doc.dim_a * doc.n), star;
  if (doc.dim_b > 0) star.resize(doc.dim_a * doc.n);
  for (std::size_t g = 0; g < doc.n; ++g)
    for (std::size_t a = 0; a < doc.dim_a; ++a) {
      circ[a * doc.n + g] = doc.circ_rows[g][a];
      if (doc.dim_b > 0) star[a * doc.n + g] = doc.star_rows[g][a];
    }
  return PureAutomaton::make(doc.dim_a, doc.dim_b, std::move(gamma),
                             std::move(circ), std::move(star));
}

AtmDocument document_from(const LinearAutomaton& l) {
  AtmDocument doc;
  doc.linear = true;
  doc.field_p = l.field.p;
  doc.dim_a = l.dimA;
  doc.dim_b = l.dimB;
  doc.n = l.gamma.size();
  doc.table = l.gamma.table();
  doc.zero = l.gamma.zero();
  doc.identity = l.gamma.identity();
  for (std::size_t i = 0; i < l.gamma.labels().size(); ++i)
    if (!l.gamma.labels()[i].empty())
      doc.labels.emplace_back(static_cast<std::uint32_t>(i), l.gamma.labels()[i]);
  for (std::uint32_t g = 0; g < doc.n; ++g) {
    doc.sigmas.push_back(l.sigma(g));
    doc.phis.push_back(l.phi(g));
    doc.sigma_primes.push_back(l.sigma_prime(g));
  }
  return doc;
}

AtmDocument document_from(const PureAutomaton& a) {
  AtmDocument doc;
  doc.linear = false;
  doc.dim_a = a.nA;
  doc.dim_b = a.nB;
  doc.n = a.gamma.size();
  doc.table = a.gamma.table();
  doc.zero = a.gamma.zero();
  doc.identity = a.gamma.identity();
  for (std::size_t i = 0; i < a.gamma.labels().size(); ++i)
    if (!a.gamma.labels()[i].empty())
      doc.labels.emplace_back(static_cast<std::uint32_t>(i), a.gamma.labels()[i]);
  doc.circ_rows.assign(doc.n, std::vector<std::uint32_t>(a.nA));
  if (a.nB > 0) doc.star_rows.assign(doc.n, std::vector<std::uint32_t>(a.nA));
  else doc.star_rows.assign(doc.n, {});
  for (std::uint32_t g = 0; g < doc.n; ++g)
    for (std::uint32_t x = 0; x < a.nA; ++x) {
      doc.circ_rows[g][x] = a.circ_at(x, g);
      if (a.nB > 0) doc.star_rows[g][x] = a.star_at(x, g);
    }
  return doc;
}

}  // namespace linat
