#include "apbw/ring.hpp"

#include "apbw/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace apbw {

std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

Rat rat_from_string(const std::string& s) {
  if (s.empty()) fail_structural("empty rational literal");
  size_t slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) fail_structural("zero denominator in '" + s + "'");
    return Rat(num, den);
  } catch (const std::exception&) {
    fail_structural("bad rational literal '" + s + "'");
  }
}

void ValidationReport::merge(const ValidationReport& other, const std::string& prefix) {
  for (const auto& is : other.issues)
    issues.push_back({prefix + is.axiom, is.witness});
}

int Monomial::degree() const {
  int d = 0;
  for (int e : exp) d += e;
  return d;
}

bool monomial_less(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  return a.exp > b.exp; // higher lex first
}

// --- CoefficientRing -------------------------------------------------------

CoefficientRing CoefficientRing::rationals() {
  CoefficientRing R;
  R.kind_ = RingKind::Rational;
  R.labels_ = {"1"};
  R.table_ = {{{Rat(1)}}};
  return R;
}

CoefficientRing CoefficientRing::finite_dim(std::vector<std::string> basis_labels,
                                            std::vector<std::vector<std::vector<Rat>>> table) {
  size_t d = basis_labels.size();
  if (d == 0) fail_structural("finite-dim ring needs at least the unit basis element");
  if (table.size() != d) fail_structural("multiplication table has wrong row count");
  for (const auto& row : table) {
    if (row.size() != d) fail_structural("multiplication table has wrong column count");
    for (const auto& entry : row)
      if (entry.size() != d) fail_structural("multiplication table entry has wrong length");
  }
  CoefficientRing R;
  R.kind_ = RingKind::FiniteDim;
  R.labels_ = std::move(basis_labels);
  R.table_ = std::move(table);
  return R;
}

CoefficientRing CoefficientRing::polynomial(std::vector<std::string> variables) {
  CoefficientRing R;
  R.kind_ = RingKind::Polynomial;
  R.vars_ = std::move(variables);
  return R;
}

int CoefficientRing::dim() const {
  if (kind_ == RingKind::Polynomial)
    fail_contract("polynomial ring has no finite Q-dimension");
  return (int)labels_.size();
}

// --- RingElement -----------------------------------------------------------

RingElement RingElement::zero(const CoefficientRing& R) {
  RingElement e;
  e.ring_ = &R;
  if (!R.is_polynomial()) e.coords_.assign(R.dim(), Rat(0));
  return e;
}

RingElement RingElement::one(const CoefficientRing& R) {
  return rational(R, Rat(1));
}

RingElement RingElement::rational(const CoefficientRing& R, const Rat& q) {
  RingElement e = zero(R);
  if (q == 0) return e;
  if (R.is_polynomial())
    e.terms_.push_back({Monomial{std::vector<int>(R.num_vars(), 0)}, q});
  else
    e.coords_[0] = q;
  return e;
}

RingElement RingElement::basis(const CoefficientRing& R, int i) {
  if (R.is_polynomial() || i < 0 || i >= R.dim())
    fail_contract("basis element index out of range");
  RingElement e = zero(R);
  e.coords_[i] = 1;
  return e;
}

RingElement RingElement::variable(const CoefficientRing& R, int v) {
  if (!R.is_polynomial() || v < 0 || v >= R.num_vars())
    fail_contract("variable index out of range");
  Monomial m{std::vector<int>(R.num_vars(), 0)};
  m.exp[v] = 1;
  return monomial(R, m, Rat(1));
}

RingElement RingElement::monomial(const CoefficientRing& R, Monomial m, Rat c) {
  RingElement e = zero(R);
  if (c != 0) e.terms_.push_back({std::move(m), std::move(c)});
  return e;
}

void RingElement::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const auto& a, const auto& b) { return monomial_less(a.first, b.first); });
  std::vector<std::pair<Monomial, Rat>> out;
  for (auto& t : terms_) {
    if (!out.empty() && out.back().first == t.first)
      out.back().second += t.second;
    else
      out.push_back(std::move(t));
    if (!out.empty() && out.back().second == 0) out.pop_back();
  }
  terms_ = std::move(out);
}

bool RingElement::is_zero() const {
  if (!ring_) return true;
  if (ring_->is_polynomial()) return terms_.empty();
  for (const auto& c : coords_)
    if (c != 0) return false;
  return true;
}

bool RingElement::operator==(const RingElement& o) const {
  if (is_zero() && o.is_zero()) return true;
  return coords_ == o.coords_ && terms_ == o.terms_;
}

bool RingElement::operator<(const RingElement& o) const {
  if (coords_ != o.coords_) return coords_ < o.coords_;
  return std::lexicographical_compare(
      terms_.begin(), terms_.end(), o.terms_.begin(), o.terms_.end(),
      [](const auto& a, const auto& b) {
        if (!(a.first == b.first)) return monomial_less(a.first, b.first);
        return a.second < b.second;
      });
}

static void check_same_ring(const RingElement& a, const RingElement& b) {
  if (a.ring() && b.ring() && a.ring() != b.ring())
    fail_contract("ring mismatch between elements");
}

RingElement RingElement::operator+(const RingElement& o) const {
  check_same_ring(*this, o);
  if (!ring_) return o;
  RingElement e = *this;
  if (ring_->is_polynomial()) {
    e.terms_.insert(e.terms_.end(), o.terms_.begin(), o.terms_.end());
    e.normalize();
  } else {
    for (size_t i = 0; i < e.coords_.size(); ++i) e.coords_[i] += o.coords_[i];
  }
  return e;
}

RingElement RingElement::operator-() const {
  RingElement e = *this;
  for (auto& c : e.coords_) c = -c;
  for (auto& t : e.terms_) t.second = -t.second;
  return e;
}

RingElement RingElement::operator-(const RingElement& o) const { return *this + (-o); }

RingElement RingElement::operator*(const RingElement& o) const {
  check_same_ring(*this, o);
  if (!ring_) return *this;
  RingElement e = zero(*ring_);
  if (ring_->is_polynomial()) {
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) {
        Monomial m = ma;
        for (size_t v = 0; v < m.exp.size(); ++v) m.exp[v] += mb.exp[v];
        e.terms_.push_back({std::move(m), ca * cb});
      }
    e.normalize();
  } else {
    int d = ring_->dim();
    for (int i = 0; i < d; ++i) {
      if (coords_[i] == 0) continue;
      for (int j = 0; j < d; ++j) {
        if (o.coords_[j] == 0) continue;
        Rat c = coords_[i] * o.coords_[j];
        const auto& prod = ring_->table_entry(i, j);
        for (int k = 0; k < d; ++k)
          if (prod[k] != 0) e.coords_[k] += c * prod[k];
      }
    }
  }
  return e;
}

RingElement RingElement::scaled(const Rat& q) const {
  RingElement e = *this;
  if (q == 0) return zero(*ring_);
  for (auto& c : e.coords_) c *= q;
  for (auto& t : e.terms_) t.second *= q;
  return e;
}

bool RingElement::try_divide_unit(const RingElement& unit, RingElement& out) const {
  check_same_ring(*this, unit);
  if (ring_->is_polynomial()) {
    // only rational multiples of 1 are units in a polynomial ring
    const Rat* q = unit.as_rational();
    if (!q || *q == 0) return false;
    out = scaled(Rat(1) / *q);
    return true;
  }
  // solve unit * x = this over Q coordinates
  int d = ring_->dim();
  std::vector<std::vector<Rat>> m(d, std::vector<Rat>(d + 1, Rat(0)));
  for (int j = 0; j < d; ++j) { // column of left-multiplication by unit
    for (int i = 0; i < d; ++i) {
      if (unit.coords()[i] == 0) continue;
      const auto& prod = ring_->table_entry(i, j);
      for (int k = 0; k < d; ++k) m[k][j] += unit.coords()[i] * prod[k];
    }
  }
  for (int k = 0; k < d; ++k) m[k][d] = coords_[k];
  // tiny dense elimination
  int row = 0;
  std::vector<int> pivot_col(d, -1);
  for (int col = 0; col < d && row < d; ++col) {
    int pr = -1;
    for (int r = row; r < d; ++r)
      if (m[r][col] != 0) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(m[pr], m[row]);
    Rat inv = Rat(1) / m[row][col];
    for (int c = col; c <= d; ++c) m[row][c] *= inv;
    for (int r = 0; r < d; ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (int c = col; c <= d; ++c) m[r][c] -= f * m[row][c];
    }
    pivot_col[row] = col;
    ++row;
  }
  RingElement x = zero(*ring_);
  for (int r = 0; r < d; ++r) {
    if (pivot_col[r] >= 0)
      x.coords_[pivot_col[r]] = m[r][d];
    else if (r < (int)m.size() && m[r][d] != 0)
      return false; // inconsistent: not in the image, unit not invertible here
  }
  // confirm exactly (also rejects non-invertible "units" with this in image)
  if (!(unit * x == *this)) return false;
  out = x;
  return true;
}

int RingElement::poly_degree() const {
  if (!ring_ || !ring_->is_polynomial() || terms_.empty()) return -1;
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.degree());
  return d;
}

const Rat* RingElement::as_rational() const {
  if (!ring_) return nullptr;
  if (ring_->is_polynomial()) {
    if (terms_.empty()) { scratch_ = 0; return &scratch_; }
    if (terms_.size() == 1 && terms_[0].first.degree() == 0) return &terms_[0].second;
    return nullptr;
  }
  for (size_t i = 1; i < coords_.size(); ++i)
    if (coords_[i] != 0) return nullptr;
  return &coords_[0];
}

std::string RingElement::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Rat& c, const std::string& sym) {
    Rat a = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (sym.empty())
      os << rat_to_string(a);
    else if (a == 1)
      os << sym;
    else
      os << rat_to_string(a) << "*" << sym;
  };
  if (ring_->is_polynomial()) {
    for (const auto& [m, c] : terms_) {
      std::string sym;
      for (size_t v = 0; v < m.exp.size(); ++v) {
        if (m.exp[v] == 0) continue;
        if (!sym.empty()) sym += "*";
        sym += ring_->variables()[v];
        if (m.exp[v] > 1) sym += "^" + std::to_string(m.exp[v]);
      }
      emit(c, sym);
    }
  } else {
    for (size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == 0) continue;
      emit(coords_[i], i == 0 ? "" : ring_->basis_labels()[i]);
    }
  }
  return os.str();
}

// --- Derivation -------------------------------------------------------------

Derivation Derivation::zero(const CoefficientRing& R) {
  Derivation d;
  d.ring = &R;
  int n = R.is_polynomial() ? R.num_vars() : R.dim();
  d.images.assign(n, RingElement::zero(R));
  return d;
}

bool Derivation::is_zero() const {
  for (const auto& im : images)
    if (!im.is_zero()) return false;
  return true;
}

bool Derivation::operator==(const Derivation& o) const { return images == o.images; }

Derivation Derivation::operator+(const Derivation& o) const {
  Derivation d = *this;
  for (size_t i = 0; i < images.size(); ++i) d.images[i] = d.images[i] + o.images[i];
  return d;
}

Derivation Derivation::scaled_left(const RingElement& r) const {
  Derivation d = *this;
  for (auto& im : d.images) im = r * im;
  return d;
}

RingElement Derivation::apply(const RingElement& r) const {
  RingElement out = RingElement::zero(*ring);
  if (ring->is_polynomial()) {
    // Leibniz over each monomial: d(x^a y^b ...) = sum_v a_v x^(a - e_v) d(x_v)
    for (const auto& [m, c] : r.terms()) {
      for (size_t v = 0; v < m.exp.size(); ++v) {
        if (m.exp[v] == 0 || images[v].is_zero()) continue;
        Monomial lowered = m;
        lowered.exp[v] -= 1;
        RingElement partial = RingElement::monomial(*ring, lowered, c * m.exp[v]);
        out = out + partial * images[v];
      }
    }
  } else {
    for (size_t i = 0; i < r.coords().size(); ++i)
      if (r.coords()[i] != 0) out = out + images[i].scaled(r.coords()[i]);
  }
  return out;
}

RingElement derivation_apply(const Derivation& d, const RingElement& r) { return d.apply(r); }

Derivation derivation_bracket(const Derivation& d1, const Derivation& d2) {
  if (d1.ring != d2.ring) fail_contract("derivation bracket over different rings");
  Derivation out = Derivation::zero(*d1.ring);
  const CoefficientRing& R = *d1.ring;
  int n = R.is_polynomial() ? R.num_vars() : R.dim();
  for (int i = 0; i < n; ++i) {
    RingElement gen = R.is_polynomial() ? RingElement::variable(R, i) : RingElement::basis(R, i);
    out.images[i] = d1.apply(d2.apply(gen)) - d2.apply(d1.apply(gen));
  }
  return out;
}

ValidationReport derivation_validate(const Derivation& d) {
  ValidationReport rep;
  const CoefficientRing& R = *d.ring;
  if (R.is_polynomial()) return rep; // Leibniz extension holds by construction
  int n = R.dim();
  if ((int)d.images.size() != n) {
    rep.add("shape", "derivation image count != ring dimension");
    return rep;
  }
  if (!d.images[0].is_zero()) rep.add("unit", "delta(1) != 0");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      RingElement bi = RingElement::basis(R, i), bj = RingElement::basis(R, j);
      RingElement lhs = d.apply(bi * bj);
      RingElement rhs = d.apply(bi) * bj + bi * d.apply(bj);
      if (!(lhs == rhs))
        rep.add("leibniz", "basis pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  return rep;
}

// --- validation --------------------------------------------------------------

ValidationReport ring_validate(const CoefficientRing& R) {
  ValidationReport rep;
  if (R.is_polynomial()) {
    std::vector<std::string> seen;
    for (const auto& v : R.variables()) {
      if (std::find(seen.begin(), seen.end(), v) != seen.end())
        rep.add("variables", "duplicate variable '" + v + "'");
      seen.push_back(v);
    }
    return rep;
  }
  int d = R.dim();
  auto b = [&](int i) { return RingElement::basis(R, i); };
  for (int i = 0; i < d; ++i) {
    if (!(b(0) * b(i) == b(i))) rep.add("unit", "1*b" + std::to_string(i));
    if (!(b(i) * b(0) == b(i))) rep.add("unit", "b" + std::to_string(i) + "*1");
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!(b(i) * b(j) == b(j) * b(i)))
        rep.add("commutativity", "(" + std::to_string(i) + "," + std::to_string(j) + ")");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (!((b(i) * b(j)) * b(k) == b(i) * (b(j) * b(k))))
          rep.add("associativity", "(" + std::to_string(i) + "," + std::to_string(j) + "," +
                                       std::to_string(k) + ")");
  return rep;
}

RingElement ring_mul(const RingElement& r, const RingElement& s) { return r * s; }

// --- coefficient expression parser -------------------------------------------

namespace {

struct Parser {
  const CoefficientRing& R;
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  RingElement parse_expr() {
    RingElement acc = parse_term();
    while (true) {
      char c = peek();
      if (c == '+') { ++pos; acc = acc + parse_term(); }
      else if (c == '-') { ++pos; acc = acc - parse_term(); }
      else break;
    }
    return acc;
  }

  RingElement parse_term() {
    RingElement acc = parse_factor();
    while (peek() == '*') { ++pos; acc = acc * parse_factor(); }
    return acc;
  }

  RingElement parse_factor() {
    RingElement base = parse_atom();
    if (peek() == '^') {
      ++pos;
      skip_ws();
      size_t start = pos;
      while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
      if (start == pos) fail_structural("exponent expected in '" + s + "'");
      int e = std::stoi(s.substr(start, pos - start));
      RingElement acc = RingElement::one(R);
      for (int i = 0; i < e; ++i) acc = acc * base;
      return acc;
    }
    return base;
  }

  RingElement parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail_structural("unexpected end of expression '" + s + "'");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      RingElement e = parse_expr();
      if (!eat(')')) fail_structural("missing ')' in '" + s + "'");
      return e;
    }
    if (c == '-') { ++pos; return -parse_atom(); }
    if (std::isdigit((unsigned char)c)) {
      size_t start = pos;
      while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
      Int num(s.substr(start, pos - start));
      if (pos < s.size() && s[pos] == '/') {
        ++pos;
        size_t dstart = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (dstart == pos) fail_structural("denominator expected in '" + s + "'");
        Int den(s.substr(dstart, pos - dstart));
        if (den == 0) fail_structural("zero denominator in '" + s + "'");
        return RingElement::rational(R, Rat(num, den));
      }
      return RingElement::rational(R, Rat(num));
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t start = pos;
      while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_')) ++pos;
      std::string name = s.substr(start, pos - start);
      if (R.is_polynomial()) {
        for (int v = 0; v < R.num_vars(); ++v)
          if (R.variables()[v] == name) return RingElement::variable(R, v);
      } else {
        for (int i = 0; i < R.dim(); ++i)
          if (R.basis_labels()[i] == name) return RingElement::basis(R, i);
      }
      fail_structural("unknown symbol '" + name + "' in '" + s + "'");
    }
    fail_structural(std::string("unexpected character '") + c + "' in '" + s + "'");
  }
};

} // namespace

RingElement parse_ring_element(const CoefficientRing& R, const std::string& text) {
  Parser p{R, text};
  RingElement e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    fail_structural("trailing characters in coefficient '" + text + "'");
  return e;
}

} // namespace apbw
