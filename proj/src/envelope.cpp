#include "apbw/envelope.hpp"

#include "apbw/error.hpp"

#include <algorithm>
#include <sstream>

namespace apbw {

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string word_to_string(const Algebroid& L, const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += ".";
    s += L.label(w[i]);
  }
  return s;
}

EnvelopeElement EnvelopeElement::unit(const Algebroid& L) {
  EnvelopeElement e(&L);
  e.add_term({}, RingElement::one(L.ring()));
  return e;
}

EnvelopeElement EnvelopeElement::generator(const Algebroid& L, int i) {
  EnvelopeElement e(&L);
  e.add_term({i}, RingElement::one(L.ring()));
  return e;
}

int EnvelopeElement::degree() const {
  int d = -1;
  for (const auto& [w, c] : terms_) d = std::max(d, (int)w.size());
  return d;
}

void EnvelopeElement::add_term(Word w, RingElement c) {
  if (c.is_zero()) return;
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    terms_.emplace(std::move(w), std::move(c));
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

EnvelopeElement EnvelopeElement::operator+(const EnvelopeElement& o) const {
  EnvelopeElement e = *this;
  for (const auto& [w, c] : o.terms_) e.add_term(w, c);
  return e;
}

EnvelopeElement EnvelopeElement::operator-(const EnvelopeElement& o) const {
  EnvelopeElement e = *this;
  for (const auto& [w, c] : o.terms_) e.add_term(w, -c);
  return e;
}

EnvelopeElement EnvelopeElement::scaled_left(const RingElement& r) const {
  EnvelopeElement e(alg_);
  for (const auto& [w, c] : terms_) e.add_term(w, r * c);
  return e;
}

namespace {

// w * r = sum over subsets of letters absorbed into derivatives of r;
// computed by the single-step recursion (w' m) r = (w' r') m + w' (m(r)).
EnvelopeElement word_times_ring(const Algebroid& L, const Word& w, const RingElement& r) {
  if (r.is_zero()) return EnvelopeElement(&L);
  if (w.empty()) {
    EnvelopeElement e(&L);
    e.add_term({}, r);
    return e;
  }
  int last = w.back();
  Word head(w.begin(), w.end() - 1);
  EnvelopeElement out(&L);
  // swap part: (head * r) with last re-appended (stays nondecreasing)
  EnvelopeElement swapped = word_times_ring(L, head, r);
  for (const auto& [hw, hc] : swapped.terms()) {
    Word nw = hw;
    nw.push_back(last);
    out.add_term(std::move(nw), hc);
  }
  // derivative part: head * (l_last(r))
  RingElement dr = L.anchor_gen(last).apply(r);
  if (!dr.is_zero()) out = out + word_times_ring(L, head, dr);
  return out;
}

// w * l_i straightened; recursion strictly decreases (length, inversions)
EnvelopeElement word_times_gen(const Algebroid& L, const Word& w, int i) {
  EnvelopeElement out(&L);
  if (w.empty() || w.back() <= i) {
    Word nw = w;
    nw.push_back(i);
    out.add_term(std::move(nw), RingElement::one(L.ring()));
    return out;
  }
  int j = w.back();
  Word head(w.begin(), w.end() - 1);
  // w l_i = (head l_i) l_j + head [l_j, l_i]
  EnvelopeElement swapped = word_times_gen(L, head, i);
  out = swapped.times_generator(j);
  const auto& br = L.bracket_gen(j, i);
  for (int k = 0; k < L.rank(); ++k) {
    if (br[k].is_zero()) continue;
    EnvelopeElement part = word_times_ring(L, head, br[k]);
    out = out + part.times_generator(k);
  }
  return out;
}

} // namespace

EnvelopeElement EnvelopeElement::times_ring(const RingElement& r) const {
  EnvelopeElement out(alg_);
  for (const auto& [w, c] : terms_) {
    EnvelopeElement part = word_times_ring(*alg_, w, r);
    out = out + part.scaled_left(c);
  }
  return out;
}

EnvelopeElement EnvelopeElement::times_generator(int i) const {
  EnvelopeElement out(alg_);
  for (const auto& [w, c] : terms_) {
    EnvelopeElement part = word_times_gen(*alg_, w, i);
    out = out + part.scaled_left(c);
  }
  return out;
}

std::string EnvelopeElement::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")*" << word_to_string(*alg_, w);
  }
  return os.str();
}

EnvelopeElement straighten(const Algebroid& L, const std::vector<WordItem>& expr) {
  EnvelopeElement acc = EnvelopeElement::unit(L);
  for (const auto& item : expr) {
    if (std::holds_alternative<int>(item))
      acc = acc.times_generator(std::get<int>(item));
    else
      acc = acc.times_ring(std::get<RingElement>(item));
  }
  return acc;
}

EnvelopeElement envelope_mul(const EnvelopeElement& u, const EnvelopeElement& v) {
  if (&u.algebroid() != &v.algebroid()) fail_contract("envelope product over different algebroids");
  EnvelopeElement out(&u.algebroid());
  for (const auto& [w, c] : v.terms()) {
    EnvelopeElement part = u.times_ring(c);
    for (int letter : w) part = part.times_generator(letter);
    out = out + part;
  }
  return out;
}

RingElement anchor_apply(const EnvelopeElement& u, const RingElement& r) {
  const Algebroid& L = u.algebroid();
  RingElement out = RingElement::zero(L.ring());
  for (const auto& [w, c] : u.terms()) {
    RingElement v = r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) v = L.anchor_gen(*it).apply(v);
    out = out + c * v;
  }
  return out;
}

RingElement counit(const EnvelopeElement& u) {
  return anchor_apply(u, RingElement::one(u.algebroid().ring()));
}

std::vector<Word> nondecreasing_words(int nletters, int N) {
  std::vector<Word> out{{}};
  std::vector<Word> prev{{}};
  for (int len = 1; len <= N; ++len) {
    std::vector<Word> cur;
    for (const auto& w : prev)
      for (int i = w.empty() ? 0 : w.back(); i < nletters; ++i) {
        Word nw = w;
        nw.push_back(i);
        cur.push_back(std::move(nw));
      }
    out.insert(out.end(), cur.begin(), cur.end());
    prev = std::move(cur);
  }
  std::sort(out.begin(), out.end(), word_less);
  return out;
}

GrRank gr_rank(const Algebroid& L, int k) {
  GrRank g;
  std::vector<Word> all = nondecreasing_words(L.rank(), k);
  for (auto& w : all)
    if ((int)w.size() == k) g.words.push_back(std::move(w));
  g.rank = (int)g.words.size();
  return g;
}

EnvelopeElement drop_sub_tails(const PbwOrderedPair& order, const EnvelopeElement& u) {
  EnvelopeElement out(&*order.algebroid);
  for (const auto& [w, c] : u.terms()) {
    // nondecreasing word contains an A-letter iff its last letter is one
    if (!w.empty() && order.is_sub_letter(w.back())) continue;
    out.add_term(w, c);
  }
  return out;
}

int LeftQuotient::degree_rank(int k) const {
  int r = 0;
  for (const auto& w : basis)
    if ((int)w.size() == k) ++r;
  return r;
}

LeftQuotient left_quotient(const AdaptedPair& pair, int N) {
  LeftQuotient lq;
  lq.order = pbw_order(pair);
  lq.truncation = N;
  const Algebroid& L = *lq.order.algebroid;
  lq.basis = nondecreasing_words(lq.order.q, N);
  for (int i = 0; i < (int)lq.basis.size(); ++i) lq.index[lq.basis[i]] = i;

  int m = (int)lq.basis.size();
  RingElement zero = RingElement::zero(L.ring());
  lq.action.assign(pair.p(), std::vector<std::vector<RingElement>>(
                                 m, std::vector<RingElement>(m, zero)));
  for (int s = 0; s < pair.p(); ++s) {
    int letter = lq.order.q + s; // A-generator a_s in pbw order
    for (int col = 0; col < m; ++col) {
      EnvelopeElement gen = EnvelopeElement::generator(L, letter);
      EnvelopeElement word_elem = EnvelopeElement::unit(L);
      for (int li : lq.basis[col]) word_elem = word_elem.times_generator(li);
      EnvelopeElement reduced = drop_sub_tails(lq.order, envelope_mul(gen, word_elem));
      for (const auto& [w, c] : reduced.terms()) {
        auto it = lq.index.find(w);
        if (it == lq.index.end())
          fail_internal("left quotient action left the truncated basis");
        lq.action[s][it->second][col] = c;
      }
    }
  }
  return lq;
}

} // namespace apbw
