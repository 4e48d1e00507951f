#ifndef APBW_ENVELOPE_HPP
#define APBW_ENVELOPE_HPP

#include "apbw/algebroid.hpp"

#include <map>
#include <variant>
#include <vector>

namespace apbw {

// generator word; the envelope keeps only nondecreasing ones (normal form)
using Word = std::vector<int>;

// deg-lex: shorter words first, then lexicographic
bool word_less(const Word& a, const Word& b);
std::string word_to_string(const Algebroid& L, const Word& w);

// Element of U(L) in PBW normal form: left R-coefficients on nondecreasing
// generator words.  No zero coefficients are stored.
class EnvelopeElement {
public:
  explicit EnvelopeElement(const Algebroid* alg) : alg_(alg) {}
  static EnvelopeElement unit(const Algebroid& L);
  static EnvelopeElement generator(const Algebroid& L, int i);

  const Algebroid& algebroid() const { return *alg_; }
  const std::map<Word, RingElement, bool (*)(const Word&, const Word&)>& terms() const {
    return terms_;
  }
  bool is_zero() const { return terms_.empty(); }
  int degree() const; // filtration degree = max word length, -1 for zero
  bool operator==(const EnvelopeElement& o) const { return terms_ == o.terms_; }

  EnvelopeElement operator+(const EnvelopeElement& o) const;
  EnvelopeElement operator-(const EnvelopeElement& o) const;
  void add_term(Word w, RingElement c);
  EnvelopeElement scaled_left(const RingElement& r) const; // r * u

  // right multiplications; both re-straighten as needed
  EnvelopeElement times_ring(const RingElement& r) const;       // u * r
  EnvelopeElement times_generator(int i) const;                 // u * l_i

  std::string to_string() const;

private:
  const Algebroid* alg_;
  std::map<Word, RingElement, bool (*)(const Word&, const Word&)> terms_{word_less};
};

// one item of a word expression: a coefficient or a generator index
using WordItem = std::variant<RingElement, int>;

// --- operations -----------------------------------------------------------

// normal form of an arbitrary product expression
EnvelopeElement straighten(const Algebroid& L, const std::vector<WordItem>& expr);
EnvelopeElement envelope_mul(const EnvelopeElement& u, const EnvelopeElement& v);
// extended anchor U(L) -> End(R)
RingElement anchor_apply(const EnvelopeElement& u, const RingElement& r);
RingElement counit(const EnvelopeElement& u);

struct GrRank {
  int rank;
  std::vector<Word> words; // the normal-form word basis of gr^k
};
GrRank gr_rank(const Algebroid& L, int k);

// all nondecreasing words over letters [0, nletters) with length in [0, N]
std::vector<Word> nondecreasing_words(int nletters, int N);

// Presentation of (U(L)/U(L)A)^{<=N}: word basis in coset letters together
// with one action matrix per A-generator.  The action is a flat connection:
// on r * w it is a(r) w + r * (matrix action on w).
struct LeftQuotient {
  PbwOrderedPair order;
  int truncation = 0;
  std::vector<Word> basis;               // nondecreasing coset words, length <= N
  std::map<Word, int> index;             // word -> basis position
  std::vector<std::vector<std::vector<RingElement>>> action; // [a][row][col]

  int degree_rank(int k) const;          // rank of G^k / G^{k-1}
};

LeftQuotient left_quotient(const AdaptedPair& pair, int N);

// reduces an envelope element over the PBW-ordered algebroid modulo the left
// ideal U(L)A: drops every normal word containing an A-letter
EnvelopeElement drop_sub_tails(const PbwOrderedPair& order, const EnvelopeElement& u);

} // namespace apbw

#endif
