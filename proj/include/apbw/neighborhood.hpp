#ifndef APBW_NEIGHBORHOOD_HPP
#define APBW_NEIGHBORHOOD_HPP

#include "apbw/envelope.hpp"
#include "apbw/filtered_map.hpp"
#include "apbw/obstruction.hpp"

#include <map>
#include <optional>
#include <vector>

namespace apbw {

// Element of the free Lie algebroid envelope U(FR(L)) at finite truncation:
// left R-coefficients on arbitrary generator words.  Coefficients commute to
// the left by m r = r m + m(r); letters are never reordered.
class FreeElement {
public:
  explicit FreeElement(const Algebroid* alg) : alg_(alg) {}
  static FreeElement unit(const Algebroid& L);

  const Algebroid& algebroid() const { return *alg_; }
  const std::map<Word, RingElement, bool (*)(const Word&, const Word&)>& terms() const {
    return terms_;
  }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  bool operator==(const FreeElement& o) const { return terms_ == o.terms_; }
  FreeElement operator+(const FreeElement& o) const;
  FreeElement operator-(const FreeElement& o) const;
  void add_term(Word w, RingElement c);
  FreeElement scaled_left(const RingElement& r) const;
  FreeElement times_ring(const RingElement& r) const;
  FreeElement times_letter(int i) const; // plain append
  std::string to_string() const;

private:
  const Algebroid* alg_;
  std::map<Word, RingElement, bool (*)(const Word&, const Word&)> terms_{word_less};
};

// normal form with coefficients moved left; words longer than N are an error
FreeElement free_envelope_normalize(const Algebroid& L, const std::vector<WordItem>& expr, int N);

// learned two-sided relation, oriented lhs -> rhs with deg-lex(rhs) < lhs
struct RewriteRule {
  Word lhs;
  FreeElement rhs;
};

enum class ReduceMode {
  ModLeftIdeal, // words ending in an A-letter are zero
  KeepTails     // normal forms keep their A-letter suffix
};

// F^N(U(A^(1)) / U(A^(1)) A) by oriented rewriting with truncated
// critical-pair completion.  Basis words are the irreducible coset words.
struct NeighborhoodQuotient {
  AdaptedPair pair;
  PbwOrderedPair order;
  int truncation = 0;
  std::vector<Word> basis;
  std::map<Word, int> index;
  std::vector<std::vector<std::vector<RingElement>>> action; // per A-generator
  std::vector<RewriteRule> learned;
  int critical_pairs_processed = 0;
  bool completed = false;

  std::vector<int> degree_ranks() const; // rank of F^k/F^{k-1}, k = 0..N
  // xi: class of an arbitrary word of U(FR(L)) in the quotient basis
  FreeElement reduce(const FreeElement& x, ReduceMode mode) const;
  // the quotient as a flat A-module on the basis words
  FlatModule as_module() const;
};

NeighborhoodQuotient a1_quotient(const AdaptedPair& pair, int N, int pair_budget = 10000);

// Independent elimination backend (finite-dimensional rings): the relation
// span is eliminated inside the word space of degree <= N + buffer and the
// quotient basis extracted greedily in deg-lex order.
struct A1Elimination {
  int truncation = 0;
  int buffer = 0;
  bool stable = false; // ranks agreed between buffer-1 and buffer saturations
  std::vector<Word> basis;
  std::vector<std::vector<std::vector<RingElement>>> action;
  std::vector<int> degree_ranks;
};

A1Elimination a1_quotient_elimination(const AdaptedPair& pair, int N, int buffer = 2);

// tensor element of T_R(L/A) truncated at degree N: arbitrary coset words
using TensorElement = std::map<Word, RingElement>;

TensorElement tensor_zero();
void tensor_add(TensorElement& acc, const Word& w, const RingElement& c);
bool tensor_equal(const TensorElement& a, const TensorElement& b);

// action of an ambient L-element through a certified lift on L/A, extended
// to tensor words as a derivation; degree 0 acts through the anchor
TensorElement lift_tensor_action(const AdaptedPair& pair, const ConnectionLift& lift,
                                 const LElement& l, const TensorElement& P);

// l . P + (class of l) (x) P, the first-neighbourhood module structure
TensorElement bullet_action(const AdaptedPair& pair, const ConnectionLift& lift, const LElement& l,
                            const TensorElement& P, int N);

// action of an A-generator on tensor words through the quotient action
TensorElement quotient_tensor_action(const AdaptedPair& pair, int a, const TensorElement& P);

// the comparison map P -> P bullet 1 from the neighbourhood quotient to the
// truncated tensor algebra of L/A, with all four verdicts
FilteredMapReport phi_map(const AdaptedPair& pair, const ConnectionLift& lift,
                          const NeighborhoodQuotient& a1);

// all coset words (arbitrary order) of length <= N, deg-lex sorted
std::vector<Word> tensor_words(int q, int N);

} // namespace apbw

#endif
