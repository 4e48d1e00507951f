#ifndef APBW_ALGEBROID_HPP
#define APBW_ALGEBROID_HPP

#include "apbw/ring.hpp"

#include <memory>
#include <string>
#include <vector>

namespace apbw {

// coordinates of an element of L over its free generator basis
using LElement = std::vector<RingElement>;

// Presentation of a Lie algebroid L over R: a free R-module of finite rank
// with structure functions [l_i,l_j] = sum_k gamma[i][j][k] l_k and one
// derivation of R per generator (the anchor).
class Algebroid {
public:
  Algebroid(const CoefficientRing* ring, int rank,
            std::vector<std::vector<std::vector<RingElement>>> bracket,
            std::vector<Derivation> anchor, std::vector<std::string> labels = {});

  const CoefficientRing& ring() const { return *ring_; }
  int rank() const { return rank_; }
  const std::vector<RingElement>& bracket_gen(int i, int j) const { return bracket_[i][j]; }
  const Derivation& anchor_gen(int i) const { return anchor_[i]; }
  const std::string& label(int i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  LElement zero() const;
  LElement gen(int i) const;
  // anchor of an arbitrary element: rho(sum r_i l_i) = sum r_i rho(l_i)
  Derivation anchor_of(const LElement& u) const;

private:
  const CoefficientRing* ring_;
  int rank_;
  std::vector<std::vector<std::vector<RingElement>>> bracket_;
  std::vector<Derivation> anchor_;
  std::vector<std::string> labels_;
};

// An inclusion A < L given by an adapted basis: the first sub_rank
// generators of L span A, the cosets of the remaining ones form the chosen
// basis of L/A.
struct AdaptedPair {
  const Algebroid* ambient = nullptr;
  int sub_rank = 0;

  int rank() const { return ambient->rank(); }
  int p() const { return sub_rank; }
  int q() const { return ambient->rank() - sub_rank; }
  const CoefficientRing& ring() const { return ambient->ring(); }
  // ambient index of the t-th coset generator
  int coset_gen(int t) const { return sub_rank + t; }
};

// element of L/A in coordinates over the coset basis
using QuotientCoset = std::vector<RingElement>;

LElement l_add(const LElement& u, const LElement& v);
LElement l_scale(const RingElement& r, const LElement& u);
bool l_is_zero(const LElement& u);

// bilinear-plus-Leibniz extension of the structure functions
LElement bracket_eval(const Algebroid& L, const LElement& u, const LElement& v);

ValidationReport algebroid_validate(const Algebroid& L);
ValidationReport pair_validate(const AdaptedPair& pair);

// a . (l + A) := [a, l] + A for a given by coordinates over the A-generators
QuotientCoset quotient_action(const AdaptedPair& pair, const std::vector<RingElement>& a_coords,
                              const QuotientCoset& c);

QuotientCoset project_coset(const AdaptedPair& pair, const LElement& l);
LElement lift_coset(const AdaptedPair& pair, const QuotientCoset& c);

// The same pair presented on the straightening order used by the envelope:
// coset generators first, A-generators last, so normal words with an
// A-generator tail span the left ideal U(L)A.
struct PbwOrderedPair {
  std::shared_ptr<Algebroid> algebroid; // permuted copy of the ambient
  std::vector<int> to_ambient;          // pbw index -> ambient index
  std::vector<int> from_ambient;        // ambient index -> pbw index
  int q = 0;                            // letters < q are coset generators
  int p = 0;                            // letters >= q are A-generators

  bool is_sub_letter(int idx) const { return idx >= q; }
};

PbwOrderedPair pbw_order(const AdaptedPair& pair);

} // namespace apbw

#endif
