#ifndef APBW_PBWISO_HPP
#define APBW_PBWISO_HPP

#include "apbw/filtered_map.hpp"
#include "apbw/neighborhood.hpp"

#include <optional>

namespace apbw {

// average of all letter permutations; a section of T_R(L/A) ->> S_R(L/A)
TensorElement symmetrize(const CoefficientRing& R, const Word& sorted_word);

// (U(L) (x)_{U(A)} E)^{<=N} on the basis {nondecreasing coset word (x) e_s},
// with the left-multiplication A-action computed by straightening.
struct InducedModule {
  AdaptedPair pair;
  PbwOrderedPair order;
  int truncation = 0;
  int e_rank = 0;
  std::vector<Word> words;
  std::map<Word, int> word_index;
  FlatModule module;
  int idx(int w, int s) const { return w * e_rank + s; }
  int degree_of(int index) const { return (int)words[index / e_rank].size(); }
};

InducedModule induced_module(const AdaptedPair& pair, const FlatModule& E, int N);

// S_R(L/A) (x) E truncated, as a flat module on {sorted word (x) e_s}
InducedModule symmetric_module(const AdaptedPair& pair, const FlatModule& E, int N);

// j*j_!(E) on the basis {a1 word (x) e_s}
struct NeighborhoodInduced {
  const NeighborhoodQuotient* a1 = nullptr;
  int e_rank = 0;
  FlatModule module;
  int idx(int w, int s) const { return w * e_rank + s; }
};

NeighborhoodInduced neighborhood_induced(const NeighborhoodQuotient& a1, const FlatModule& E);

// eta: j*j_!(E) -> j*j_!(1_A) (x) E, P (x) e -> P . (1 (x) e)
FilteredMapReport eta_map(const AdaptedPair& pair, const FlatModule& E, const ConnectionLift& liftE,
                          const NeighborhoodQuotient& a1);

// the explicit composite S(L/A) (x) E -> T(L/A) (x) E -> j*j_!(E) -> i*i_!(E)
FilteredMapReport pbw_composite(const AdaptedPair& pair, const FlatModule& E,
                                const ConnectionLift& lift_quotient, const ConnectionLift& lift_e,
                                const NeighborhoodQuotient& a1);

struct SplitOutcome {
  bool splits = false;
  bool exhaustive = false; // infeasibility certified over all of R
  RMat section;
  FarkasCertificate cert;
  int bound = -1;
};

// A-linear section of (M^{<=hi} / M^{<=mid}) into (M^{<=hi} / M^{<=lo}),
// for a flat module with degree-labelled basis; lo may be -1.
SplitOutcome filtration_step_splitting(const FlatModule& M, const std::vector<int>& degrees,
                                       int lo, int mid, int hi, std::optional<int> bound = {});

struct IsoSearchOutcome {
  enum class Kind { Exists, NotExists, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::optional<FilteredMapReport> report;
  FarkasCertificate cert;
  std::string cert_stage; // which filtration step failed to split
  int bound = -1;
};

// direct exact search for a filtered A-linear isomorphism
// S(L/A) (x) E -> i*i_!(E) inducing the canonical graded identification
IsoSearchOutcome filtered_iso_search(const AdaptedPair& pair, const FlatModule& E, int N,
                                     std::optional<int> bound = {});

// verdicts of a stored map, recomputed from scratch (used by --recheck)
void verify_filtered_map(const FlatModule& dom, const std::vector<int>& dom_degrees,
                         const FlatModule& cod, const std::vector<int>& cod_degrees,
                         FilteredMapReport& rep, const std::vector<int>& canonical_rows);

} // namespace apbw

#endif
