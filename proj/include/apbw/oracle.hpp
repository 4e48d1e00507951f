#ifndef APBW_ORACLE_HPP
#define APBW_ORACLE_HPP

#include "apbw/modcat.hpp"
#include "apbw/neighborhood.hpp"

#include <string>
#include <vector>

namespace apbw {

// Brute-force backend: every quotient is computed by dense elimination of the
// relation span inside the free word space, bypassing the straightening and
// rewriting pipelines entirely.  Finite-dimensional coefficient rings only.

// R-ranks of gr^k U(L) for k = 0..N
std::vector<int> oracle_envelope_ranks(const Algebroid& pbw_ordered, int N, int buffer = 2);

// (U(L) (x)_{U(A)} E)^{<=N} by elimination: basis {nondecreasing coset word
// (x) e_s} with the A-generator action matrices
struct OracleInduced {
  std::vector<Word> words;
  int e_rank = 0;
  std::vector<RMat> action; // per A-generator, indexed like induced_module
  std::vector<int> degree_ranks;
  int idx(int w, int s) const { return w * e_rank + s; }
};

OracleInduced oracle_induced_module(const AdaptedPair& pair, const FlatModule& E, int N,
                                    int buffer = 2);

// elimination recomputation of the vanishing verdict for alpha_E
enum class OracleVerdict { Vanishes, NonVanishing };
OracleVerdict oracle_alpha_verdict(const AdaptedPair& pair, const FlatModule& E);

// elimination recomputation of filtered-isomorphism existence at N = 2
OracleVerdict oracle_iso_verdict(const AdaptedPair& pair, const FlatModule& E);

struct OracleDiff {
  std::vector<std::string> entries;
  bool empty() const { return entries.empty(); }
  void add(const std::string& e) { entries.push_back(e); }
};

} // namespace apbw

#endif
