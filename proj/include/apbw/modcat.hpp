#ifndef APBW_MODCAT_HPP
#define APBW_MODCAT_HPP

#include "apbw/algebroid.hpp"
#include "apbw/linalg.hpp"

#include <map>
#include <optional>
#include <vector>

namespace apbw {

using EVec = std::vector<RingElement>;
using RMat = std::vector<std::vector<RingElement>>; // row-major

EVec evec_zero(const CoefficientRing& R, int rank);
EVec evec_add(const EVec& a, const EVec& b);
EVec evec_sub(const EVec& a, const EVec& b);
EVec evec_scale(const RingElement& r, const EVec& a);
bool evec_is_zero(const EVec& a);
RMat rmat_zero(const CoefficientRing& R, int rows, int cols);
RMat rmat_identity(const CoefficientRing& R, int n);
EVec rmat_apply(const RMat& m, const EVec& v);
RMat rmat_mul(const RMat& a, const RMat& b);
RMat rmat_sub(const RMat& a, const RMat& b);
RMat rmat_entrywise_derive(const Derivation& d, const RMat& m);

// An A-module presented as a flat connection on a free R-module: one
// rank x rank matrix per A-generator, acting with the twist
// nabla_a(r e) = a(r) e + r nabla_a(e).
struct FlatModule {
  AdaptedPair pair;
  int rank = 0;
  std::vector<RMat> action; // per A-generator, column-vector convention
  std::vector<std::string> labels;

  const CoefficientRing& ring() const { return pair.ring(); }
  const Derivation& gen_derivation(int s) const { return pair.ambient->anchor_gen(s); }
  // nabla_{a_s}(e), including the derivation twist on the coordinates
  EVec apply_gen(int s, const EVec& e) const;
  // nabla over an arbitrary A-element (R-linear in the algebroid slot)
  EVec apply(const std::vector<RingElement>& a_coords, const EVec& e) const;
  EVec basis_vec(int i) const;
  std::string basis_label(int i) const;
};

FlatModule unit_module(const AdaptedPair& pair);      // 1_A = R with the anchor action
FlatModule quotient_module(const AdaptedPair& pair);  // L/A with a.(l+A) = [a,l]+A
FlatModule tensor_module(const FlatModule& E, const FlatModule& F);
FlatModule hom_module(const FlatModule& E, const FlatModule& F);

// index helpers for tensor_module / hom_module coordinates
int tensor_index(const FlatModule& E, const FlatModule& F, int i, int j); // e_i (x) f_j
int hom_index(const FlatModule& E, const FlatModule& F, int j, int i);   // e_i -> f_j

// a . (e (x) f), a . psi on explicit elements
EVec act_tensor(const FlatModule& E, const FlatModule& F, const std::vector<RingElement>& a,
                const EVec& ef);
RMat act_hom(const FlatModule& E, const FlatModule& F, const std::vector<RingElement>& a,
             const RMat& psi);

ValidationReport module_validate(const FlatModule& E);

// Alternating cochain on A with values in a flat module, stored on strictly
// increasing generator tuples.  Degrees 0..3 are supported; the paper's
// classes live in degree <= 1 and degree 2..3 exist to state cocycle tests.
// The value module is jointly owned so reports can outlive their builders.
struct Cochain {
  std::shared_ptr<const FlatModule> module;
  int degree = 0;
  std::map<std::vector<int>, EVec> vals;

  static Cochain zero(FlatModule E, int degree);
  EVec value(const std::vector<int>& sorted_tuple) const;
  // alternating evaluation on an arbitrary generator tuple
  EVec evaluate(const std::vector<int>& tuple) const;
  bool is_zero() const;
  Cochain operator-(const Cochain& o) const;
  Cochain operator+(const Cochain& o) const;
};

Cochain ce_differential(const Cochain& omega);

struct CoboundaryOutcome {
  enum class Kind { Found, NoSolution, Inconclusive };
  Kind kind = Kind::Inconclusive;
  EVec primitive;            // Found: d(primitive) = cocycle exactly
  FarkasCertificate cert;    // NoSolution
  int bound_used = -1;       // polynomial ansatz degree (-1 on finite-dim)
};

// Solves d(b) = c for a 0-cochain b.  Exact on finite-dimensional rings;
// bounded-degree ansatz (then Inconclusive on failure) on polynomial rings.
CoboundaryOutcome coboundary_solve(const Cochain& c, std::optional<int> degree_bound = {});

// default polynomial ansatz bound: 2 * (max degree in structure data) + 2
int default_degree_bound(const AdaptedPair& pair, const std::vector<const FlatModule*>& modules);

// --- Q-linearization (finite-dimensional rings only) -------------------------

struct QView {
  const CoefficientRing* ring = nullptr;
  int rank = 0;
  int dim() const { return rank * ring->dim(); }
  std::vector<Rat> to_q(const EVec& e) const;
  EVec from_q(const std::vector<Rat>& v) const;
};

QView q_view(const FlatModule& E);
QMat q_action(const FlatModule& E, int s);           // nabla_{a_s} as a Q-matrix
QMat q_of_rmat(const QView& dom, const QView& cod, const RMat& m); // R-linear map
int q_rank_of_rmat(const QView& dom, const QView& cod, const RMat& m);

} // namespace apbw

#endif
