#ifndef APBW_OBSTRUCTION_HPP
#define APBW_OBSTRUCTION_HPP

#include "apbw/envelope.hpp"
#include "apbw/modcat.hpp"

#include <optional>

namespace apbw {

// The A-module (U(L) (x)_{U(A)} E)^{<=1} on the basis {1 (x) e_s} u
// {n_t (x) e_s}, together with the three maps of its defining short exact
// sequence 0 -> E -> middle -> (L/A) (x) E -> 0.
struct ExtensionMiddle {
  FlatModule module;  // rank m + q*m
  FlatModule e_part;  // E
  FlatModule f_part;  // (L/A) (x) E, tensor_module(quotient, E)
  RMat incl;          // E -> middle
  RMat proj;          // middle -> (L/A) (x) E
  RMat sigma;         // R-linear section of proj

  int m = 0, q = 0;
  int e_index(int s) const { return s; }
  int w_index(int t, int s) const { return m + t * m + s; }
};

ExtensionMiddle extension_middle(const AdaptedPair& pair, const FlatModule& E);

// A lift of E's flat A-connection to all of L: one operator per ambient
// generator, restricting to E's action on the A-generators.  Certification
// means the first-neighbourhood relation [nabla_a, nabla_l] = nabla_{[a,l]}
// has been verified exactly.
struct ConnectionLift {
  FlatModule target;
  std::vector<RMat> op; // per ambient generator of L
  bool certified = false;

  EVec apply_gen(int ambient_idx, const EVec& e) const;
  EVec apply(const LElement& l, const EVec& e) const; // R-linear in l
};

// the default lift: E's action on A-generators, zero matrices on the rest
ConnectionLift zero_extension_lift(const AdaptedPair& pair, const FlatModule& E);

// c(a)(l~ (x) e) = nabla_{[a,l]} e - nabla_a nabla_l e + nabla_l nabla_a e,
// a 1-cochain valued in Hom_R((L/A) (x) E, E) representing the obstruction.
Cochain atiyah_cocycle(const AdaptedPair& pair, const FlatModule& E, const ConnectionLift& lift);

// the class cocycles relative to the tautological R-splittings; certificate
// rechecking rebuilds these without running any solver
Cochain alpha_class_cocycle(const AdaptedPair& pair, const FlatModule& E);
Cochain tilde_class_cocycle(const AdaptedPair& pair, const FlatModule& E);

struct ObstructionReport {
  enum class Verdict { Vanishes, NonVanishing, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::string which; // "alpha" or "alpha-tilde"
  Cochain cocycle;
  RMat splitting;          // Vanishes: the verified A-linear splitting matrix
  FarkasCertificate cert;  // NonVanishing
  int bound = -1;          // polynomial ansatz degree, if any
};

// splitting of 0 -> E -> middle -> (L/A)(x)E -> 0 by an A-linear retraction
ObstructionReport alpha_vanishing(const AdaptedPair& pair, const FlatModule& E,
                                  std::optional<int> bound = {});

// The jet-side module J^1_{L/A}(E) in the pair presentation (value at 1,
// values on coset generators), with the residual right-multiplication action.
struct JetOneModule {
  FlatModule module;  // rank m(1+q)
  FlatModule hom_la_e; // Hom_R(L/A, E)
  RMat incl;          // Hom_R(L/A,E) -> J^1
  RMat proj;          // J^1 -> E (evaluation at 1)
  int m = 0, q = 0;
  int e_index(int s) const { return s; }
  int psi_index(int t, int s) const { return m + t * m + s; }

  // raw jet values of an element given in module coordinates
  EVec raw_value_at_one(const EVec& coords) const;
  EVec raw_value_at_coset(int t, const EVec& coords) const;
  EVec coords_from_raw(const EVec& at_one, const std::vector<EVec>& at_cosets) const;
};

JetOneModule jet_one_module(const AdaptedPair& pair, const FlatModule& E);

// splitting of 0 -> Hom(L/A,E) -> J^1 -> E -> 0 by an A-linear section
ObstructionReport tilde_vanishing(const AdaptedPair& pair, const FlatModule& E,
                                  std::optional<int> bound = {});

// Prop.-style promotion: builds the connection lift nabla_{n_t} e := s(n_t (x) e)
// from a verified alpha splitting and certifies the neighbourhood relations.
ConnectionLift promote_to_neighbourhood(const AdaptedPair& pair, const FlatModule& E,
                                        const RMat& alpha_splitting);

struct ComparisonReport {
  RMat ell;            // J^1 -> Hom_R(L/A, middle)
  RMat forward;        // J^1 -> E + Hom(L/A, middle)  (value-at-1, ell)
  RMat backward;       // E + Hom(L/A, middle) -> J^1  (phi_{e,f})
  bool kills_sub_ok = false;      // ell(phi)(a) = 0 for all A-generators
  bool ell_a_linear_ok = false;
  bool lands_in_kernel_ok = false; // difference_map o forward = 0
  bool inverse_ok = false;         // backward o forward = id_J
  bool kernel_identified_ok = false;
  ObstructionReport alpha, tilde;
  bool verdicts_agree = false;
};

ComparisonReport compare_classes(const AdaptedPair& pair, const FlatModule& E,
                                 std::optional<int> bound = {});

} // namespace apbw

#endif
