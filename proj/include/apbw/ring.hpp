#ifndef APBW_RING_HPP
#define APBW_RING_HPP

#include "apbw/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace apbw {

enum class RingKind { Rational, FiniteDim, Polynomial };

struct ValidationIssue {
  std::string axiom;   // e.g. "associativity", "jacobi"
  std::string witness; // human-readable witness data
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  void add(const std::string& axiom, const std::string& witness) {
    issues.push_back({axiom, witness});
  }
  void merge(const ValidationReport& other, const std::string& prefix);
};

// Exponent vector over the ring's variable list; total-degree-then-lex order.
struct Monomial {
  std::vector<int> exp;
  int degree() const;
  bool operator==(const Monomial&) const = default;
};
// true if a comes strictly later in canonical printing order (deg desc, lex)
bool monomial_less(const Monomial& a, const Monomial& b);

// The commutative ground ring R over the rationals.  The rational field is
// stored as the one-dimensional table algebra so the finite-dimensional code
// path covers it.
class CoefficientRing {
public:
  static CoefficientRing rationals();
  static CoefficientRing finite_dim(std::vector<std::string> basis_labels,
                                    // table[i][j] = coords of b_i * b_j
                                    std::vector<std::vector<std::vector<Rat>>> table);
  static CoefficientRing polynomial(std::vector<std::string> variables);

  RingKind kind() const { return kind_; }
  bool is_polynomial() const { return kind_ == RingKind::Polynomial; }
  // Q-dimension of the coefficient space (finite-dim kinds only).
  int dim() const;
  int num_vars() const { return (int)vars_.size(); }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Rat>& table_entry(int i, int j) const { return table_[i][j]; }

private:
  RingKind kind_ = RingKind::Rational;
  std::vector<std::string> labels_; // finite-dim basis labels, labels_[0] is the unit
  std::vector<std::vector<std::vector<Rat>>> table_;
  std::vector<std::string> vars_;
};

// Element of R in canonical form.  Finite-dim: dense rational coordinates.
// Polynomial: sparse sorted monomial -> coefficient list, no zero entries.
class RingElement {
public:
  RingElement() = default;
  static RingElement zero(const CoefficientRing& R);
  static RingElement one(const CoefficientRing& R);
  static RingElement rational(const CoefficientRing& R, const Rat& q);
  static RingElement basis(const CoefficientRing& R, int i);   // finite-dim b_i
  static RingElement variable(const CoefficientRing& R, int v); // polynomial x_v
  static RingElement monomial(const CoefficientRing& R, Monomial m, Rat c);

  const CoefficientRing* ring() const { return ring_; }
  bool is_zero() const;
  bool operator==(const RingElement& o) const;
  bool operator!=(const RingElement& o) const { return !(*this == o); }
  // total order, used for canonical container keys
  bool operator<(const RingElement& o) const;

  RingElement operator+(const RingElement& o) const;
  RingElement operator-(const RingElement& o) const;
  RingElement operator-() const;
  RingElement operator*(const RingElement& o) const;
  RingElement scaled(const Rat& q) const;

  // exact division by an invertible element; returns false if not invertible
  bool try_divide_unit(const RingElement& unit, RingElement& out) const;

  // finite-dim accessors
  const std::vector<Rat>& coords() const { return coords_; }
  // polynomial accessors (sorted canonical order, leading term first)
  const std::vector<std::pair<Monomial, Rat>>& terms() const { return terms_; }
  int poly_degree() const; // -1 for zero

  // rational content if the element is a rational multiple of 1, else nullptr
  const Rat* as_rational() const;

  std::string to_string() const;

private:
  const CoefficientRing* ring_ = nullptr;
  std::vector<Rat> coords_;
  std::vector<std::pair<Monomial, Rat>> terms_;
  mutable Rat scratch_;
  void normalize();
  friend class CoefficientRing;
};

// A k-linear derivation of R, stored by its images on ring generators:
// finite-dim kinds store the image of every basis element (images[0] = 0),
// the polynomial kind stores the image of every variable.
struct Derivation {
  const CoefficientRing* ring = nullptr;
  std::vector<RingElement> images;

  static Derivation zero(const CoefficientRing& R);
  RingElement apply(const RingElement& r) const;
  bool is_zero() const;
  bool operator==(const Derivation& o) const;
  Derivation operator+(const Derivation& o) const;
  Derivation scaled_left(const RingElement& r) const; // r * delta
};

// --- operations -----------------------------------------------------------

ValidationReport ring_validate(const CoefficientRing& R);
RingElement ring_mul(const RingElement& r, const RingElement& s);
RingElement derivation_apply(const Derivation& d, const RingElement& r);
Derivation derivation_bracket(const Derivation& d1, const Derivation& d2);
// Leibniz rule on all generator pairs; delta(1) = 0.
ValidationReport derivation_validate(const Derivation& d);

// Parses a coefficient expression: rationals, ring basis labels or variables,
// +, -, *, ^, parentheses.  Throws Error(Structural) on bad syntax.
RingElement parse_ring_element(const CoefficientRing& R, const std::string& text);

} // namespace apbw

#endif
