#ifndef APBW_LINALG_HPP
#define APBW_LINALG_HPP

#include "apbw/rational.hpp"
#include "apbw/ring.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace apbw {

// Dense matrix over Q.  Sized for desk-scale systems; all pivoting exact.
class QMat {
public:
  QMat() = default;
  QMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows, std::vector<Rat>(cols, Rat(0))) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& at(int r, int c) { return a_[r][c]; }
  const Rat& at(int r, int c) const { return a_[r][c]; }

  QMat mul(const QMat& o) const;
  std::vector<Rat> apply(const std::vector<Rat>& v) const;
  int rank() const;
  bool invertible() const;
  QMat inverse() const; // throws Error(Internal) when singular

private:
  int rows_ = 0, cols_ = 0;
  std::vector<std::vector<Rat>> a_;
};

// Certificate that A x = b has no solution: a row functional y with
// y^T A = 0 and y^T b = 1.  Re-checkable without re-running elimination.
struct FarkasCertificate {
  std::vector<Rat> y;
  int rank_A = 0;
  int rank_augmented = 0;
};

struct LinearSolveResult {
  std::optional<std::vector<Rat>> solution;
  std::optional<FarkasCertificate> no_solution;
  bool solved() const { return solution.has_value(); }
};

// Exact Gauss elimination with row-operation tracking for the witness.
LinearSolveResult solve_linear(const QMat& A, const std::vector<Rat>& b);

bool check_farkas(const QMat& A, const std::vector<Rat>& b, const FarkasCertificate& cert);

// Sparse row-reduction engine for word-space quotients.  Columns are indexed
// by an externally fixed total order; elimination always pivots on the
// smallest column index present, which makes echelon membership tests cheap.
class SparseEliminator {
public:
  using Row = std::map<int, Rat>;

  // Reduces v by the current echelon rows (in place after copy) and returns
  // the remainder.
  Row reduce(Row v) const;
  // Adds a vector to the span; returns true if it increased the rank.
  bool add(Row v);
  int rank() const { return (int)rows_.size(); }
  // column -> echelon row index for pivot columns
  const std::map<int, int>& pivots() const { return pivots_; }
  const std::vector<Row>& rows() const { return rows_; }

private:
  std::vector<Row> rows_;
  std::map<int, int> pivots_;
};

// --- affine-probe solver ------------------------------------------------------
//
// Many searches in this library are of the shape: find ring elements
// x_1..x_K, each constrained to a finite-dimensional Q-ansatz space, such
// that a Q-affine system of ring-element equations vanishes.  The system is
// assembled by probing the equation callback at one-hot inputs, which keeps
// every equation in one exact code path (twists and derivations included).

struct AnsatzSpace {
  std::vector<RingElement> basis; // Q-basis of admissible values for one unknown
  static AnsatzSpace full_ring(const CoefficientRing& R);             // finite-dim kinds
  static AnsatzSpace poly_up_to_degree(const CoefficientRing& R, int d);
};

struct AffineProbeProblem {
  const CoefficientRing* ring = nullptr;
  int num_unknowns = 0;
  AnsatzSpace ansatz; // shared by all unknowns
  // equations(x) returns the residual vector; a solution makes it all zero
  std::function<std::vector<RingElement>(const std::vector<RingElement>&)> equations;
};

struct AffineProbeResult {
  std::optional<std::vector<RingElement>> solution;
  std::optional<FarkasCertificate> certificate; // exact infeasibility (finite-dim ansatz of the full ring)
  bool exhaustive = false; // true when infeasibility rules out all of R, not just the ansatz
  int q_unknowns = 0;
  int q_equations = 0;
};

AffineProbeResult solve_affine_probe(const AffineProbeProblem& p);

// Rebuilds the probe system and checks a stored Farkas certificate against it.
bool recheck_affine_certificate(const AffineProbeProblem& p, const FarkasCertificate& cert);

} // namespace apbw

#endif
