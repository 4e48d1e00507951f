#include "apbw/linalg.hpp"

#include "apbw/error.hpp"

#include <algorithm>

namespace apbw {

QMat QMat::mul(const QMat& o) const {
  if (cols_ != o.rows_) fail_internal("matrix shape mismatch in mul");
  QMat out(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      if (a_[i][k] == 0) continue;
      for (int j = 0; j < o.cols_; ++j)
        if (o.a_[k][j] != 0) out.a_[i][j] += a_[i][k] * o.a_[k][j];
    }
  return out;
}

std::vector<Rat> QMat::apply(const std::vector<Rat>& v) const {
  if ((int)v.size() != cols_) fail_internal("vector length mismatch in apply");
  std::vector<Rat> out(rows_, Rat(0));
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (a_[i][j] != 0 && v[j] != 0) out[i] += a_[i][j] * v[j];
  return out;
}

int QMat::rank() const {
  auto m = a_;
  int rank = 0;
  for (int col = 0; col < cols_ && rank < rows_; ++col) {
    int pr = -1;
    for (int r = rank; r < rows_; ++r)
      if (m[r][col] != 0) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(m[pr], m[rank]);
    Rat inv = Rat(1) / m[rank][col];
    for (int c = col; c < cols_; ++c) m[rank][c] *= inv;
    for (int r = 0; r < rows_; ++r) {
      if (r == rank || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (int c = col; c < cols_; ++c) m[r][c] -= f * m[rank][c];
    }
    ++rank;
  }
  return rank;
}

bool QMat::invertible() const { return rows_ == cols_ && rank() == rows_; }

QMat QMat::inverse() const {
  if (rows_ != cols_) fail_internal("inverse of non-square matrix");
  int n = rows_;
  auto m = a_;
  QMat inv(n, n);
  for (int i = 0; i < n; ++i) inv.a_[i][i] = 1;
  int row = 0;
  for (int col = 0; col < n; ++col) {
    int pr = -1;
    for (int r = row; r < n; ++r)
      if (m[r][col] != 0) { pr = r; break; }
    if (pr < 0) fail_internal("singular matrix in inverse");
    std::swap(m[pr], m[row]);
    std::swap(inv.a_[pr], inv.a_[row]);
    Rat scale = Rat(1) / m[row][col];
    for (int c = 0; c < n; ++c) { m[row][c] *= scale; inv.a_[row][c] *= scale; }
    for (int r = 0; r < n; ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (int c = 0; c < n; ++c) m[r][c] -= f * m[row][c];
      for (int c = 0; c < n; ++c) inv.a_[r][c] -= f * inv.a_[row][c];
    }
    ++row;
  }
  return inv;
}

LinearSolveResult solve_linear(const QMat& A, const std::vector<Rat>& b) {
  int rows = A.rows(), cols = A.cols();
  if ((int)b.size() != rows) fail_internal("rhs length mismatch in solve");
  // augmented elimination with a row-operation tracker T (T*A = echelon)
  std::vector<std::vector<Rat>> m(rows, std::vector<Rat>(cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m[r][c] = A.at(r, c);
  std::vector<Rat> rhs = b;
  std::vector<std::vector<Rat>> T(rows, std::vector<Rat>(rows, Rat(0)));
  for (int r = 0; r < rows; ++r) T[r][r] = 1;

  int rank = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pr = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][col] != 0) { pr = r; break; }
    if (pr < 0) continue;
    std::swap(m[pr], m[rank]);
    std::swap(rhs[pr], rhs[rank]);
    std::swap(T[pr], T[rank]);
    Rat inv = Rat(1) / m[rank][col];
    for (int c = col; c < cols; ++c) m[rank][c] *= inv;
    rhs[rank] *= inv;
    for (auto& t : T[rank]) t *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (int c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
      rhs[r] -= f * rhs[rank];
      for (int c = 0; c < rows; ++c) T[r][c] -= f * T[rank][c];
    }
    pivot_col.push_back(col);
    ++rank;
  }

  LinearSolveResult res;
  for (int r = rank; r < rows; ++r) {
    if (rhs[r] != 0) {
      FarkasCertificate cert;
      Rat inv = Rat(1) / rhs[r];
      cert.y.resize(rows);
      for (int c = 0; c < rows; ++c) cert.y[c] = T[r][c] * inv;
      cert.rank_A = rank;
      cert.rank_augmented = rank + 1;
      res.no_solution = std::move(cert);
      return res;
    }
  }
  std::vector<Rat> x(cols, Rat(0));
  for (int r = 0; r < rank; ++r) x[pivot_col[r]] = rhs[r];
  // columns without pivots stay zero; fix up for non-reduced columns
  // (m is fully reduced above, so plugging in is exact)
  res.solution = std::move(x);
  return res;
}

bool check_farkas(const QMat& A, const std::vector<Rat>& b, const FarkasCertificate& cert) {
  if ((int)cert.y.size() != A.rows()) return false;
  for (int c = 0; c < A.cols(); ++c) {
    Rat acc(0);
    for (int r = 0; r < A.rows(); ++r)
      if (A.at(r, c) != 0 && cert.y[r] != 0) acc += cert.y[r] * A.at(r, c);
    if (acc != 0) return false;
  }
  Rat dot(0);
  for (int r = 0; r < A.rows(); ++r)
    if (b[r] != 0 && cert.y[r] != 0) dot += cert.y[r] * b[r];
  return dot != 0;
}

// --- SparseEliminator --------------------------------------------------------

SparseEliminator::Row SparseEliminator::reduce(Row v) const {
  while (!v.empty()) {
    auto lead = v.begin();
    auto it = pivots_.find(lead->first);
    if (it == pivots_.end()) {
      // reduce later coordinates too, for canonical remainders
      Row rest(std::next(lead), v.end());
      Row rem = rest.empty() ? Row{} : reduce(std::move(rest));
      rem.insert(*lead);
      return rem;
    }
    const Row& piv = rows_[it->second];
    Rat f = lead->second / piv.begin()->second;
    for (const auto& [c, val] : piv) {
      auto jt = v.find(c);
      if (jt == v.end()) {
        v[c] = -f * val;
        if (v[c] == 0) v.erase(c);
      } else {
        jt->second -= f * val;
        if (jt->second == 0) v.erase(jt);
      }
    }
  }
  return v;
}

bool SparseEliminator::add(Row v) {
  v = reduce(std::move(v));
  if (v.empty()) return false;
  pivots_[v.begin()->first] = (int)rows_.size();
  rows_.push_back(std::move(v));
  return true;
}

// --- affine-probe solver -------------------------------------------------------

AnsatzSpace AnsatzSpace::full_ring(const CoefficientRing& R) {
  AnsatzSpace s;
  if (R.is_polynomial()) fail_contract("full-ring ansatz needs a finite-dimensional ring");
  for (int i = 0; i < R.dim(); ++i) s.basis.push_back(RingElement::basis(R, i));
  return s;
}

AnsatzSpace AnsatzSpace::poly_up_to_degree(const CoefficientRing& R, int d) {
  if (!R.is_polynomial()) fail_contract("degree ansatz needs a polynomial ring");
  AnsatzSpace s;
  int nv = R.num_vars();
  std::vector<int> exp(nv, 0);
  // all monomials of total degree <= d, grouped by total degree
  for (int total = 0; total <= d; ++total) {
    std::function<void(int, int)> rec_total = [&](int v, int remaining) {
      if (v == nv - 1) {
        exp[v] = remaining;
        s.basis.push_back(RingElement::monomial(R, Monomial{exp}, Rat(1)));
        exp[v] = 0;
        return;
      }
      for (int e = 0; e <= remaining; ++e) {
        exp[v] = e;
        rec_total(v + 1, remaining - e);
      }
      exp[v] = 0;
    };
    if (nv == 0) {
      if (total == 0) s.basis.push_back(RingElement::one(R));
    } else {
      rec_total(0, total);
    }
  }
  return s;
}

namespace {

// flattens a list of ring elements into Q-coordinates over the monomial /
// basis support discovered across the whole system
struct Flattener {
  const CoefficientRing* ring;
  std::map<Monomial, int> mono_index; // polynomial kinds
  int coords_per_elem = 0;            // finite-dim kinds

  void collect(const RingElement& e) {
    if (ring->is_polynomial()) {
      for (const auto& [m, c] : e.terms())
        if (!mono_index.count(m)) {
          int next = (int)mono_index.size();
          mono_index.emplace(m, next);
        }
    } else {
      coords_per_elem = ring->dim();
    }
  }
  int dims() const {
    return ring->is_polynomial() ? (int)mono_index.size() : coords_per_elem;
  }
  void write(const RingElement& e, std::vector<Rat>& out, int offset) const {
    if (ring->is_polynomial()) {
      for (const auto& [m, c] : e.terms()) out[offset + mono_index.at(m)] = c;
    } else {
      for (int i = 0; i < coords_per_elem; ++i) out[offset + i] = e.coords()[i];
    }
  }
};

} // namespace

static void build_probe_system(const AffineProbeProblem& p, QMat& A, std::vector<Rat>& b,
                               std::vector<std::vector<RingElement>>& probes,
                               std::vector<RingElement>& base) {
  int K = p.num_unknowns;
  int S = (int)p.ansatz.basis.size();
  std::vector<RingElement> zero_input(K, RingElement::zero(*p.ring));
  base = p.equations(zero_input);
  int E = (int)base.size();

  probes.assign(K * S, {});
  Flattener fl{p.ring};
  for (const auto& e : base) fl.collect(e);
  for (int k = 0; k < K; ++k)
    for (int s = 0; s < S; ++s) {
      std::vector<RingElement> input = zero_input;
      input[k] = p.ansatz.basis[s];
      std::vector<RingElement> val = p.equations(input);
      if ((int)val.size() != E) fail_internal("probe equation count changed");
      for (int e = 0; e < E; ++e) {
        val[e] = val[e] - base[e];
        fl.collect(val[e]);
      }
      probes[k * S + s] = std::move(val);
    }

  int per = fl.dims();
  A = QMat(E * per, K * S);
  b.assign(E * per, Rat(0));
  std::vector<Rat> scratch(per, Rat(0));
  for (int e = 0; e < E; ++e) {
    std::fill(scratch.begin(), scratch.end(), Rat(0));
    fl.write(base[e], scratch, 0);
    for (int i = 0; i < per; ++i) b[e * per + i] = -scratch[i];
  }
  for (int col = 0; col < K * S; ++col)
    for (int e = 0; e < E; ++e) {
      std::fill(scratch.begin(), scratch.end(), Rat(0));
      fl.write(probes[col][e], scratch, 0);
      for (int i = 0; i < per; ++i) A.at(e * per + i, col) = scratch[i];
    }
}

AffineProbeResult solve_affine_probe(const AffineProbeProblem& p) {
  AffineProbeResult res;
  QMat A;
  std::vector<Rat> b;
  std::vector<std::vector<RingElement>> probes;
  std::vector<RingElement> base;
  build_probe_system(p, A, b, probes, base);
  res.q_unknowns = A.cols();
  res.q_equations = A.rows();

  LinearSolveResult lin = solve_linear(A, b);
  if (lin.solved()) {
    int S = (int)p.ansatz.basis.size();
    std::vector<RingElement> x(p.num_unknowns, RingElement::zero(*p.ring));
    for (int k = 0; k < p.num_unknowns; ++k)
      for (int s = 0; s < S; ++s) {
        const Rat& q = (*lin.solution)[k * S + s];
        if (q != 0) x[k] = x[k] + p.ansatz.basis[s].scaled(q);
      }
    // soundness: residual must vanish exactly
    for (const auto& r : p.equations(x))
      if (!r.is_zero()) fail_internal("affine probe produced a non-solution");
    res.solution = std::move(x);
    return res;
  }
  res.certificate = lin.no_solution;
  res.exhaustive = !p.ring->is_polynomial();
  return res;
}

bool recheck_affine_certificate(const AffineProbeProblem& p, const FarkasCertificate& cert) {
  QMat A;
  std::vector<Rat> b;
  std::vector<std::vector<RingElement>> probes;
  std::vector<RingElement> base;
  build_probe_system(p, A, b, probes, base);
  return check_farkas(A, b, cert);
}

} // namespace apbw
