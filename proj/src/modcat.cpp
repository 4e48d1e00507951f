#include "apbw/modcat.hpp"

#include "apbw/error.hpp"

#include <algorithm>
#include <functional>
#include <memory>

namespace apbw {

EVec evec_zero(const CoefficientRing& R, int rank) {
  return EVec(rank, RingElement::zero(R));
}

EVec evec_add(const EVec& a, const EVec& b) {
  EVec o = a;
  for (size_t i = 0; i < o.size(); ++i) o[i] = o[i] + b[i];
  return o;
}

EVec evec_sub(const EVec& a, const EVec& b) {
  EVec o = a;
  for (size_t i = 0; i < o.size(); ++i) o[i] = o[i] - b[i];
  return o;
}

EVec evec_scale(const RingElement& r, const EVec& a) {
  EVec o = a;
  for (auto& c : o) c = r * c;
  return o;
}

bool evec_is_zero(const EVec& a) {
  for (const auto& c : a)
    if (!c.is_zero()) return false;
  return true;
}

RMat rmat_zero(const CoefficientRing& R, int rows, int cols) {
  return RMat(rows, std::vector<RingElement>(cols, RingElement::zero(R)));
}

RMat rmat_identity(const CoefficientRing& R, int n) {
  RMat m = rmat_zero(R, n, n);
  for (int i = 0; i < n; ++i) m[i][i] = RingElement::one(R);
  return m;
}

EVec rmat_apply(const RMat& m, const EVec& v) {
  if (m.empty()) return {};
  EVec out(m.size(), RingElement::zero(v.empty() ? *m[0][0].ring() : *v[0].ring()));
  for (size_t r = 0; r < m.size(); ++r) {
    RingElement acc = RingElement::zero(*m[r][0].ring());
    for (size_t c = 0; c < m[r].size(); ++c)
      if (!m[r][c].is_zero() && !v[c].is_zero()) acc = acc + m[r][c] * v[c];
    out[r] = acc;
  }
  return out;
}

RMat rmat_mul(const RMat& a, const RMat& b) {
  RMat out = rmat_zero(*a[0][0].ring(), (int)a.size(), (int)b[0].size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k) {
      if (a[i][k].is_zero()) continue;
      for (size_t j = 0; j < b[k].size(); ++j)
        if (!b[k][j].is_zero()) out[i][j] = out[i][j] + a[i][k] * b[k][j];
    }
  return out;
}

RMat rmat_sub(const RMat& a, const RMat& b) {
  RMat out = a;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) out[i][j] = out[i][j] - b[i][j];
  return out;
}

RMat rmat_entrywise_derive(const Derivation& d, const RMat& m) {
  RMat out = m;
  for (auto& row : out)
    for (auto& e : row) e = d.apply(e);
  return out;
}

// --- FlatModule ---------------------------------------------------------------

EVec FlatModule::apply_gen(int s, const EVec& e) const {
  const Derivation& d = gen_derivation(s);
  EVec out = rmat_apply(action[s], e);
  for (int i = 0; i < rank; ++i) out[i] = out[i] + d.apply(e[i]);
  return out;
}

EVec FlatModule::apply(const std::vector<RingElement>& a_coords, const EVec& e) const {
  EVec out = evec_zero(ring(), rank);
  for (int s = 0; s < pair.p(); ++s)
    if (!a_coords[s].is_zero()) out = evec_add(out, evec_scale(a_coords[s], apply_gen(s, e)));
  return out;
}

EVec FlatModule::basis_vec(int i) const {
  EVec e = evec_zero(ring(), rank);
  e[i] = RingElement::one(ring());
  return e;
}

std::string FlatModule::basis_label(int i) const {
  if (i < (int)labels.size()) return labels[i];
  return "e" + std::to_string(i);
}

FlatModule unit_module(const AdaptedPair& pair) {
  FlatModule E;
  E.pair = pair;
  E.rank = 1;
  E.action.assign(pair.p(), rmat_zero(pair.ring(), 1, 1));
  E.labels = {"1"};
  return E;
}

FlatModule quotient_module(const AdaptedPair& pair) {
  FlatModule E;
  E.pair = pair;
  E.rank = pair.q();
  E.action.assign(pair.p(), rmat_zero(pair.ring(), pair.q(), pair.q()));
  for (int s = 0; s < pair.p(); ++s)
    for (int t = 0; t < pair.q(); ++t) {
      LElement br = bracket_eval(*pair.ambient, pair.ambient->gen(s),
                                 pair.ambient->gen(pair.coset_gen(t)));
      for (int t2 = 0; t2 < pair.q(); ++t2) E.action[s][t2][t] = br[pair.coset_gen(t2)];
    }
  for (int t = 0; t < pair.q(); ++t)
    E.labels.push_back(pair.ambient->label(pair.coset_gen(t)) + "~");
  return E;
}

int tensor_index(const FlatModule& E, const FlatModule& F, int i, int j) {
  (void)E;
  return i * F.rank + j;
}

int hom_index(const FlatModule& E, const FlatModule& F, int j, int i) {
  (void)F;
  return j * E.rank + i;
}

FlatModule tensor_module(const FlatModule& E, const FlatModule& F) {
  FlatModule T;
  T.pair = E.pair;
  T.rank = E.rank * F.rank;
  const CoefficientRing& R = E.ring();
  T.action.assign(T.pair.p(), rmat_zero(R, T.rank, T.rank));
  for (int s = 0; s < T.pair.p(); ++s)
    for (int i = 0; i < E.rank; ++i)
      for (int j = 0; j < F.rank; ++j) {
        int col = tensor_index(E, F, i, j);
        for (int i2 = 0; i2 < E.rank; ++i2)
          if (!E.action[s][i2][i].is_zero())
            T.action[s][tensor_index(E, F, i2, j)][col] =
                T.action[s][tensor_index(E, F, i2, j)][col] + E.action[s][i2][i];
        for (int j2 = 0; j2 < F.rank; ++j2)
          if (!F.action[s][j2][j].is_zero())
            T.action[s][tensor_index(E, F, i, j2)][col] =
                T.action[s][tensor_index(E, F, i, j2)][col] + F.action[s][j2][j];
      }
  for (int i = 0; i < E.rank; ++i)
    for (int j = 0; j < F.rank; ++j)
      T.labels.push_back(E.basis_label(i) + "(x)" + F.basis_label(j));
  return T;
}

FlatModule hom_module(const FlatModule& E, const FlatModule& F) {
  // basis E_{ji}: e_i -> f_j; a . E_{ji} = M_F E_{ji} - E_{ji} M_E
  FlatModule H;
  H.pair = E.pair;
  H.rank = E.rank * F.rank;
  const CoefficientRing& R = E.ring();
  H.action.assign(H.pair.p(), rmat_zero(R, H.rank, H.rank));
  for (int s = 0; s < H.pair.p(); ++s)
    for (int j = 0; j < F.rank; ++j)
      for (int i = 0; i < E.rank; ++i) {
        int col = hom_index(E, F, j, i);
        for (int j2 = 0; j2 < F.rank; ++j2)
          if (!F.action[s][j2][j].is_zero())
            H.action[s][hom_index(E, F, j2, i)][col] =
                H.action[s][hom_index(E, F, j2, i)][col] + F.action[s][j2][j];
        for (int i2 = 0; i2 < E.rank; ++i2)
          if (!E.action[s][i][i2].is_zero())
            H.action[s][hom_index(E, F, j, i2)][col] =
                H.action[s][hom_index(E, F, j, i2)][col] - E.action[s][i][i2];
      }
  for (int j = 0; j < F.rank; ++j)
    for (int i = 0; i < E.rank; ++i)
      H.labels.push_back(E.basis_label(i) + "->" + F.basis_label(j));
  return H;
}

EVec act_tensor(const FlatModule& E, const FlatModule& F, const std::vector<RingElement>& a,
                const EVec& ef) {
  FlatModule T = tensor_module(E, F);
  return T.apply(a, ef);
}

RMat act_hom(const FlatModule& E, const FlatModule& F, const std::vector<RingElement>& a,
             const RMat& psi) {
  FlatModule H = hom_module(E, F);
  EVec flat = evec_zero(E.ring(), H.rank);
  for (int j = 0; j < F.rank; ++j)
    for (int i = 0; i < E.rank; ++i) flat[hom_index(E, F, j, i)] = psi[j][i];
  EVec out = H.apply(a, flat);
  RMat res = rmat_zero(E.ring(), F.rank, E.rank);
  for (int j = 0; j < F.rank; ++j)
    for (int i = 0; i < E.rank; ++i) res[j][i] = out[hom_index(E, F, j, i)];
  return res;
}

ValidationReport module_validate(const FlatModule& E) {
  ValidationReport rep;
  const AdaptedPair& pair = E.pair;
  if ((int)E.action.size() != pair.p()) {
    rep.add("shape", "one action matrix per A-generator required");
    return rep;
  }
  for (const auto& m : E.action)
    if ((int)m.size() != E.rank)
      rep.add("shape", "action matrix of wrong size");
  if (!rep.ok()) return rep;
  const Algebroid& L = *pair.ambient;
  for (int s = 0; s < pair.p(); ++s)
    for (int t = s + 1; t < pair.p(); ++t) {
      LElement br = bracket_eval(L, L.gen(s), L.gen(t));
      for (int i = 0; i < E.rank; ++i) {
        EVec ei = E.basis_vec(i);
        EVec lhs = evec_sub(E.apply_gen(s, E.apply_gen(t, ei)),
                            E.apply_gen(t, E.apply_gen(s, ei)));
        EVec rhs = E.apply(std::vector<RingElement>(br.begin(), br.begin() + pair.p()), ei);
        // [a_s,a_t] must lie in A for rhs to make sense; the pair validator
        // reports that separately, here we flag any leak as flatness failure
        for (int k = pair.p(); k < L.rank(); ++k)
          if (!br[k].is_zero()) {
            rep.add("flatness", "bracket [" + L.label(s) + "," + L.label(t) + "] leaves A");
            break;
          }
        if (!evec_is_zero(evec_sub(lhs, rhs))) {
          rep.add("flatness", "generators (" + L.label(s) + "," + L.label(t) + ") on basis " +
                                  std::to_string(i));
        }
      }
    }
  return rep;
}

// --- cochains ------------------------------------------------------------------

Cochain Cochain::zero(FlatModule E, int degree) {
  Cochain c;
  c.module = std::make_shared<const FlatModule>(std::move(E));
  c.degree = degree;
  return c;
}

EVec Cochain::value(const std::vector<int>& sorted_tuple) const {
  auto it = vals.find(sorted_tuple);
  if (it != vals.end()) return it->second;
  return evec_zero(module->ring(), module->rank);
}

EVec Cochain::evaluate(const std::vector<int>& tuple) const {
  std::vector<int> t = tuple;
  int sign = 1;
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j) {
      if (t[i] == t[j]) return evec_zero(module->ring(), module->rank);
      if (t[i] > t[j]) {
        std::swap(t[i], t[j]);
        sign = -sign;
      }
    }
  EVec v = value(t);
  if (sign < 0)
    for (auto& c : v) c = -c;
  return v;
}

bool Cochain::is_zero() const {
  for (const auto& [k, v] : vals)
    if (!evec_is_zero(v)) return false;
  return true;
}

Cochain Cochain::operator-(const Cochain& o) const {
  Cochain out = *this;
  for (const auto& [k, v] : o.vals) {
    auto it = out.vals.find(k);
    if (it == out.vals.end())
      out.vals[k] = evec_scale(-RingElement::one(module->ring()), v);
    else
      it->second = evec_sub(it->second, v);
  }
  return out;
}

Cochain Cochain::operator+(const Cochain& o) const {
  Cochain out = *this;
  for (const auto& [k, v] : o.vals) {
    auto it = out.vals.find(k);
    if (it == out.vals.end())
      out.vals[k] = v;
    else
      it->second = evec_add(it->second, v);
  }
  return out;
}

static void increasing_tuples(int p, int n, std::vector<std::vector<int>>& out) {
  std::vector<int> t(n);
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == n) {
      out.push_back(t);
      return;
    }
    for (int i = start; i < p; ++i) {
      t[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

Cochain ce_differential(const Cochain& omega) {
  const FlatModule& E = *omega.module;
  const AdaptedPair& pair = E.pair;
  const Algebroid& L = *pair.ambient;
  int n = omega.degree;
  Cochain out;
  out.module = omega.module;
  out.degree = n + 1;
  std::vector<std::vector<int>> tuples;
  increasing_tuples(pair.p(), n + 1, tuples);
  for (const auto& t : tuples) {
    EVec acc = evec_zero(E.ring(), E.rank);
    for (int i = 0; i <= n; ++i) {
      std::vector<int> rest;
      for (int k = 0; k <= n; ++k)
        if (k != i) rest.push_back(t[k]);
      EVec term = E.apply_gen(t[i], omega.evaluate(rest));
      if (i % 2) term = evec_scale(-RingElement::one(E.ring()), term);
      acc = evec_add(acc, term);
    }
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        LElement br = bracket_eval(L, L.gen(t[i]), L.gen(t[j]));
        std::vector<int> rest;
        for (int k = 0; k <= n; ++k)
          if (k != i && k != j) rest.push_back(t[k]);
        // omega([a_i,a_j], rest) extended R-linearly in the first slot
        EVec term = evec_zero(E.ring(), E.rank);
        for (int s = 0; s < pair.p(); ++s) {
          if (br[s].is_zero()) continue;
          std::vector<int> args{s};
          args.insert(args.end(), rest.begin(), rest.end());
          term = evec_add(term, evec_scale(br[s], omega.evaluate(args)));
        }
        if ((i + j) % 2 == 0) term = evec_scale(-RingElement::one(E.ring()), term);
        acc = evec_add(acc, term);
      }
    if (!evec_is_zero(acc)) out.vals[t] = acc;
  }
  return out;
}

int default_degree_bound(const AdaptedPair& pair, const std::vector<const FlatModule*>& modules) {
  const Algebroid& L = *pair.ambient;
  if (!L.ring().is_polynomial()) return -1;
  int d = 0;
  auto see = [&](const RingElement& e) { d = std::max(d, e.poly_degree()); };
  for (int i = 0; i < L.rank(); ++i) {
    for (int j = 0; j < L.rank(); ++j)
      for (int k = 0; k < L.rank(); ++k) see(L.bracket_gen(i, j)[k]);
    for (const auto& im : L.anchor_gen(i).images) see(im);
  }
  for (const FlatModule* m : modules)
    for (const auto& mat : m->action)
      for (const auto& row : mat)
        for (const auto& e : row) see(e);
  return 2 * d + 2;
}

CoboundaryOutcome coboundary_solve(const Cochain& c, std::optional<int> degree_bound) {
  const FlatModule& E = *c.module;
  if (c.degree != 1) fail_contract("coboundary_solve expects a 1-cochain");
  if (!ce_differential(c).is_zero()) fail_contract("input to coboundary_solve is not a cocycle");

  const CoefficientRing& R = E.ring();
  int bound = -1;
  AffineProbeProblem prob;
  prob.ring = &R;
  prob.num_unknowns = E.rank;
  if (R.is_polynomial()) {
    bound = degree_bound.value_or(default_degree_bound(E.pair, {&E}));
    prob.ansatz = AnsatzSpace::poly_up_to_degree(R, bound);
  } else {
    prob.ansatz = AnsatzSpace::full_ring(R);
  }
  prob.equations = [&](const std::vector<RingElement>& x) {
    std::vector<RingElement> res;
    for (int s = 0; s < E.pair.p(); ++s) {
      EVec db = E.apply_gen(s, x);
      EVec target = c.value({s});
      for (int i = 0; i < E.rank; ++i) res.push_back(db[i] - target[i]);
    }
    return res;
  };
  AffineProbeResult r = solve_affine_probe(prob);
  CoboundaryOutcome out;
  out.bound_used = bound;
  if (r.solution) {
    out.kind = CoboundaryOutcome::Kind::Found;
    out.primitive = *r.solution;
  } else if (r.exhaustive) {
    out.kind = CoboundaryOutcome::Kind::NoSolution;
    out.cert = *r.certificate;
  } else {
    out.kind = CoboundaryOutcome::Kind::Inconclusive;
  }
  return out;
}

// --- Q-linearization --------------------------------------------------------

QView q_view(const FlatModule& E) { return QView{&E.ring(), E.rank}; }

std::vector<Rat> QView::to_q(const EVec& e) const {
  int d = ring->dim();
  std::vector<Rat> v(rank * d, Rat(0));
  for (int i = 0; i < rank; ++i)
    for (int c = 0; c < d; ++c) v[i * d + c] = e[i].coords()[c];
  return v;
}

EVec QView::from_q(const std::vector<Rat>& v) const {
  int d = ring->dim();
  EVec e = evec_zero(*ring, rank);
  for (int i = 0; i < rank; ++i)
    for (int c = 0; c < d; ++c)
      if (v[i * d + c] != 0)
        e[i] = e[i] + RingElement::basis(*ring, c).scaled(v[i * d + c]);
  return e;
}

QMat q_action(const FlatModule& E, int s) {
  QView view = q_view(E);
  int n = view.dim();
  int d = E.ring().dim();
  QMat m(n, n);
  for (int i = 0; i < E.rank; ++i)
    for (int c = 0; c < d; ++c) {
      EVec e = evec_zero(E.ring(), E.rank);
      e[i] = RingElement::basis(E.ring(), c);
      std::vector<Rat> col = view.to_q(E.apply_gen(s, e));
      for (int r = 0; r < n; ++r) m.at(r, i * d + c) = col[r];
    }
  return m;
}

QMat q_of_rmat(const QView& dom, const QView& cod, const RMat& m) {
  int dd = dom.ring->dim();
  QMat q(cod.dim(), dom.dim());
  for (int i = 0; i < dom.rank; ++i)
    for (int c = 0; c < dd; ++c) {
      EVec e = evec_zero(*dom.ring, dom.rank);
      e[i] = RingElement::basis(*dom.ring, c);
      std::vector<Rat> col = cod.to_q(rmat_apply(m, e));
      for (int r = 0; r < cod.dim(); ++r) q.at(r, i * dd + c) = col[r];
    }
  return q;
}

int q_rank_of_rmat(const QView& dom, const QView& cod, const RMat& m) {
  return q_of_rmat(dom, cod, m).rank();
}

} // namespace apbw
