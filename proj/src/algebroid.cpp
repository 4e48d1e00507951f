#include "apbw/algebroid.hpp"

#include "apbw/error.hpp"

namespace apbw {

Algebroid::Algebroid(const CoefficientRing* ring, int rank,
                     std::vector<std::vector<std::vector<RingElement>>> bracket,
                     std::vector<Derivation> anchor, std::vector<std::string> labels)
    : ring_(ring), rank_(rank), bracket_(std::move(bracket)), anchor_(std::move(anchor)),
      labels_(std::move(labels)) {
  if ((int)bracket_.size() != rank_) fail_structural("bracket table has wrong size");
  for (const auto& row : bracket_) {
    if ((int)row.size() != rank_) fail_structural("bracket table has wrong size");
    for (const auto& entry : row)
      if ((int)entry.size() != rank_) fail_structural("bracket entry has wrong length");
  }
  if ((int)anchor_.size() != rank_) fail_structural("anchor table has wrong size");
  if (labels_.empty())
    for (int i = 0; i < rank_; ++i) labels_.push_back("l" + std::to_string(i));
  if ((int)labels_.size() != rank_) fail_structural("label list has wrong length");
}

LElement Algebroid::zero() const { return LElement(rank_, RingElement::zero(*ring_)); }

LElement Algebroid::gen(int i) const {
  LElement u = zero();
  u[i] = RingElement::one(*ring_);
  return u;
}

Derivation Algebroid::anchor_of(const LElement& u) const {
  Derivation d = Derivation::zero(*ring_);
  for (int i = 0; i < rank_; ++i)
    if (!u[i].is_zero()) d = d + anchor_[i].scaled_left(u[i]);
  return d;
}

LElement l_add(const LElement& u, const LElement& v) {
  LElement w = u;
  for (size_t i = 0; i < w.size(); ++i) w[i] = w[i] + v[i];
  return w;
}

LElement l_scale(const RingElement& r, const LElement& u) {
  LElement w = u;
  for (auto& c : w) c = r * c;
  return w;
}

bool l_is_zero(const LElement& u) {
  for (const auto& c : u)
    if (!c.is_zero()) return false;
  return true;
}

// [u, v] = sum_ij u_i v_j [l_i, l_j] + sum_j rho(u)(v_j) l_j - sum_i rho(v)(u_i) l_i
LElement bracket_eval(const Algebroid& L, const LElement& u, const LElement& v) {
  LElement out = L.zero();
  int n = L.rank();
  for (int i = 0; i < n; ++i) {
    if (u[i].is_zero()) continue;
    for (int j = 0; j < n; ++j) {
      if (v[j].is_zero()) continue;
      RingElement c = u[i] * v[j];
      const auto& g = L.bracket_gen(i, j);
      for (int k = 0; k < n; ++k)
        if (!g[k].is_zero()) out[k] = out[k] + c * g[k];
    }
  }
  Derivation ru = L.anchor_of(u), rv = L.anchor_of(v);
  for (int j = 0; j < n; ++j)
    if (!v[j].is_zero()) out[j] = out[j] + ru.apply(v[j]);
  for (int i = 0; i < n; ++i)
    if (!u[i].is_zero()) out[i] = out[i] - rv.apply(u[i]);
  return out;
}

ValidationReport algebroid_validate(const Algebroid& L) {
  ValidationReport rep;
  int n = L.rank();
  auto name = [&](int i) { return L.label(i); };
  for (int i = 0; i < n; ++i) {
    const auto& d = L.anchor_gen(i);
    ValidationReport drep = derivation_validate(d);
    rep.merge(drep, "anchor(" + name(i) + ")/");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        RingElement sum = L.bracket_gen(i, j)[k] + L.bracket_gen(j, i)[k];
        if (!sum.is_zero())
          rep.add("antisymmetry", "[" + name(i) + "," + name(j) + "] vs [" + name(j) + "," +
                                      name(i) + "] in " + name(k));
      }
  // Jacobi on generator triples, with the Leibniz-extended bracket
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        LElement a = L.gen(i), b = L.gen(j), c = L.gen(k);
        LElement jac = l_add(bracket_eval(L, bracket_eval(L, a, b), c),
                             l_add(bracket_eval(L, bracket_eval(L, b, c), a),
                                   bracket_eval(L, bracket_eval(L, c, a), b)));
        if (!l_is_zero(jac))
          rep.add("jacobi", "(" + name(i) + "," + name(j) + "," + name(k) + ")");
      }
  // rho is a Lie algebra morphism on generators
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Derivation lhs = derivation_bracket(L.anchor_gen(i), L.anchor_gen(j));
      Derivation rhs = L.anchor_of(bracket_eval(L, L.gen(i), L.gen(j)));
      if (!(lhs == rhs))
        rep.add("anchor-morphism", "(" + name(i) + "," + name(j) + ")");
    }
  return rep;
}

ValidationReport pair_validate(const AdaptedPair& pair) {
  ValidationReport rep;
  const Algebroid& L = *pair.ambient;
  if (pair.sub_rank < 0 || pair.sub_rank > L.rank())
    fail_structural("sub_rank out of range");
  for (int i = 0; i < pair.p(); ++i)
    for (int j = i + 1; j < pair.p(); ++j) {
      const LElement br = bracket_eval(L, L.gen(i), L.gen(j));
      for (int k = pair.p(); k < L.rank(); ++k)
        if (!br[k].is_zero())
          rep.add("sub-closure", "[" + L.label(i) + "," + L.label(j) + "] has component " +
                                     L.label(k));
    }
  return rep;
}

QuotientCoset project_coset(const AdaptedPair& pair, const LElement& l) {
  QuotientCoset c;
  for (int t = 0; t < pair.q(); ++t) c.push_back(l[pair.coset_gen(t)]);
  return c;
}

LElement lift_coset(const AdaptedPair& pair, const QuotientCoset& c) {
  LElement l = pair.ambient->zero();
  for (int t = 0; t < pair.q(); ++t) l[pair.coset_gen(t)] = c[t];
  return l;
}

QuotientCoset quotient_action(const AdaptedPair& pair, const std::vector<RingElement>& a_coords,
                              const QuotientCoset& c) {
  const Algebroid& L = *pair.ambient;
  LElement a = L.zero();
  for (int s = 0; s < pair.p(); ++s) a[s] = a_coords[s];
  return project_coset(pair, bracket_eval(L, a, lift_coset(pair, c)));
}

PbwOrderedPair pbw_order(const AdaptedPair& pair) {
  const Algebroid& L = *pair.ambient;
  PbwOrderedPair out;
  out.q = pair.q();
  out.p = pair.p();
  out.to_ambient.resize(L.rank());
  out.from_ambient.resize(L.rank());
  for (int t = 0; t < pair.q(); ++t) out.to_ambient[t] = pair.coset_gen(t);
  for (int s = 0; s < pair.p(); ++s) out.to_ambient[pair.q() + s] = s;
  for (int i = 0; i < L.rank(); ++i) out.from_ambient[out.to_ambient[i]] = i;

  int n = L.rank();
  std::vector<std::vector<std::vector<RingElement>>> bracket(
      n, std::vector<std::vector<RingElement>>(n, std::vector<RingElement>()));
  std::vector<Derivation> anchor;
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    anchor.push_back(L.anchor_gen(out.to_ambient[i]));
    labels.push_back(L.label(out.to_ambient[i]));
    for (int j = 0; j < n; ++j) {
      std::vector<RingElement> entry;
      for (int k = 0; k < n; ++k)
        entry.push_back(L.bracket_gen(out.to_ambient[i], out.to_ambient[j])[out.to_ambient[k]]);
      bracket[i][j] = std::move(entry);
    }
  }
  out.algebroid = std::make_shared<Algebroid>(&L.ring(), n, std::move(bracket),
                                              std::move(anchor), std::move(labels));
  return out;
}

} // namespace apbw
