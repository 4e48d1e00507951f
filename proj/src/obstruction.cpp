#include "apbw/obstruction.hpp"

#include "apbw/error.hpp"

namespace apbw {

ExtensionMiddle extension_middle(const AdaptedPair& pair, const FlatModule& E) {
  ExtensionMiddle X;
  const Algebroid& L = *pair.ambient;
  const CoefficientRing& R = pair.ring();
  X.m = E.rank;
  X.q = pair.q();
  X.e_part = E;
  X.f_part = tensor_module(quotient_module(pair), E);

  FlatModule& M = X.module;
  M.pair = pair;
  M.rank = X.m + X.q * X.m;
  M.action.assign(pair.p(), rmat_zero(R, M.rank, M.rank));
  for (int s = 0; s < X.m; ++s) M.labels.push_back("1(x)" + E.basis_label(s));
  for (int t = 0; t < X.q; ++t)
    for (int s = 0; s < X.m; ++s)
      M.labels.push_back(L.label(pair.coset_gen(t)) + "(x)" + E.basis_label(s));

  for (int a = 0; a < pair.p(); ++a) {
    RMat& act = M.action[a];
    // a . (1 (x) e_s) = 1 (x) (a e_s)
    for (int s = 0; s < X.m; ++s)
      for (int s2 = 0; s2 < X.m; ++s2)
        act[X.e_index(s2)][X.e_index(s)] = E.action[a][s2][s];
    // a . (n_t (x) e_s) = [a, n_t] (x) e_s + n_t (x) (a e_s)
    for (int t = 0; t < X.q; ++t) {
      LElement br = bracket_eval(L, L.gen(a), L.gen(pair.coset_gen(t)));
      for (int s = 0; s < X.m; ++s) {
        int col = X.w_index(t, s);
        // A-part of the bracket crosses the tensor: (c a_u) (x) e = 1 (x) c (a_u e)
        for (int u = 0; u < pair.p(); ++u) {
          if (br[u].is_zero()) continue;
          for (int s2 = 0; s2 < X.m; ++s2)
            if (!E.action[u][s2][s].is_zero())
              act[X.e_index(s2)][col] = act[X.e_index(s2)][col] + br[u] * E.action[u][s2][s];
        }
        // coset part stays in the w-block
        for (int t2 = 0; t2 < X.q; ++t2) {
          const RingElement& d = br[pair.coset_gen(t2)];
          if (!d.is_zero()) act[X.w_index(t2, s)][col] = act[X.w_index(t2, s)][col] + d;
        }
        // n_t (x) (a e_s): move the coefficients across the first slot
        const Derivation& rho_nt = L.anchor_gen(pair.coset_gen(t));
        for (int s2 = 0; s2 < X.m; ++s2) {
          const RingElement& r = E.action[a][s2][s];
          if (r.is_zero()) continue;
          act[X.w_index(t, s2)][col] = act[X.w_index(t, s2)][col] + r;
          RingElement dr = rho_nt.apply(r);
          if (!dr.is_zero()) act[X.e_index(s2)][col] = act[X.e_index(s2)][col] + dr;
        }
      }
    }
  }

  X.incl = rmat_zero(R, M.rank, X.m);
  for (int s = 0; s < X.m; ++s) X.incl[X.e_index(s)][s] = RingElement::one(R);
  X.proj = rmat_zero(R, X.q * X.m, M.rank);
  X.sigma = rmat_zero(R, M.rank, X.q * X.m);
  for (int t = 0; t < X.q; ++t)
    for (int s = 0; s < X.m; ++s) {
      int f = tensor_index(quotient_module(pair), E, t, s);
      X.proj[f][X.w_index(t, s)] = RingElement::one(R);
      X.sigma[X.w_index(t, s)][f] = RingElement::one(R);
    }
  return X;
}

EVec ConnectionLift::apply_gen(int ambient_idx, const EVec& e) const {
  const FlatModule& E = *target;
  const Derivation& d = E.pair.ambient->anchor_gen(ambient_idx);
  EVec out = rmat_apply(op[ambient_idx], e);
  for (int i = 0; i < E.rank; ++i) out[i] = out[i] + d.apply(e[i]);
  return out;
}

EVec ConnectionLift::apply(const LElement& l, const EVec& e) const {
  const FlatModule& E = *target;
  EVec out = evec_zero(E.ring(), E.rank);
  for (int i = 0; i < (int)l.size(); ++i)
    if (!l[i].is_zero()) out = evec_add(out, evec_scale(l[i], apply_gen(i, e)));
  return out;
}

ConnectionLift zero_extension_lift(const AdaptedPair& pair, const FlatModule& E) {
  ConnectionLift lift;
  lift.target = &E;
  for (int i = 0; i < pair.rank(); ++i)
    lift.op.push_back(i < pair.p() ? E.action[i] : rmat_zero(pair.ring(), E.rank, E.rank));
  return lift;
}

Cochain atiyah_cocycle(const AdaptedPair& pair, const FlatModule& E, const ConnectionLift& lift,
                       const FlatModule& hom_fe) {
  const Algebroid& L = *pair.ambient;
  for (int s = 0; s < pair.p(); ++s)
    if (!(lift.op[s] == E.action[s]))
      fail_contract("connection lift does not restrict to the A-action");

  FlatModule quot = quotient_module(pair);
  FlatModule F = tensor_module(quot, E);
  Cochain c = Cochain::zero(hom_fe, 1);
  for (int a = 0; a < pair.p(); ++a) {
    EVec val = evec_zero(pair.ring(), hom_fe.rank);
    for (int t = 0; t < pair.q(); ++t) {
      int nt = pair.coset_gen(t);
      LElement br = bracket_eval(L, L.gen(a), L.gen(nt));
      for (int s = 0; s < E.rank; ++s) {
        EVec e = E.basis_vec(s);
        EVec term = lift.apply(br, e);
        term = evec_sub(term, lift.apply_gen(a, lift.apply_gen(nt, e)));
        term = evec_add(term, lift.apply_gen(nt, lift.apply_gen(a, e)));
        int fcol = tensor_index(quot, E, t, s);
        for (int s2 = 0; s2 < E.rank; ++s2)
          val[hom_index(F, E, s2, fcol)] = term[s2];
      }
    }
    if (!evec_is_zero(val)) c.vals[{a}] = val;
  }
  return c;
}

namespace {

// verified A-linear retraction check: s(a . v) = nabla_a(s(v)) on every basis v
bool retraction_is_a_linear(const FlatModule& middle, const FlatModule& E, const RMat& s) {
  for (int a = 0; a < middle.pair.p(); ++a)
    for (int col = 0; col < middle.rank; ++col) {
      EVec av = middle.apply_gen(a, middle.basis_vec(col));
      EVec lhs = rmat_apply(s, av);
      EVec rhs = E.apply_gen(a, rmat_apply(s, middle.basis_vec(col)));
      if (!evec_is_zero(evec_sub(lhs, rhs))) return false;
    }
  return true;
}

bool section_is_a_linear(const FlatModule& E, const FlatModule& J, const RMat& sec) {
  for (int a = 0; a < E.pair.p(); ++a)
    for (int col = 0; col < E.rank; ++col) {
      EVec ae = E.apply_gen(a, E.basis_vec(col));
      EVec lhs = rmat_apply(sec, ae);
      EVec rhs = J.apply_gen(a, rmat_apply(sec, E.basis_vec(col)));
      if (!evec_is_zero(evec_sub(lhs, rhs))) return false;
    }
  return true;
}

} // namespace

ObstructionReport alpha_vanishing(const AdaptedPair& pair, const FlatModule& E,
                                  std::optional<int> bound) {
  ExtensionMiddle X = extension_middle(pair, E);
  FlatModule H = hom_module(X.f_part, E);

  // failure of the tautological R-retraction to be A-linear, as a 1-cochain
  Cochain c = Cochain::zero(H, 1);
  for (int a = 0; a < pair.p(); ++a) {
    EVec val = evec_zero(pair.ring(), H.rank);
    for (int f = 0; f < X.f_part.rank; ++f) {
      EVec av = X.module.apply_gen(a, rmat_apply(X.sigma, X.f_part.basis_vec(f)));
      for (int s2 = 0; s2 < X.m; ++s2) val[hom_index(X.f_part, E, s2, f)] = av[X.e_index(s2)];
    }
    if (!evec_is_zero(val)) c.vals[{a}] = val;
  }

  ObstructionReport rep;
  rep.which = "alpha";
  rep.cocycle = c;
  CoboundaryOutcome out = coboundary_solve(c, bound);
  rep.bound = out.bound_used;
  if (out.kind == CoboundaryOutcome::Kind::Found) {
    // retraction = [ id | beta ] on the (e, w) basis split
    RMat s = rmat_zero(pair.ring(), X.m, X.module.rank);
    for (int i = 0; i < X.m; ++i) s[i][X.e_index(i)] = RingElement::one(pair.ring());
    for (int f = 0; f < X.f_part.rank; ++f)
      for (int s2 = 0; s2 < X.m; ++s2)
        s[s2][X.m + f] = out.primitive[hom_index(X.f_part, E, s2, f)];
    if (!retraction_is_a_linear(X.module, E, s))
      fail_internal("alpha splitting failed exact re-verification");
    rep.verdict = ObstructionReport::Verdict::Vanishes;
    rep.splitting = s;
  } else if (out.kind == CoboundaryOutcome::Kind::NoSolution) {
    rep.verdict = ObstructionReport::Verdict::NonVanishing;
    rep.cert = out.cert;
  } else {
    rep.verdict = ObstructionReport::Verdict::Inconclusive;
  }
  return rep;
}

// --- jets -----------------------------------------------------------------------

JetOneModule jet_one_module(const AdaptedPair& pair, const FlatModule& E) {
  JetOneModule J;
  const Algebroid& L = *pair.ambient;
  const CoefficientRing& R = pair.ring();
  J.m = E.rank;
  J.q = pair.q();
  FlatModule quot = quotient_module(pair);
  J.hom_la_e = hom_module(quot, E);

  FlatModule& M = J.module;
  M.pair = pair;
  M.rank = J.m * (1 + J.q);
  M.action.assign(pair.p(), rmat_zero(R, M.rank, M.rank));
  for (int s = 0; s < J.m; ++s) M.labels.push_back("jet[" + E.basis_label(s) + "]");
  for (int t = 0; t < J.q; ++t)
    for (int s = 0; s < J.m; ++s)
      M.labels.push_back(L.label(pair.coset_gen(t)) + "*->" + E.basis_label(s));

  for (int a = 0; a < pair.p(); ++a) {
    RMat& act = M.action[a];
    // basis phi~_{e_s}: value at 1 is e_s, values on coset generators are 0
    for (int s = 0; s < J.m; ++s) {
      EVec at_one = evec_zero(R, J.m);
      for (int s2 = 0; s2 < J.m; ++s2) at_one[s2] = E.action[a][s2][s];
      std::vector<EVec> at_cosets;
      for (int t = 0; t < J.q; ++t) {
        // (a * phi)(n_t) = phi([n_t, a]) with phi(a_u) = nabla_{a_u} e_s
        LElement br = bracket_eval(L, L.gen(pair.coset_gen(t)), L.gen(a));
        EVec v = evec_zero(R, J.m);
        for (int u = 0; u < pair.p(); ++u) {
          if (br[u].is_zero()) continue;
          for (int s2 = 0; s2 < J.m; ++s2)
            if (!E.action[u][s2][s].is_zero()) v[s2] = v[s2] + br[u] * E.action[u][s2][s];
        }
        at_cosets.push_back(v);
      }
      EVec col = J.coords_from_raw(at_one, at_cosets);
      for (int r = 0; r < M.rank; ++r) act[r][J.e_index(s)] = col[r];
    }
    // basis phi_{psi: n_t' -> e_s}: value at 1 is 0
    for (int tp = 0; tp < J.q; ++tp)
      for (int s = 0; s < J.m; ++s) {
        EVec at_one = evec_zero(R, J.m);
        std::vector<EVec> at_cosets;
        for (int t = 0; t < J.q; ++t) {
          LElement br = bracket_eval(L, L.gen(pair.coset_gen(t)), L.gen(a));
          EVec v = evec_zero(R, J.m);
          const RingElement& d = br[pair.coset_gen(tp)];
          if (!d.is_zero()) v[s] = v[s] + d; // phi(n_t') = e_s picks this coefficient
          if (t == tp) {
            for (int s2 = 0; s2 < J.m; ++s2)
              v[s2] = v[s2] + E.action[a][s2][s]; // nabla_a(phi(n_t)) on a basis value
          }
          at_cosets.push_back(v);
        }
        EVec col = J.coords_from_raw(at_one, at_cosets);
        for (int r = 0; r < M.rank; ++r) act[r][J.psi_index(tp, s)] = col[r];
      }
  }

  J.incl = rmat_zero(R, M.rank, J.hom_la_e.rank);
  for (int t = 0; t < J.q; ++t)
    for (int s = 0; s < J.m; ++s)
      J.incl[J.psi_index(t, s)][hom_index(quot, E, s, t)] = RingElement::one(R);
  J.proj = rmat_zero(R, J.m, M.rank);
  for (int s = 0; s < J.m; ++s) J.proj[s][J.e_index(s)] = RingElement::one(R);
  return J;
}

EVec JetOneModule::raw_value_at_one(const EVec& coords) const {
  EVec v = evec_zero(*coords[0].ring(), m);
  for (int s = 0; s < m; ++s) v[s] = coords[e_index(s)];
  return v;
}

EVec JetOneModule::raw_value_at_coset(int t, const EVec& coords) const {
  const AdaptedPair& pair = module.pair;
  const Derivation& rho_nt = pair.ambient->anchor_gen(pair.coset_gen(t));
  EVec v = evec_zero(pair.ring(), m);
  for (int s = 0; s < m; ++s)
    v[s] = coords[psi_index(t, s)] + rho_nt.apply(coords[e_index(s)]);
  return v;
}

EVec JetOneModule::coords_from_raw(const EVec& at_one, const std::vector<EVec>& at_cosets) const {
  const AdaptedPair& pair = module.pair;
  EVec coords = evec_zero(pair.ring(), module.rank);
  for (int s = 0; s < m; ++s) coords[e_index(s)] = at_one[s];
  for (int t = 0; t < q; ++t) {
    const Derivation& rho_nt = pair.ambient->anchor_gen(pair.coset_gen(t));
    for (int s = 0; s < m; ++s)
      coords[psi_index(t, s)] = at_cosets[t][s] - rho_nt.apply(at_one[s]);
  }
  return coords;
}

ObstructionReport tilde_vanishing(const AdaptedPair& pair, const FlatModule& E,
                                  std::optional<int> bound) {
  JetOneModule J = jet_one_module(pair, E);
  FlatModule H = hom_module(E, J.hom_la_e);
  const CoefficientRing& R = pair.ring();

  // cochain of the zero-lift section: Hom(L/A,E)-part of a * sigma0(e) - sigma0(a e)
  Cochain c = Cochain::zero(H, 1);
  for (int a = 0; a < pair.p(); ++a) {
    EVec val = evec_zero(R, H.rank);
    for (int s = 0; s < E.rank; ++s) {
      EVec sig = evec_zero(R, J.module.rank);
      sig[J.e_index(s)] = RingElement::one(R);
      EVec x = J.module.apply_gen(a, sig);
      // sigma0(a e_s) has e-part nabla_a e_s and zero psi-part
      for (int s2 = 0; s2 < E.rank; ++s2)
        if (!(x[J.e_index(s2)] == E.action[a][s2][s]))
          fail_internal("jet module action has wrong evaluation-at-1 component");
      for (int t = 0; t < J.q; ++t)
        for (int s2 = 0; s2 < E.rank; ++s2) {
          const RingElement& entry = x[J.psi_index(t, s2)];
          if (!entry.is_zero())
            val[hom_index(E, J.hom_la_e, hom_index(quotient_module(pair), E, s2, t), s)] = entry;
        }
    }
    // solve d(B) = -c later, so store the negative now
    if (!evec_is_zero(val))
      c.vals[{a}] = evec_scale(-RingElement::one(R), val);
  }

  ObstructionReport rep;
  rep.which = "alpha-tilde";
  rep.cocycle = c;
  CoboundaryOutcome out = coboundary_solve(c, bound);
  rep.bound = out.bound_used;
  if (out.kind == CoboundaryOutcome::Kind::Found) {
    RMat sec = rmat_zero(R, J.module.rank, E.rank);
    for (int s = 0; s < E.rank; ++s) {
      sec[J.e_index(s)][s] = RingElement::one(R);
      for (int t = 0; t < J.q; ++t)
        for (int s2 = 0; s2 < E.rank; ++s2)
          sec[J.psi_index(t, s2)][s] =
              out.primitive[hom_index(E, J.hom_la_e, hom_index(quotient_module(pair), E, s2, t), s)];
    }
    if (!section_is_a_linear(E, J.module, sec))
      fail_internal("jet splitting failed exact re-verification");
    rep.verdict = ObstructionReport::Verdict::Vanishes;
    rep.splitting = sec;
  } else if (out.kind == CoboundaryOutcome::Kind::NoSolution) {
    rep.verdict = ObstructionReport::Verdict::NonVanishing;
    rep.cert = out.cert;
  } else {
    rep.verdict = ObstructionReport::Verdict::Inconclusive;
  }
  return rep;
}

ConnectionLift promote_to_neighbourhood(const AdaptedPair& pair, const FlatModule& E,
                                        const RMat& alpha_splitting) {
  ExtensionMiddle X = extension_middle(pair, E);
  if (!retraction_is_a_linear(X.module, E, alpha_splitting))
    fail_contract("promotion requires a verified alpha splitting");

  ConnectionLift lift;
  lift.target = &E;
  const CoefficientRing& R = pair.ring();
  for (int i = 0; i < pair.rank(); ++i) {
    if (i < pair.p()) {
      lift.op.push_back(E.action[i]);
      continue;
    }
    int t = i - pair.p();
    RMat m = rmat_zero(R, E.rank, E.rank);
    for (int s = 0; s < E.rank; ++s)
      for (int s2 = 0; s2 < E.rank; ++s2) m[s2][s] = alpha_splitting[s2][X.w_index(t, s)];
    lift.op.push_back(std::move(m));
  }

  // nabla_l(r e) - r nabla_l(e) = l(r) e holds by the twist convention; the
  // substantive identity is [nabla_a, nabla_l] = nabla_{[a,l]} on E.
  const Algebroid& L = *pair.ambient;
  for (int a = 0; a < pair.p(); ++a)
    for (int i = 0; i < pair.rank(); ++i) {
      LElement br = bracket_eval(L, L.gen(a), L.gen(i));
      for (int s = 0; s < E.rank; ++s) {
        EVec e = E.basis_vec(s);
        EVec lhs = evec_sub(lift.apply_gen(a, lift.apply_gen(i, e)),
                            lift.apply_gen(i, lift.apply_gen(a, e)));
        EVec rhs = lift.apply(br, e);
        if (!evec_is_zero(evec_sub(lhs, rhs)))
          fail_internal("promoted lift violates the neighbourhood bracket relation");
      }
    }
  lift.certified = true;
  return lift;
}

// --- the appendix comparison ------------------------------------------------------

ComparisonReport compare_classes(const AdaptedPair& pair, const FlatModule& E,
                                 std::optional<int> bound) {
  ComparisonReport rep;
  const CoefficientRing& R = pair.ring();
  const Algebroid& L = *pair.ambient;
  ExtensionMiddle X = extension_middle(pair, E);
  JetOneModule J = jet_one_module(pair, E);
  FlatModule quot = quotient_module(pair);
  FlatModule homLM = hom_module(quot, X.module); // Hom_R(L/A, middle)
  int m = E.rank, q = pair.q();

  // ell(phi)(n_t) = n_t (x) phi(1) - 1 (x) phi(n_t), columns on the J basis
  rep.ell = rmat_zero(R, homLM.rank, J.module.rank);
  for (int col = 0; col < J.module.rank; ++col) {
    EVec coords = evec_zero(R, J.module.rank);
    coords[col] = RingElement::one(R);
    EVec at_one = J.raw_value_at_one(coords);
    for (int t = 0; t < q; ++t) {
      EVec at_nt = J.raw_value_at_coset(t, coords);
      // n_t (x) (sum r_s e_s) = sum r_s w_{t,s} + n_t(r_s) (1 (x) e_s)
      const Derivation& rho_nt = L.anchor_gen(pair.coset_gen(t));
      EVec val = evec_zero(R, X.module.rank);
      for (int s = 0; s < m; ++s) {
        if (!at_one[s].is_zero()) {
          val[X.w_index(t, s)] = val[X.w_index(t, s)] + at_one[s];
          RingElement dr = rho_nt.apply(at_one[s]);
          if (!dr.is_zero()) val[X.e_index(s)] = val[X.e_index(s)] + dr;
        }
        if (!at_nt[s].is_zero()) val[X.e_index(s)] = val[X.e_index(s)] - at_nt[s];
      }
      for (int r = 0; r < X.module.rank; ++r)
        rep.ell[hom_index(quot, X.module, r, t)][col] = val[r];
    }
  }

  // ell(phi)(a_u) = a_u (x) phi(1) - 1 (x) phi(a_u) vanishes because the jet
  // constraint forces phi(a_u) = nabla_{a_u} phi(1).  The presentation encodes
  // that constraint, so the substantive check is that the residual action also
  // satisfies it: the evaluation-at-1 of a_u * phi must equal nabla_{a_u} phi(1).
  rep.kills_sub_ok = true;
  for (int col = 0; col < J.module.rank; ++col) {
    EVec coords = evec_zero(R, J.module.rank);
    coords[col] = RingElement::one(R);
    EVec at_one = J.raw_value_at_one(coords);
    for (int u = 0; u < pair.p(); ++u) {
      EVec acted = J.module.apply_gen(u, coords);
      EVec lhs = J.raw_value_at_one(acted);
      EVec rhs = E.apply_gen(u, at_one);
      if (!evec_is_zero(evec_sub(lhs, rhs))) rep.kills_sub_ok = false;
    }
  }

  // A-linearity of ell: ell(a * phi) = a . ell(phi) in Hom(L/A, middle)
  rep.ell_a_linear_ok = true;
  for (int a = 0; a < pair.p(); ++a)
    for (int col = 0; col < J.module.rank; ++col) {
      EVec jcol = evec_zero(R, J.module.rank);
      jcol[col] = RingElement::one(R);
      EVec lhs = rmat_apply(rep.ell, J.module.apply_gen(a, jcol));
      EVec rhs = homLM.apply_gen(a, rmat_apply(rep.ell, jcol));
      if (!evec_is_zero(evec_sub(lhs, rhs))) rep.ell_a_linear_ok = false;
    }

  // forward = (evaluation at 1, ell) : J -> E + Hom(L/A, middle)
  int sum_rank = m + homLM.rank;
  rep.forward = rmat_zero(R, sum_rank, J.module.rank);
  for (int col = 0; col < J.module.rank; ++col) {
    for (int s = 0; s < m; ++s) rep.forward[s][col] = J.proj[s][col];
    for (int r = 0; r < homLM.rank; ++r) rep.forward[m + r][col] = rep.ell[r][col];
  }

  // difference map D(e, f)(n_t) = proj(f(n_t)) - n_t (x) e
  FlatModule homLF = hom_module(quot, X.f_part);
  RMat D = rmat_zero(R, homLF.rank, sum_rank);
  for (int t = 0; t < q; ++t)
    for (int s = 0; s < m; ++s) {
      int frow = tensor_index(quot, E, t, s);
      D[hom_index(quot, X.f_part, frow, t)][s] = -RingElement::one(R);
    }
  for (int t = 0; t < q; ++t)
    for (int mr = 0; mr < X.module.rank; ++mr) {
      int col = m + hom_index(quot, X.module, mr, t);
      for (int fr = 0; fr < X.f_part.rank; ++fr)
        if (!X.proj[fr][mr].is_zero())
          D[hom_index(quot, X.f_part, fr, t)][col] = X.proj[fr][mr];
    }
  {
    RMat comp = rmat_mul(D, rep.forward);
    rep.lands_in_kernel_ok = true;
    for (const auto& row : comp)
      for (const auto& e : row)
        if (!e.is_zero()) rep.lands_in_kernel_ok = false;
  }

  // backward (phi_{e,f}): raw values phi(1) = e, phi(n_t) = E-part of (n_t (x) e - f(n_t))
  rep.backward = rmat_zero(R, J.module.rank, sum_rank);
  for (int col = 0; col < sum_rank; ++col) {
    EVec e = evec_zero(R, m);
    std::vector<EVec> fvals(q, evec_zero(R, X.module.rank));
    if (col < m)
      e[col] = RingElement::one(R);
    else {
      int h = col - m; // hom_index(quot, X.module, mr, t)
      int mr = h / q, t = h % q;
      fvals[t][mr] = RingElement::one(R);
    }
    std::vector<EVec> at_cosets;
    for (int t = 0; t < q; ++t) {
      const Derivation& rho_nt = L.anchor_gen(pair.coset_gen(t));
      EVec val = evec_zero(R, m);
      for (int s = 0; s < m; ++s) {
        // E-part of n_t (x) e
        if (!e[s].is_zero()) {
          RingElement dr = rho_nt.apply(e[s]);
          if (!dr.is_zero()) val[s] = val[s] + dr;
        }
        val[s] = val[s] - fvals[t][X.e_index(s)];
      }
      at_cosets.push_back(val);
    }
    EVec coords = J.coords_from_raw(e, at_cosets);
    for (int r = 0; r < J.module.rank; ++r) rep.backward[r][col] = coords[r];
  }

  {
    RMat comp = rmat_mul(rep.backward, rep.forward);
    RMat id = rmat_identity(R, J.module.rank);
    rep.inverse_ok = true;
    for (int i = 0; i < J.module.rank; ++i)
      for (int j = 0; j < J.module.rank; ++j)
        if (!(comp[i][j] == id[i][j])) rep.inverse_ok = false;
  }

  if (!R.is_polynomial()) {
    // rank of ker D equals rank of J, so the split injection is onto
    QView vker{&R, sum_rank}, vhf{&R, homLF.rank}, vj{&R, J.module.rank};
    QMat qD = q_of_rmat(vker, vhf, D);
    int ker_dim = vker.dim() > 0 ? (vker.dim() - qD.rank()) : 0;
    QMat qF = q_of_rmat(vj, vker, rep.forward);
    rep.kernel_identified_ok = (qF.rank() == ker_dim) && (ker_dim == vj.dim());
  } else {
    // factor id - forward.backward through D to certify ker D c im(forward)
    RMat P = rmat_mul(rep.forward, rep.backward);
    RMat defect = rmat_sub(rmat_identity(R, sum_rank), P);
    AffineProbeProblem prob;
    prob.ring = &R;
    prob.num_unknowns = sum_rank * homLF.rank;
    int d = bound.value_or(default_degree_bound(pair, {&E}));
    prob.ansatz = AnsatzSpace::poly_up_to_degree(R, d);
    prob.equations = [&](const std::vector<RingElement>& x) {
      std::vector<RingElement> res;
      for (int i = 0; i < sum_rank; ++i)
        for (int j = 0; j < sum_rank; ++j) {
          RingElement acc = defect[i][j];
          for (int k = 0; k < homLF.rank; ++k)
            acc = acc - x[i * homLF.rank + k] * D[k][j];
          res.push_back(acc);
        }
      return res;
    };
    rep.kernel_identified_ok = solve_affine_probe(prob).solution.has_value();
  }

  rep.alpha = alpha_vanishing(pair, E, bound);
  rep.tilde = tilde_vanishing(pair, E, bound);
  rep.verdicts_agree = rep.alpha.verdict == rep.tilde.verdict;
  return rep;
}

} // namespace apbw
