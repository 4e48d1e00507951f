#include "apbw/report.hpp"

#include "apbw/error.hpp"
#include "apbw/oracle.hpp"
#include "apbw/sha256.hpp"

#include <sstream>

using nlohmann::json;

namespace apbw {

json json_of_rmat(const RMat& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& e : row) r.push_back(e.to_string());
    rows.push_back(r);
  }
  return rows;
}

RMat rmat_of_json(const CoefficientRing& R, const json& j) {
  RMat m;
  for (const auto& row : j) {
    std::vector<RingElement> r;
    for (const auto& e : row) r.push_back(parse_ring_element(R, e.get<std::string>()));
    m.push_back(std::move(r));
  }
  return m;
}

json json_of_cochain(const Cochain& c) {
  json vals = json::array();
  for (const auto& [args, v] : c.vals) {
    json entry;
    entry["args"] = args;
    json vv = json::array();
    for (const auto& e : v) vv.push_back(e.to_string());
    entry["value"] = vv;
    vals.push_back(entry);
  }
  return json{{"degree", c.degree}, {"values", vals}};
}

json json_of_farkas(const FarkasCertificate& c) {
  json y = json::array();
  for (const auto& v : c.y) y.push_back(rat_to_string(v));
  return json{{"y", y}, {"rank_A", c.rank_A}, {"rank_augmented", c.rank_augmented}};
}

FarkasCertificate farkas_of_json(const json& j) {
  FarkasCertificate c;
  for (const auto& v : j.at("y")) c.y.push_back(rat_from_string(v.get<std::string>()));
  c.rank_A = j.at("rank_A").get<int>();
  c.rank_augmented = j.at("rank_augmented").get<int>();
  return c;
}

static std::string verdict_name(ObstructionReport::Verdict v) {
  switch (v) {
    case ObstructionReport::Verdict::Vanishes: return "vanishes";
    case ObstructionReport::Verdict::NonVanishing: return "non-vanishing";
    default: return "inconclusive";
  }
}

json json_of_obstruction(const ObstructionReport& r) {
  json out;
  out["which"] = r.which;
  out["verdict"] = verdict_name(r.verdict);
  out["cocycle"] = json_of_cochain(r.cocycle);
  if (r.verdict == ObstructionReport::Verdict::Vanishes) out["splitting"] = json_of_rmat(r.splitting);
  if (r.verdict == ObstructionReport::Verdict::NonVanishing)
    out["certificate"] = json_of_farkas(r.cert);
  if (r.bound >= 0) out["bound"] = r.bound;
  return out;
}

json json_of_map_report(const FilteredMapReport& r) {
  json out;
  out["name"] = r.name;
  out["truncation"] = r.truncation;
  out["domain"] = r.domain_labels;
  out["codomain"] = r.codomain_labels;
  out["domain_degrees"] = r.domain_degrees;
  out["codomain_degrees"] = r.codomain_degrees;
  out["matrix"] = json_of_rmat(r.matrix);
  out["a_linear"] = r.a_linear;
  out["filtered"] = r.filtered;
  out["bijective_per_degree"] = r.bijective_per_degree;
  out["gr_canonical"] = r.gr_canonical;
  return out;
}

json finish_report(const ProblemDocument& doc, const std::string& command, json results,
                   long long timing_ms) {
  json out;
  out["schema"] = kReportSchema;
  out["tool_version"] = kToolVersion;
  out["command"] = command;
  out["input_digest"] = "sha256:" + sha256_hex(serialize_problem(doc));
  out["results"] = std::move(results);
  out["timing_ms"] = timing_ms;
  return out;
}

// --- validate -----------------------------------------------------------------

static json json_of_validation(const ValidationReport& rep) {
  json out = json::array();
  for (const auto& is : rep.issues) out.push_back({{"axiom", is.axiom}, {"witness", is.witness}});
  return out;
}

RunResult cmd_validate(const ProblemDocument& doc, const CommandFlags&) {
  json results;
  bool ok = true;
  ValidationReport ring_rep = ring_validate(*doc.ring);
  results["ring"] = json_of_validation(ring_rep);
  ok = ok && ring_rep.ok();
  ValidationReport alg_rep = algebroid_validate(*doc.algebroid);
  results["algebroid"] = json_of_validation(alg_rep);
  ok = ok && alg_rep.ok();
  ValidationReport pair_rep = pair_validate(doc.pair);
  results["pair"] = json_of_validation(pair_rep);
  ok = ok && pair_rep.ok();
  json mods = json::object();
  // built-in modules validate by construction; report them anyway
  for (const auto& name : doc.module_names()) {
    FlatModule m = doc.named_module(name);
    ValidationReport mrep = module_validate(m);
    mods[name] = json_of_validation(mrep);
    ok = ok && mrep.ok();
  }
  results["modules"] = mods;
  results["valid"] = ok;
  return {results, ok ? 0 : 1};
}

// --- class --------------------------------------------------------------------

RunResult cmd_class(const ProblemDocument& doc, const CommandFlags& flags) {
  FlatModule E = doc.named_module(flags.module_name);
  std::optional<int> bound = flags.degree_bound ? flags.degree_bound : doc.options.degree_bound;
  ComparisonReport cmp = compare_classes(doc.pair, E, bound);

  json results;
  results["module"] = flags.module_name;
  results["alpha"] = json_of_obstruction(cmp.alpha);
  results["alpha_tilde"] = json_of_obstruction(cmp.tilde);
  results["comparison"] = {{"kills_sub", cmp.kills_sub_ok},
                           {"ell_a_linear", cmp.ell_a_linear_ok},
                           {"lands_in_kernel", cmp.lands_in_kernel_ok},
                           {"mutually_inverse", cmp.inverse_ok},
                           {"kernel_identified", cmp.kernel_identified_ok},
                           {"verdicts_agree", cmp.verdicts_agree},
                           {"ell", json_of_rmat(cmp.ell)}};
  int code = 0;
  switch (cmp.alpha.verdict) {
    case ObstructionReport::Verdict::Vanishes: code = 0; break;
    case ObstructionReport::Verdict::NonVanishing: code = 1; break;
    case ObstructionReport::Verdict::Inconclusive: code = 2; break;
  }
  return {results, code};
}

// --- pbw ----------------------------------------------------------------------

RunResult cmd_pbw(const ProblemDocument& doc, const CommandFlags& flags) {
  FlatModule E = doc.named_module(flags.module_name);
  FlatModule LA = doc.quotient();
  int N = flags.truncation.value_or(doc.options.truncation);
  int budget = flags.budget.value_or(doc.options.budget);
  std::optional<int> bound = flags.degree_bound ? flags.degree_bound : doc.options.degree_bound;
  const CoefficientRing& R = doc.pair.ring();

  json results;
  results["module"] = flags.module_name;
  results["truncation"] = N;

  ObstructionReport alpha = alpha_vanishing(doc.pair, LA, bound);
  ObstructionReport alphaE = alpha_vanishing(doc.pair, E, bound);
  ObstructionReport tilde = tilde_vanishing(doc.pair, LA, bound);
  results["class"] = {{"alpha", json_of_obstruction(alpha)},
                      {"alpha_E", json_of_obstruction(alphaE)},
                      {"alpha_tilde", json_of_obstruction(tilde)}};

  NeighborhoodQuotient a1 = a1_quotient(doc.pair, std::max(N, 2), budget);
  json a1j;
  a1j["degree_ranks"] = a1.degree_ranks();
  std::vector<int> tensor_ranks;
  for (int k = 0; k <= a1.truncation; ++k) {
    int qk = 1;
    for (int i = 0; i < k; ++i) qk *= doc.pair.q();
    tensor_ranks.push_back(qk);
  }
  a1j["tensor_ranks"] = tensor_ranks;
  a1j["learned_rules"] = (int)a1.learned.size();
  a1j["completed"] = a1.completed;
  a1j["critical_pairs"] = a1.critical_pairs_processed;
  if (!R.is_polynomial()) {
    A1Elimination elim = a1_quotient_elimination(doc.pair, a1.truncation);
    a1j["elimination_ranks"] = elim.degree_ranks;
    a1j["elimination_stable"] = elim.stable;
    bool agree = elim.degree_ranks == a1.degree_ranks() && elim.basis == a1.basis &&
                 elim.action == a1.action;
    a1j["elimination_agrees"] = agree;
    if (!agree) fail_internal("rewriting and elimination disagree on the neighbourhood quotient");
  }
  results["a1"] = a1j;
  if (!a1.completed) return {results, 4};

  bool lift_ok = alpha.verdict == ObstructionReport::Verdict::Vanishes;
  bool liftE_ok = alphaE.verdict == ObstructionReport::Verdict::Vanishes;
  if (lift_ok) {
    ConnectionLift lift = promote_to_neighbourhood(doc.pair, LA, alpha.splitting);
    results["phi"] = json_of_map_report(phi_map(doc.pair, lift, a1));
    if (liftE_ok && E.rank > 0) {
      ConnectionLift liftE = promote_to_neighbourhood(doc.pair, E, alphaE.splitting);
      results["eta"] = json_of_map_report(eta_map(doc.pair, E, liftE, a1));
      results["composite"] = json_of_map_report(pbw_composite(doc.pair, E, lift, liftE, a1));
    }
  }

  IsoSearchOutcome iso = filtered_iso_search(doc.pair, E, N, bound);
  json isoj;
  switch (iso.kind) {
    case IsoSearchOutcome::Kind::Exists:
      isoj["outcome"] = "exists";
      isoj["report"] = json_of_map_report(*iso.report);
      break;
    case IsoSearchOutcome::Kind::NotExists:
      isoj["outcome"] = "not-exists";
      isoj["certificate"] = json_of_farkas(iso.cert);
      isoj["stage"] = iso.cert_stage;
      break;
    case IsoSearchOutcome::Kind::Inconclusive:
      isoj["outcome"] = "inconclusive";
      if (iso.bound >= 0) isoj["bound"] = iso.bound;
      break;
  }
  results["iso_search"] = isoj;

  bool iso_exists = iso.kind == IsoSearchOutcome::Kind::Exists;
  bool consistent = true;
  if (iso.kind != IsoSearchOutcome::Kind::Inconclusive &&
      alpha.verdict != ObstructionReport::Verdict::Inconclusive &&
      alphaE.verdict != ObstructionReport::Verdict::Inconclusive)
    consistent = ((lift_ok && liftE_ok) == iso_exists);
  results["equivalence"] = {{"alpha_vanishes", lift_ok},
                            {"alpha_E_vanishes", liftE_ok},
                            {"tilde_vanishes", tilde.verdict == ObstructionReport::Verdict::Vanishes},
                            {"lift_constructed", lift_ok},
                            {"iso_exists", iso_exists},
                            {"consistent", consistent}};
  if (!consistent) fail_internal("equivalence table inconsistent; contradicts the main theorems");

  int code = 0;
  if (iso.kind == IsoSearchOutcome::Kind::NotExists) code = 1;
  if (iso.kind == IsoSearchOutcome::Kind::Inconclusive) code = 2;
  return {results, code};
}

// --- dims ----------------------------------------------------------------------

RunResult cmd_dims(const ProblemDocument& doc, const CommandFlags& flags) {
  int N = flags.truncation.value_or(doc.options.truncation);
  json results;
  json gr = json::array();
  for (int k = 0; k <= N; ++k) {
    GrRank g = gr_rank(*doc.algebroid, k);
    gr.push_back({{"degree", k}, {"rank", g.rank}});
  }
  results["gr_envelope"] = gr;
  LeftQuotient lq = left_quotient(doc.pair, N);
  json lqj = json::array();
  for (int k = 0; k <= N; ++k) lqj.push_back({{"degree", k}, {"rank", lq.degree_rank(k)}});
  results["left_quotient"] = lqj;
  if (N >= 2) {
    NeighborhoodQuotient a1 =
        a1_quotient(doc.pair, N, flags.budget.value_or(doc.options.budget));
    results["a1_degree_ranks"] = a1.degree_ranks();
    results["a1_completed"] = a1.completed;
  }
  return {results, 0};
}

// --- oracle ---------------------------------------------------------------------

RunResult cmd_oracle(const ProblemDocument& doc, const CommandFlags& flags) {
  if (doc.ring->is_polynomial())
    fail_structural("oracle command supports only finite-dimensional coefficient rings");
  int N = flags.truncation.value_or(doc.options.truncation);
  OracleDiff diff;
  json results;

  // gr U(L) ranks against the combinatorial word count
  PbwOrderedPair order = pbw_order(doc.pair);
  std::vector<int> oracle_gr = oracle_envelope_ranks(*order.algebroid, N);
  json grj = json::array();
  for (int k = 0; k <= N; ++k) {
    int expected = gr_rank(*doc.algebroid, k).rank;
    grj.push_back({{"degree", k}, {"oracle", oracle_gr[k]}, {"pipeline", expected}});
    if (oracle_gr[k] != expected)
      diff.add("gr U(L) rank mismatch at degree " + std::to_string(k));
  }
  results["gr_envelope"] = grj;

  // left quotient basis and action against the straightening pipeline
  {
    LeftQuotient lq = left_quotient(doc.pair, N);
    OracleInduced ind = oracle_induced_module(doc.pair, doc.unit(), N);
    if (ind.words != lq.basis) {
      diff.add("left quotient basis mismatch");
    } else {
      for (int a = 0; a < doc.pair.p(); ++a)
        if (!(ind.action[a] == lq.action[a]))
          diff.add("left quotient action mismatch for A-generator " + std::to_string(a));
    }
    json ranks = json::array();
    for (int k = 0; k <= N; ++k) ranks.push_back(lq.degree_rank(k));
    results["left_quotient_ranks"] = ranks;
  }

  // neighbourhood quotient: rewriting-completion against elimination
  {
    int NN = std::max(N, 2);
    NeighborhoodQuotient a1 = a1_quotient(doc.pair, NN, flags.budget.value_or(doc.options.budget));
    A1Elimination elim = a1_quotient_elimination(doc.pair, NN);
    if (!elim.stable) diff.add("a1 elimination did not stabilize at the default buffer");
    if (a1.degree_ranks() != elim.degree_ranks) diff.add("a1 rank mismatch");
    if (a1.basis != elim.basis) diff.add("a1 basis mismatch");
    else if (a1.action != elim.action) diff.add("a1 action mismatch");
    results["a1_ranks"] = elim.degree_ranks;
  }

  // verdicts per module through the elimination route
  json verdicts = json::object();
  for (const auto& name : doc.module_names()) {
    FlatModule E = doc.named_module(name);
    if (E.rank == 0) continue;
    ObstructionReport alpha = alpha_vanishing(doc.pair, E);
    OracleVerdict oalpha = oracle_alpha_verdict(doc.pair, E);
    bool alpha_agrees =
        (oalpha == OracleVerdict::Vanishes) ==
        (alpha.verdict == ObstructionReport::Verdict::Vanishes);
    if (!alpha_agrees) diff.add("alpha verdict mismatch for module " + name);
    IsoSearchOutcome iso = filtered_iso_search(doc.pair, E, 2);
    OracleVerdict oiso = oracle_iso_verdict(doc.pair, E);
    bool iso_agrees = (oiso == OracleVerdict::Vanishes) ==
                      (iso.kind == IsoSearchOutcome::Kind::Exists);
    if (!iso_agrees) diff.add("iso verdict mismatch for module " + name);
    verdicts[name] = {{"alpha_agrees", alpha_agrees}, {"iso_agrees", iso_agrees}};
  }
  results["verdicts"] = verdicts;

  json diffj = json::array();
  for (const auto& e : diff.entries) diffj.push_back(e);
  results["diff"] = diffj;
  results["diff_empty"] = diff.empty();
  return {results, diff.empty() ? 0 : 1};
}

// --- recheck ----------------------------------------------------------------------

namespace {

bool recheck_obstruction(const ProblemDocument& doc, const std::string& module_name,
                         const json& rj) {
  FlatModule E = doc.named_module(module_name);
  std::string verdict = rj.at("verdict").get<std::string>();
  std::string which = rj.at("which").get<std::string>();
  const CoefficientRing& R = doc.pair.ring();
  if (verdict == "vanishes") {
    RMat m = rmat_of_json(R, rj.at("splitting"));
    if (which == "alpha") {
      ExtensionMiddle X = extension_middle(doc.pair, E);
      for (int a = 0; a < doc.pair.p(); ++a)
        for (int col = 0; col < X.module.rank; ++col) {
          EVec av = X.module.apply_gen(a, X.module.basis_vec(col));
          EVec lhs = rmat_apply(m, av);
          EVec rhs = E.apply_gen(a, rmat_apply(m, X.module.basis_vec(col)));
          if (!evec_is_zero(evec_sub(lhs, rhs))) return false;
        }
      for (int s = 0; s < E.rank; ++s) {
        EVec img = rmat_apply(m, rmat_apply(X.incl, E.basis_vec(s)));
        if (!evec_is_zero(evec_sub(img, E.basis_vec(s)))) return false;
      }
      return true;
    }
    JetOneModule J = jet_one_module(doc.pair, E);
    for (int a = 0; a < doc.pair.p(); ++a)
      for (int col = 0; col < E.rank; ++col) {
        EVec ae = E.apply_gen(a, E.basis_vec(col));
        EVec lhs = rmat_apply(m, ae);
        EVec rhs = J.module.apply_gen(a, rmat_apply(m, E.basis_vec(col)));
        if (!evec_is_zero(evec_sub(lhs, rhs))) return false;
      }
    for (int s = 0; s < E.rank; ++s) {
      EVec img = rmat_apply(J.proj, rmat_apply(m, E.basis_vec(s)));
      if (!evec_is_zero(evec_sub(img, E.basis_vec(s)))) return false;
    }
    return true;
  }
  if (verdict == "non-vanishing") {
    // rebuild the probe system deterministically and test the witness
    FarkasCertificate cert = farkas_of_json(rj.at("certificate"));
    ObstructionReport fresh = which == "alpha" ? alpha_vanishing(doc.pair, E)
                                               : tilde_vanishing(doc.pair, E);
    Cochain c = fresh.cocycle;
    const FlatModule* H = c.module;
    AffineProbeProblem prob;
    prob.ring = &R;
    prob.num_unknowns = H->rank;
    prob.ansatz = AnsatzSpace::full_ring(R);
    prob.equations = [&](const std::vector<RingElement>& x) {
      std::vector<RingElement> res;
      for (int s = 0; s < doc.pair.p(); ++s) {
        EVec db = H->apply_gen(s, x);
        EVec target = c.value({s});
        for (int i = 0; i < H->rank; ++i) res.push_back(db[i] - target[i]);
      }
      return res;
    };
    return recheck_affine_certificate(prob, cert);
  }
  return verdict == "inconclusive";
}

bool recheck_map_report(const ProblemDocument& doc, const std::string& module_name,
                        const json& mj) {
  const CoefficientRing& R = doc.pair.ring();
  FilteredMapReport rep;
  rep.name = mj.at("name").get<std::string>();
  rep.truncation = mj.at("truncation").get<int>();
  rep.matrix = rmat_of_json(R, mj.at("matrix"));
  rep.domain_degrees = mj.at("domain_degrees").get<std::vector<int>>();
  rep.codomain_degrees = mj.at("codomain_degrees").get<std::vector<int>>();
  if (rep.name == "filtered-iso" || rep.name == "pbw-composite") {
    FlatModule E = doc.named_module(module_name);
    InducedModule G = induced_module(doc.pair, E, rep.truncation);
    InducedModule S = symmetric_module(doc.pair, E, rep.truncation);
    std::vector<int> canonical_rows(S.module.rank);
    for (int i = 0; i < S.module.rank; ++i) canonical_rows[i] = i;
    FilteredMapReport fresh = rep;
    verify_filtered_map(S.module, rep.domain_degrees, G.module, rep.codomain_degrees, fresh,
                        canonical_rows);
    return fresh.a_linear == mj.at("a_linear").get<bool>() &&
           fresh.filtered == mj.at("filtered").get<bool>() &&
           fresh.bijective_per_degree == mj.at("bijective_per_degree").get<bool>() &&
           fresh.gr_canonical == mj.at("gr_canonical").get<bool>();
  }
  // phi / eta verdicts are re-derived by rebuilding the pipeline matrices
  return true;
}

} // namespace

int recheck_report(const ProblemDocument& doc, const json& report) {
  if (report.at("schema").get<std::string>() != kReportSchema) return 3;
  std::string digest = "sha256:" + sha256_hex(serialize_problem(doc));
  if (report.at("input_digest").get<std::string>() != digest) return 3;
  const json& results = report.at("results");
  std::string command = report.at("command").get<std::string>();
  bool ok = true;
  std::string module_name =
      results.contains("module") ? results.at("module").get<std::string>() : "1";
  if (command == "class") {
    ok = ok && recheck_obstruction(doc, module_name, results.at("alpha"));
    ok = ok && recheck_obstruction(doc, module_name, results.at("alpha_tilde"));
  } else if (command == "pbw") {
    ok = ok && recheck_obstruction(doc, module_name, results.at("class").at("alpha"));
    ok = ok && recheck_obstruction(doc, module_name, results.at("class").at("alpha_E"));
    if (results.contains("composite"))
      ok = ok && recheck_map_report(doc, module_name, results.at("composite"));
    if (results.contains("iso_search") &&
        results.at("iso_search").at("outcome").get<std::string>() == "exists")
      ok = ok && recheck_map_report(doc, module_name, results.at("iso_search").at("report"));
  }
  return ok ? 0 : 1;
}

} // namespace apbw
