#include "apbw/schema.hpp"

#include "apbw/error.hpp"

#include <json.hpp>

using nlohmann::json;

namespace apbw {

FlatModule ProblemDocument::unit() const { return unit_module(pair); }
FlatModule ProblemDocument::quotient() const { return quotient_module(pair); }

FlatModule ProblemDocument::named_module(const std::string& name) const {
  if (name == "1" || name == "1_A") return unit();
  if (name == "L/A") return quotient();
  auto it = modules.find(name);
  if (it == modules.end()) fail_structural("unknown module name '" + name + "'");
  return it->second;
}

std::vector<std::string> ProblemDocument::module_names() const {
  std::vector<std::string> names{"1", "L/A"};
  for (const auto& [k, v] : modules) names.push_back(k);
  return names;
}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail_structural(std::string("JSON parse error: ") + e.what());
  }
}

std::shared_ptr<CoefficientRing> parse_ring(const json& j) {
  if (!j.is_object() || !j.contains("kind")) fail_structural("ring: missing 'kind'");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "rational") {
    return std::make_shared<CoefficientRing>(CoefficientRing::rationals());
  }
  if (kind == "polynomial") {
    if (!j.contains("variables")) fail_structural("ring: polynomial kind needs 'variables'");
    return std::make_shared<CoefficientRing>(
        CoefficientRing::polynomial(j.at("variables").get<std::vector<std::string>>()));
  }
  if (kind == "finite_dim") {
    if (!j.contains("basis")) fail_structural("ring: finite_dim kind needs 'basis'");
    auto labels = j.at("basis").get<std::vector<std::string>>();
    size_t d = labels.size();
    // the table is given on label pairs; parse coefficients against a
    // provisional copy of the ring so expressions may use the labels
    CoefficientRing proto = CoefficientRing::finite_dim(
        labels, std::vector<std::vector<std::vector<Rat>>>(
                    d, std::vector<std::vector<Rat>>(d, std::vector<Rat>(d, Rat(0)))));
    std::vector<std::vector<std::vector<Rat>>> table(
        d, std::vector<std::vector<Rat>>(d, std::vector<Rat>(d, Rat(0))));
    std::vector<std::vector<bool>> given(d, std::vector<bool>(d, false));
    if (!j.contains("table")) fail_structural("ring: finite_dim kind needs 'table'");
    for (const auto& entry : j.at("table")) {
      int i = entry.at("i").get<int>();
      int jj = entry.at("j").get<int>();
      if (i < 0 || i >= (int)d || jj < 0 || jj >= (int)d)
        fail_structural("ring table index out of range");
      RingElement val = parse_ring_element(proto, entry.at("value").get<std::string>());
      table[i][jj] = val.coords();
      given[i][jj] = true;
    }
    // unit row/column defaults; symmetric completion for omitted entries
    for (size_t i = 0; i < d; ++i) {
      if (!given[0][i]) { table[0][i] = std::vector<Rat>(d, Rat(0)); table[0][i][i] = 1; }
      if (!given[i][0]) { table[i][0] = std::vector<Rat>(d, Rat(0)); table[i][0][i] = 1; }
    }
    for (size_t i = 0; i < d; ++i)
      for (size_t jj = 0; jj < d; ++jj)
        if (!given[i][jj] && given[jj][i]) table[i][jj] = table[jj][i];
    return std::make_shared<CoefficientRing>(CoefficientRing::finite_dim(labels, table));
  }
  fail_structural("ring: unknown kind '" + kind + "'");
}

Derivation parse_derivation(const CoefficientRing& R, const json& j) {
  Derivation der = Derivation::zero(R);
  if (j.is_null()) return der;
  const json* images = nullptr;
  if (j.is_object() && j.contains("images")) images = &j.at("images");
  else if (j.is_array()) images = &j;
  else fail_structural("anchor entry must be an array or {\"images\": [...]}");
  size_t n = der.images.size();
  if (images->size() != n)
    fail_structural("derivation image list has wrong length");
  for (size_t i = 0; i < n; ++i)
    der.images[i] = parse_ring_element(R, (*images)[i].get<std::string>());
  if (!R.is_polynomial() && !der.images[0].is_zero())
    fail_structural("derivation must send the unit basis element to 0");
  return der;
}

std::shared_ptr<Algebroid> parse_algebroid(const CoefficientRing& R, const json& j) {
  if (!j.is_object()) fail_structural("missing 'algebroid' object");
  int rank = j.at("rank").get<int>();
  if (rank < 0) fail_structural("algebroid rank must be nonnegative");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<std::vector<std::vector<RingElement>>> bracket(
      rank, std::vector<std::vector<RingElement>>(
                rank, std::vector<RingElement>(rank, RingElement::zero(R))));
  std::vector<std::vector<std::vector<bool>>> given(
      rank, std::vector<std::vector<bool>>(rank, std::vector<bool>(rank, false)));
  if (j.contains("bracket"))
    for (const auto& rec : j.at("bracket")) {
      int i = rec.at("i").get<int>(), jj = rec.at("j").get<int>(), k = rec.at("k").get<int>();
      if (i < 0 || i >= rank || jj < 0 || jj >= rank || k < 0 || k >= rank)
        fail_structural("bracket record index out of range");
      bracket[i][jj][k] = parse_ring_element(R, rec.at("coeff").get<std::string>());
      given[i][jj][k] = true;
    }
  // fill omitted entries by antisymmetry
  for (int i = 0; i < rank; ++i)
    for (int jj = 0; jj < rank; ++jj)
      for (int k = 0; k < rank; ++k)
        if (!given[i][jj][k] && given[jj][i][k]) bracket[i][jj][k] = -bracket[jj][i][k];
  std::vector<Derivation> anchor;
  if (j.contains("anchor")) {
    const auto& arr = j.at("anchor");
    if ((int)arr.size() != rank) fail_structural("anchor list has wrong length");
    for (const auto& a : arr) anchor.push_back(parse_derivation(R, a));
  } else {
    for (int i = 0; i < rank; ++i) anchor.push_back(Derivation::zero(R));
  }
  return std::make_shared<Algebroid>(&R, rank, std::move(bracket), std::move(anchor),
                                     std::move(labels));
}

} // namespace

ProblemDocument parse_problem(const std::string& json_text) {
  json j = parse_json(json_text);
  if (!j.is_object()) fail_structural("document root must be an object");
  ProblemDocument doc;
  if (!j.contains("ring")) fail_structural("missing 'ring'");
  doc.ring = parse_ring(j.at("ring"));
  if (!j.contains("algebroid")) fail_structural("missing 'algebroid'");
  doc.algebroid = parse_algebroid(*doc.ring, j.at("algebroid"));
  doc.pair.ambient = doc.algebroid.get();
  doc.pair.sub_rank = 0;
  if (j.contains("pair")) {
    doc.pair.sub_rank = j.at("pair").at("sub_rank").get<int>();
    if (doc.pair.sub_rank < 0 || doc.pair.sub_rank > doc.algebroid->rank())
      fail_structural("pair.sub_rank out of range");
  }
  if (j.contains("modules")) {
    for (const auto& [name, mj] : j.at("modules").items()) {
      FlatModule m;
      m.pair = doc.pair;
      m.rank = mj.at("rank").get<int>();
      if (m.rank < 0) fail_structural("module rank must be nonnegative");
      const auto& acts = mj.at("actions");
      if ((int)acts.size() != doc.pair.p())
        fail_structural("module '" + name + "' needs one action matrix per A-generator");
      for (const auto& mat : acts) {
        RMat rm = rmat_zero(*doc.ring, m.rank, m.rank);
        if ((int)mat.size() != m.rank) fail_structural("module action matrix has wrong shape");
        for (int r = 0; r < m.rank; ++r) {
          if ((int)mat[r].size() != m.rank)
            fail_structural("module action matrix has wrong shape");
          for (int c = 0; c < m.rank; ++c)
            rm[r][c] = parse_ring_element(*doc.ring, mat[r][c].get<std::string>());
        }
        m.action.push_back(std::move(rm));
      }
      if (mj.contains("labels"))
        m.labels = mj.at("labels").get<std::vector<std::string>>();
      doc.modules.emplace(name, std::move(m));
    }
  }
  if (j.contains("options")) {
    const auto& o = j.at("options");
    if (o.contains("truncation")) doc.options.truncation = o.at("truncation").get<int>();
    if (o.contains("degree_bound")) doc.options.degree_bound = o.at("degree_bound").get<int>();
    if (o.contains("budget")) doc.options.budget = o.at("budget").get<int>();
  }
  return doc;
}

std::string serialize_problem(const ProblemDocument& doc) {
  json j;
  const CoefficientRing& R = *doc.ring;
  json ring;
  switch (R.kind()) {
    case RingKind::Rational:
      ring["kind"] = "rational";
      break;
    case RingKind::Polynomial:
      ring["kind"] = "polynomial";
      ring["variables"] = R.variables();
      break;
    case RingKind::FiniteDim: {
      ring["kind"] = "finite_dim";
      ring["basis"] = R.basis_labels();
      json table = json::array();
      for (int i = 0; i < R.dim(); ++i)
        for (int jj = 0; jj < R.dim(); ++jj) {
          RingElement prod = RingElement::basis(R, i) * RingElement::basis(R, jj);
          table.push_back({{"i", i}, {"j", jj}, {"value", prod.to_string()}});
        }
      ring["table"] = table;
      break;
    }
  }
  j["ring"] = ring;

  const Algebroid& L = *doc.algebroid;
  json alg;
  alg["rank"] = L.rank();
  alg["labels"] = L.labels();
  json bracket = json::array();
  for (int i = 0; i < L.rank(); ++i)
    for (int jj = 0; jj < L.rank(); ++jj)
      for (int k = 0; k < L.rank(); ++k)
        if (!L.bracket_gen(i, jj)[k].is_zero() && i < jj)
          bracket.push_back(
              {{"i", i}, {"j", jj}, {"k", k}, {"coeff", L.bracket_gen(i, jj)[k].to_string()}});
  alg["bracket"] = bracket;
  json anchors = json::array();
  for (int i = 0; i < L.rank(); ++i) {
    json images = json::array();
    for (const auto& im : L.anchor_gen(i).images) images.push_back(im.to_string());
    anchors.push_back(images);
  }
  alg["anchor"] = anchors;
  j["algebroid"] = alg;

  j["pair"] = {{"sub_rank", doc.pair.sub_rank}};

  json mods = json::object();
  for (const auto& [name, m] : doc.modules) {
    json mj;
    mj["rank"] = m.rank;
    json acts = json::array();
    for (const auto& mat : m.action) {
      json rows = json::array();
      for (const auto& row : mat) {
        json r = json::array();
        for (const auto& e : row) r.push_back(e.to_string());
        rows.push_back(r);
      }
      acts.push_back(rows);
    }
    mj["actions"] = acts;
    if (!m.labels.empty()) mj["labels"] = m.labels;
    mods[name] = mj;
  }
  j["modules"] = mods;

  json opts;
  opts["truncation"] = doc.options.truncation;
  if (doc.options.degree_bound) opts["degree_bound"] = *doc.options.degree_bound;
  opts["budget"] = doc.options.budget;
  j["options"] = opts;

  return j.dump(2) + "\n";
}

} // namespace apbw
