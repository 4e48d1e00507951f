#include "apbw/oracle.hpp"

#include "apbw/error.hpp"
#include "apbw/pbwiso.hpp"

namespace apbw {

namespace {

struct OracleSpace {
  int n = 0, d = 0, es = 1, M = 0;
  std::vector<long long> count_by_len;
  std::vector<long long> offset_by_len;
  long long total = 0;

  OracleSpace(int n_, int d_, int es_, int M_) : n(n_), d(d_), es(es_), M(M_) {
    count_by_len.resize(M + 1);
    offset_by_len.resize(M + 1);
    long long c = 1;
    for (int k = 0; k <= M; ++k) {
      count_by_len[k] = c;
      c *= n;
    }
    long long off = 0;
    for (int k = M; k >= 0; --k) {
      offset_by_len[k] = off;
      off += count_by_len[k] * d * es;
    }
    total = off;
  }
  long long word_rank(const Word& w) const {
    long long r = 0;
    for (int letter : w) r = r * n + letter;
    return r;
  }
  int col(const Word& w, int c, int s) const {
    return (int)(offset_by_len[w.size()] + (ws_rank(w) * d + c) * es + s);
  }
  long long ws_rank(const Word& w) const { return word_rank(w); }
  int degree_of_col(long long cc) const {
    for (int k = M; k >= 0; --k)
      if (cc < offset_by_len[k] + count_by_len[k] * d * es) return k;
    fail_internal("oracle column out of range");
  }
};

std::vector<Word> words_of_len(int n, int len) {
  std::vector<Word> out;
  if (len == 0) return {{}};
  Word w(len, 0);
  while (true) {
    out.push_back(w);
    int pos = len - 1;
    while (pos >= 0 && w[pos] == n - 1) w[pos--] = 0;
    if (pos < 0) break;
    w[pos]++;
  }
  return out;
}

void add_free_element(const OracleSpace& os, const FreeElement& x, int s,
                      SparseEliminator::Row& row, const Rat& scale) {
  for (const auto& [w, c] : x.terms())
    for (int i = 0; i < os.d; ++i)
      if (c.coords()[i] != 0) {
        int cc = os.col(w, i, s);
        row[cc] += scale * c.coords()[i];
        if (row[cc] == 0) row.erase(cc);
      }
}

// two-sided straightening relations of U(L) inside the free word algebra
void straightening_rows(const Algebroid& L, const OracleSpace& os, SparseEliminator& rel) {
  const CoefficientRing& R = L.ring();
  int n = L.rank(), d = R.dim(), M = os.M;
  for (int ulen = 0; ulen + 2 <= M; ++ulen)
    for (const Word& u : words_of_len(n, ulen))
      for (int vlen = 0; ulen + vlen + 2 <= M; ++vlen)
        for (const Word& v : words_of_len(n, vlen))
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
              for (int bp = 0; bp < d; ++bp) {
                FreeElement head(&L);
                head.add_term(u, RingElement::one(R));
                RingElement bpe = RingElement::basis(R, bp);
                FreeElement x = head.times_letter(i).times_letter(j).times_ring(bpe) -
                                head.times_letter(j).times_letter(i).times_ring(bpe);
                const auto& br = L.bracket_gen(i, j);
                for (int k = 0; k < n; ++k)
                  if (!br[k].is_zero()) x = x - head.times_ring(br[k]).times_letter(k).times_ring(bpe);
                for (int letter : v) x = x.times_letter(letter);
                for (int b = 0; b < d; ++b) {
                  FreeElement scaled = x.scaled_left(RingElement::basis(R, b));
                  for (int s = 0; s < os.es; ++s) {
                    SparseEliminator::Row r2;
                    add_free_element(os, scaled, s, r2, Rat(1));
                    if (!r2.empty()) rel.add(std::move(r2));
                  }
                }
              }
}

} // namespace

std::vector<int> oracle_envelope_ranks(const Algebroid& L, int N, int buffer) {
  const CoefficientRing& R = L.ring();
  if (R.is_polynomial()) fail_contract("oracle requires a finite-dimensional ring");
  int M = N + buffer;
  OracleSpace os(L.rank(), R.dim(), 1, M);
  SparseEliminator rel;
  straightening_rows(L, os, rel);
  std::vector<long long> killed(N + 1, 0);
  for (const auto& row : rel.rows()) {
    int deg = os.degree_of_col(row.begin()->first);
    if (deg <= N) killed[deg]++;
  }
  std::vector<int> ranks;
  for (int k = 0; k <= N; ++k) {
    long long qdim = os.count_by_len[k] * R.dim() - killed[k];
    if (qdim % R.dim() != 0) fail_internal("graded piece is not free over R");
    ranks.push_back((int)(qdim / R.dim()));
  }
  return ranks;
}

OracleInduced oracle_induced_module(const AdaptedPair& pair, const FlatModule& E, int N,
                                    int buffer) {
  const CoefficientRing& R = pair.ring();
  if (R.is_polynomial()) fail_contract("oracle requires a finite-dimensional ring");
  PbwOrderedPair order = pbw_order(pair);
  const Algebroid& L = *order.algebroid;
  int n = pair.rank(), q = order.q, d = R.dim(), mE = E.rank, M = N + buffer;
  OracleSpace os(n, d, mE, M);

  SparseEliminator rel;
  straightening_rows(L, os, rel);
  // balancing over U(A): (w a) (x) e_s = w (x) (a e_s)
  for (int len = 0; len + 1 <= M; ++len)
    for (const Word& w : words_of_len(n, len))
      for (int a = q; a < n; ++a)
        for (int b = 0; b < d; ++b)
          for (int s = 0; s < mE; ++s) {
            SparseEliminator::Row row;
            Word wa = w;
            wa.push_back(a);
            row[os.col(wa, b, s)] += Rat(1);
            // subtract b * (w (x) nabla_a e_s); coefficients sit left of the word
            EVec ae = E.apply_gen(a - q, E.basis_vec(s));
            RingElement bel = RingElement::basis(R, b);
            for (int s2 = 0; s2 < mE; ++s2) {
              RingElement coef = bel * ae[s2];
              for (int c2 = 0; c2 < d; ++c2)
                if (coef.coords()[c2] != 0) {
                  int cc = os.col(w, c2, s2);
                  row[cc] -= coef.coords()[c2];
                  if (row[cc] == 0) row.erase(cc);
                }
            }
            if (!row.empty()) rel.add(std::move(row));
          }

  // greedy R-basis over nondecreasing coset words (x) E basis, with tracking
  OracleInduced out;
  out.e_rank = mE;
  SparseEliminator tracked = rel;
  long long track_base = os.total;
  std::vector<std::pair<int, int>> accepted; // (word position, s)
  std::vector<Word> accepted_words;
  std::vector<Word> candidates = nondecreasing_words(q, N);
  for (const auto& w : candidates) {
    int fresh = 0, total_slots = d * mE;
    std::vector<SparseEliminator::Row> rows;
    for (int s = 0; s < mE; ++s)
      for (int c = 0; c < d; ++c) {
        SparseEliminator::Row row;
        row[os.col(w, c, s)] = Rat(1);
        SparseEliminator::Row rem = tracked.reduce(row);
        bool word_part = false;
        for (const auto& [cc, vv] : rem)
          if (cc < track_base) { word_part = true; break; }
        if (word_part) ++fresh;
        rows.push_back(std::move(row));
      }
    if (fresh == 0) continue;
    if (fresh != total_slots)
      fail_structural("oracle quotient is not free over R at this truncation");
    int base = (int)accepted_words.size();
    int slot = 0;
    for (int s = 0; s < mE; ++s)
      for (int c = 0; c < d; ++c) {
        rows[slot][(int)(track_base + ((long long)base * mE + s) * d + c)] = Rat(1);
        if (!tracked.add(std::move(rows[slot]))) fail_internal("tracked oracle row vanished");
        ++slot;
      }
    accepted_words.push_back(w);
  }
  out.words = accepted_words;
  out.degree_ranks.assign(N + 1, 0);
  for (const auto& w : accepted_words) out.degree_ranks[(int)w.size()]++;

  std::map<Word, int> index;
  for (int i = 0; i < (int)accepted_words.size(); ++i) index[accepted_words[i]] = i;
  int rank = (int)accepted_words.size() * mE;
  out.action.assign(pair.p(), rmat_zero(R, rank, rank));
  for (int a = 0; a < pair.p(); ++a)
    for (int w = 0; w < (int)accepted_words.size(); ++w)
      for (int s = 0; s < mE; ++s) {
        Word aw{q + a};
        aw.insert(aw.end(), accepted_words[w].begin(), accepted_words[w].end());
        SparseEliminator::Row row;
        row[os.col(aw, 0, s)] = Rat(1);
        SparseEliminator::Row rem = tracked.reduce(row);
        for (const auto& [cc, vv] : rem) {
          if (cc < track_base) fail_internal("oracle action did not reduce into the basis");
          long long t = cc - track_base;
          int comp = (int)(t % d);
          long long ws = t / d;
          int s2 = (int)(ws % mE);
          int acc = (int)(ws / mE);
          out.action[a][out.idx(acc, s2)][out.idx(w, s)] =
              out.action[a][out.idx(acc, s2)][out.idx(w, s)] +
              RingElement::basis(R, comp).scaled(-vv);
        }
      }
  return out;
}

namespace {

FlatModule oracle_as_module(const AdaptedPair& pair, const OracleInduced& ind) {
  FlatModule m;
  m.pair = pair;
  m.rank = (int)ind.words.size() * ind.e_rank;
  m.action = ind.action;
  return m;
}

std::vector<int> oracle_degrees(const OracleInduced& ind) {
  std::vector<int> deg;
  for (const auto& w : ind.words)
    for (int s = 0; s < ind.e_rank; ++s) deg.push_back((int)w.size());
  return deg;
}

} // namespace

OracleVerdict oracle_alpha_verdict(const AdaptedPair& pair, const FlatModule& E) {
  OracleInduced ind = oracle_induced_module(pair, E, 1);
  FlatModule m = oracle_as_module(pair, ind);
  SplitOutcome s = filtration_step_splitting(m, oracle_degrees(ind), -1, 0, 1);
  if (s.splits) return OracleVerdict::Vanishes;
  if (!s.exhaustive) fail_internal("oracle splitting solve was not exhaustive");
  return OracleVerdict::NonVanishing;
}

OracleVerdict oracle_iso_verdict(const AdaptedPair& pair, const FlatModule& E) {
  OracleInduced ind = oracle_induced_module(pair, E, 2);
  FlatModule m = oracle_as_module(pair, ind);
  std::vector<int> deg = oracle_degrees(ind);
  SplitOutcome s1 = filtration_step_splitting(m, deg, -1, 0, 1);
  if (!s1.splits) return OracleVerdict::NonVanishing;
  SplitOutcome s2 = filtration_step_splitting(m, deg, 0, 1, 2);
  if (!s2.splits) return OracleVerdict::NonVanishing;
  return OracleVerdict::Vanishes;
}

} // namespace apbw
