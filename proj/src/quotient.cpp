#include "kahler/quotient.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "kahler/commutation.hpp"
#include "kahler/error.hpp"

namespace kahler {

namespace {

using Row = std::map<int, RatFunc>;

RatFunc to_ratfunc(const Poly& p) { return RatFunc(UPoly::from_poly(p), UPoly(Rational(1))); }

Poly to_poly(const RatFunc& r) {
  if (!r.is_polynomial()) throw Error("normal form coefficient is not polynomial in m: " + r.str());
  return r.num().to_poly() * Poly(1 / r.den().lead());
}

void axpy(Row& row, const RatFunc& f, const Row& other) {
  for (const auto& [col, v] : other) {
    auto it = row.find(col);
    if (it == row.end()) {
      row.emplace(col, -(f * v));
    } else {
      it->second = it->second - f * v;
      if (it->second.is_zero()) row.erase(it);
    }
  }
}

struct Pivot {
  Row row;
  Row combo;
};

// Row echelon form with pivots at the smallest column index.
class Echelon {
 public:
  void insert(Row row, Row combo) {
    while (!row.empty()) {
      auto lead = row.begin();
      auto p = pivots_.find(lead->first);
      if (p == pivots_.end()) {
        RatFunc inv = RatFunc(Rational(1)) / lead->second;
        for (auto& [c, v] : row) v = v * inv;
        for (auto& [c, v] : combo) v = v * inv;
        pivots_.emplace(lead->first, Pivot{std::move(row), std::move(combo)});
        return;
      }
      RatFunc f = lead->second;
      axpy(row, f, p->second.row);
      axpy(combo, f, p->second.combo);
    }
  }

  // Eliminates every pivot column from row; combo collects the pivot
  // combination that was subtracted.
  void reduce(Row& row, Row& combo) const {
    int cur = row.empty() ? 0 : row.begin()->first;
    while (true) {
      auto it = row.lower_bound(cur);
      while (it != row.end() && !pivots_.count(it->first)) ++it;
      if (it == row.end()) return;
      cur = it->first;
      RatFunc f = it->second;
      const Pivot& p = pivots_.at(cur);
      axpy(row, f, p.row);
      for (const auto& [g, v] : p.combo) {
        auto ci = combo.find(g);
        if (ci == combo.end()) combo.emplace(g, f * v);
        else {
          ci->second = ci->second + f * v;
          if (ci->second.is_zero()) combo.erase(ci);
        }
      }
    }
  }

  std::size_t rank() const { return pivots_.size(); }

 private:
  std::map<int, Pivot> pivots_;
};

using ColumnId = std::pair<std::string, int>;  // monomial key, power of c

struct Score {
  int derivs, imbalance, cross, tokens, intra;
};

Score score(const Monomial& m) {
  Score s{m.derivative_count(), 0, 0, 0, 0};
  int lo = kMaxJetOrder + 1, hi = -1;
  std::vector<int> owner(m.endpoints(), -1), is_deriv(m.endpoints(), 0), is_base(m.endpoints(), 0);
  for (int f = 0; f < static_cast<int>(m.factors.size()); ++f) {
    const auto& t = m.factors[f];
    if (!t.is_jet()) continue;
    lo = std::min<int>(lo, t.order);
    hi = std::max<int>(hi, t.order);
    const int off = m.offset(f);
    for (int i = 0; i < t.slots(); ++i) {
      owner[off + i] = f;
      (i < t.order ? is_deriv : is_base)[off + i] = 1;
    }
  }
  s.imbalance = hi < 0 ? 0 : hi - lo;
  for (int a = 0; a < m.endpoints(); ++a) {
    s.tokens += m.token[a];
    int b = m.partner[a];
    if (b < a) continue;
    if ((is_deriv[a] && is_base[b]) || (is_base[a] && is_deriv[b])) ++s.cross;
    if (is_deriv[a] && is_deriv[b] && owner[a] == owner[b]) ++s.intra;
  }
  return s;
}

// Worst columns first: they are eliminated in favour of the later ones.
bool worse(const std::pair<Score, ColumnId>& a, const std::pair<Score, ColumnId>& b) {
  auto ka = std::make_tuple(-a.first.derivs, -a.first.imbalance, -a.first.cross, -a.first.tokens, a.first.intra);
  auto kb = std::make_tuple(-b.first.derivs, -b.first.imbalance, -b.first.cross, -b.first.tokens, b.first.intra);
  if (ka != kb) return ka < kb;
  return a.second < b.second;
}

// Splits each coefficient by powers of c.
std::vector<std::pair<ColumnId, RatFunc>> columns_of(const TensorExpr& e, bool c_symbolic) {
  std::vector<std::pair<ColumnId, RatFunc>> out;
  for (const auto& [key, t] : e.terms()) {
    if (t.coeff.depends_on(Var::p) || t.coeff.depends_on(Var::u))
      throw Error("divergence quotient supports coefficients in m and c only");
    if (!c_symbolic) {
      out.push_back({{key, 0}, to_ratfunc(t.coeff)});
      continue;
    }
    for (int k = 0; k <= t.coeff.degree(Var::c); ++k) {
      Poly part = t.coeff.coeff(Var::c, k);
      if (!part.is_zero()) out.push_back({{key, k}, to_ratfunc(part)});
    }
  }
  return out;
}

// Vector fields V with D_a V^a containing m, one per freed derivative slot.
std::vector<TensorExpr> vector_fields(const Monomial& m, bool jinv) {
  std::vector<TensorExpr> out;
  std::set<std::string> seen;
  for (int f = 0; f < static_cast<int>(m.factors.size()); ++f) {
    const FactorType& t = m.factors[f];
    if (!t.is_jet() || t.order == 0) continue;
    const int off = m.offset(f);
    for (int d = 0; d < (t.sym ? t.order : 1); ++d) {
      const int s = off + d;
      Monomial v;
      v.rank = m.rank + 1;
      v.factors = m.factors;
      v.factors[f] = t.kind == Kind::H ? FactorType::h(t.order - 1, t.sym) : FactorType::omega(t.order - 1, t.sym);
      const int E = m.endpoints();
      auto remap = [&](int e) { return e == s ? 0 : 1 + e - (e > s ? 1 : 0); };
      v.partner.assign(E, 0);
      v.token.assign(E, 0);
      for (int e = 0; e < E; ++e) {
        v.partner[remap(e)] = remap(m.partner[e]);
        v.token[remap(e)] = m.token[e];
      }
      if (m.rank != 0) throw RankError("vector fields are built from scalar monomials");
      TensorExpr V(1, jinv);
      V.add_monomial(v, Poly(1L));
      if (V.is_zero()) continue;
      if (seen.insert(V.terms().begin()->first).second) out.push_back(std::move(V));
    }
  }
  return out;
}

}  // namespace

TensorExpr divergence_of(const TensorExpr& v, const SpaceFormModel& model, const ConstraintSet& cs) {
  if (v.rank() != 1) throw RankError("divergence needs a rank-1 field");
  LabelGen gen;
  const int a = -1;
  RawExpr raw = v.to_raw({a}, gen);
  RawExpr div;
  for (const auto& t : raw.terms)
    for (auto& d : derivative(t, a)) div.terms.push_back(std::move(d));
  return simplify(TensorExpr::from_raw(div, v.h_j_invariant()), model, cs);
}

TensorExpr DivergenceResult::witness_field(std::optional<int> m) const {
  TensorExpr out(1, normal_form.h_j_invariant());
  for (const auto& w : witness) {
    Poly k = m ? Poly(w.coeff.eval(*m)) : to_poly(w.coeff);
    out += (k * w.field).specialize(m ? VarValues().set(Var::m, *m) : VarValues());
  }
  return out;
}

DivergenceResult reduce_mod_divergence(const TensorExpr& e0, const SpaceFormModel& model, const ConstraintSet& cs,
                                       const QuotientOptions& opts) {
  if (e0.rank() != 0) throw RankError("divergence reduction needs a scalar integrand");
  const TensorExpr e = simplify(e0, model, cs);
  const bool c_symbolic = !model.c().has_value();
  const Poly c = Poly::var(Var::c);

  std::map<ColumnId, Monomial> monos;
  std::deque<ColumnId> queue;
  auto note = [&](const TensorExpr& x, int shift) {
    for (const auto& [id, v] : columns_of(x, c_symbolic)) {
      ColumnId cid{id.first, id.second + shift};
      if (monos.count(cid)) continue;
      monos.emplace(cid, x.terms().at(id.first).mono);
      queue.push_back(cid);
      if (monos.size() > opts.basis_cap)
        throw OverflowError("divergence basis exceeds the cap of " + std::to_string(opts.basis_cap) + " monomials");
    }
  };
  note(e, 0);

  struct Generator {
    TensorExpr field;
    std::vector<std::pair<ColumnId, RatFunc>> entries;
  };
  std::vector<Generator> gens;
  std::set<std::pair<std::string, int>> done;
  while (!queue.empty()) {
    ColumnId cid = queue.front();
    queue.pop_front();
    for (auto& V : vector_fields(monos.at(cid), e.h_j_invariant() || cs.j_invariant)) {
      if (!done.insert({V.terms().begin()->first, cid.second}).second) continue;
      TensorExpr div = divergence_of(V, model, cs);
      Poly mult = c_symbolic ? c.pow(cid.second) : Poly(1L);
      Generator g{mult * V, columns_of(mult * div, c_symbolic)};
      note(mult * div, 0);
      if (!g.entries.empty()) gens.push_back(std::move(g));
    }
  }

  std::vector<std::pair<Score, ColumnId>> order;
  for (const auto& [cid, mono] : monos) order.push_back({score(mono), cid});
  std::sort(order.begin(), order.end(), worse);
  std::map<ColumnId, int> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i].second] = static_cast<int>(i);

  Echelon ech;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    Row row;
    for (const auto& [cid, v] : gens[g].entries) row[index.at(cid)] = v;
    ech.insert(std::move(row), Row{{static_cast<int>(g), RatFunc(Rational(1))}});
  }
  Row target, combo;
  for (const auto& [cid, v] : columns_of(e, c_symbolic)) target[index.at(cid)] = v;
  ech.reduce(target, combo);

  DivergenceResult res;
  res.normal_form = TensorExpr(0, e.h_j_invariant());
  for (const auto& [col, v] : target) {
    const ColumnId& cid = order[col].second;
    Poly k = to_poly(v);
    if (c_symbolic) k *= c.pow(cid.second);
    res.normal_form.add_canonical(monos.at(cid), k);
  }
  for (const auto& [g, v] : combo) res.witness.push_back({gens[g].field, v});
  res.basis_size = monos.size();
  res.generators = gens.size();
  return res;
}

TensorExpr reduce_mod_relations(const TensorExpr& e, const std::vector<TensorExpr>& relations) {
  std::map<ColumnId, Monomial> monos;
  auto note = [&](const TensorExpr& x) {
    if (x.rank() != e.rank()) throw RankError("relation rank differs from the expression rank");
    for (const auto& [key, t] : x.terms()) monos.emplace(ColumnId{key, 0}, t.mono);
  };
  note(e);
  for (const auto& r : relations) note(r);
  std::vector<std::pair<Score, ColumnId>> order;
  for (const auto& [cid, mono] : monos) order.push_back({score(mono), cid});
  std::sort(order.begin(), order.end(), worse);
  std::map<ColumnId, int> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i].second] = static_cast<int>(i);

  // Coefficients may carry c; treat them as Q(m)-linear combinations per c power.
  auto rows_of = [&](const TensorExpr& x) {
    std::map<int, Row> by_power;
    for (const auto& [key, t] : x.terms()) {
      for (int k = 0; k <= t.coeff.degree(Var::c); ++k) {
        Poly part = t.coeff.coeff(Var::c, k);
        if (!part.is_zero()) by_power[k][index.at({key, 0})] = to_ratfunc(part);
      }
    }
    return by_power;
  };
  Echelon ech;
  for (const auto& r : relations) {
    auto rows = rows_of(r);
    if (rows.size() > 1 || (rows.size() == 1 && rows.begin()->first != 0))
      throw Error("relations must have coefficients free of c");
    for (auto& [k, row] : rows) ech.insert(std::move(row), {});
  }
  TensorExpr out(e.rank(), e.h_j_invariant());
  for (auto& [k, row] : rows_of(e)) {
    Row combo;
    ech.reduce(row, combo);
    for (const auto& [col, v] : row) out.add_canonical(monos.at(order[col].second), to_poly(v) * Poly::var(Var::c).pow(k));
  }
  return out;
}

EqualityVerdict expr_equal(const TensorExpr& a, const TensorExpr& b, const SpaceFormModel& model,
                           const ConstraintSet& cs, bool mod_div, const QuotientOptions& opts) {
  if (a.rank() != b.rank()) throw RankError("expr_equal needs equal ranks");
  if (mod_div && a.rank() != 0) throw RankError("equality modulo divergence needs scalar integrands");
  EqualityVerdict v;
  TensorExpr diff = simplify(a - b, model, cs);
  if (mod_div && !diff.is_zero()) {
    v.divergence = reduce_mod_divergence(diff, model, cs, opts);
    diff = v.divergence->normal_form;
  }
  v.equal = diff.is_zero();
  v.witness = diff;
  return v;
}

}  // namespace kahler
