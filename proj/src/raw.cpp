#include "kahler/raw.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kahler/error.hpp"

namespace kahler {

RawFactor RawFactor::jet(const FactorType& t, std::vector<int> labels) {
  if (static_cast<int>(labels.size()) != t.slots()) throw RankError("jet label count mismatch");
  RawKind k = t.kind == Kind::Curv ? RawKind::Curv : t.kind == Kind::H ? RawKind::H : RawKind::Omega;
  return {k, t.order, t.sym, std::move(labels)};
}

FactorType RawFactor::type() const {
  switch (kind) {
    case RawKind::Curv: return FactorType::curvature();
    case RawKind::H: return FactorType::h(order, sym);
    case RawKind::Omega: return FactorType::omega(order, sym);
    default: throw Error("connector has no factor type");
  }
}

namespace {

// Position of a label occurrence: an endpoint of the monomial, or a slot of
// a connector factor.
struct Site {
  bool connector = false;
  int index = 0;  // endpoint, or connector number
  int slot = 0;   // connector slot
};

}  // namespace

std::optional<GraphTerm> to_graph(const RawTerm& t, const std::vector<int>& free) {
  Monomial m;
  m.rank = static_cast<int>(free.size());
  std::vector<const RawFactor*> conns;
  std::map<int, std::vector<Site>> occ;
  for (int i = 0; i < m.rank; ++i) occ[free[i]].push_back({false, i, 0});
  int endpoint = m.rank;
  for (const auto& f : t.factors) {
    if (f.is_connector()) continue;
    FactorType ft = f.type();
    if (static_cast<int>(f.labels.size()) != ft.slots()) throw RankError("factor arity mismatch");
    m.factors.push_back(ft);
    for (int l : f.labels) occ[l].push_back({false, endpoint++, 0});
  }
  for (const auto& f : t.factors) {
    if (!f.is_connector()) continue;
    int ci = static_cast<int>(conns.size());
    conns.push_back(&f);
    occ[f.labels[0]].push_back({true, ci, 0});
    occ[f.labels[1]].push_back({true, ci, 1});
  }
  for (const auto& [l, v] : occ) {
    if (v.size() != 2)
      throw RankError("index label " + std::to_string(l) + " occurs " + std::to_string(v.size()) + " times");
  }
  const int E = endpoint;
  m.partner.assign(E, -1);
  m.token.assign(E, 0);
  std::vector<char> conn_used(conns.size(), 0);
  Poly coeff = t.coeff;
  int sign = 1;

  auto other = [&](int label, const Site& here) -> Site {
    const auto& v = occ.at(label);
    bool first_is_here = v[0].connector == here.connector && v[0].index == here.index && v[0].slot == here.slot;
    return first_is_here ? v[1] : v[0];
  };
  auto label_at = [&](const Site& s, const std::vector<int>& ep_label) {
    return s.connector ? conns[s.index]->labels[s.slot] : ep_label[s.index];
  };

  std::vector<int> ep_label(E);
  for (int i = 0; i < m.rank; ++i) ep_label[i] = free[i];
  {
    int e = m.rank;
    for (const auto& f : t.factors)
      if (!f.is_connector())
        for (int l : f.labels) ep_label[e++] = l;
  }

  for (int a = 0; a < E; ++a) {
    if (m.partner[a] >= 0) continue;
    Site cur{false, a, 0};
    int jcount = 0;
    while (true) {
      Site nxt = other(label_at(cur, ep_label), cur);
      if (!nxt.connector) {
        int b = nxt.index;
        if (b == a) throw Error("degenerate self-contraction");
        m.partner[a] = b;
        m.partner[b] = a;
        if (jcount % 2) m.token[b] = 1;
        if ((jcount / 2) % 2) sign = -sign;
        break;
      }
      const RawFactor& c = *conns[nxt.index];
      conn_used[nxt.index] = 1;
      if (c.kind == RawKind::Complex) {
        ++jcount;
        if (nxt.slot == 1) sign = -sign;  // traversed against its orientation
      }
      cur = Site{true, nxt.index, 1 - nxt.slot};
    }
  }

  // Remaining connectors form closed loops.
  for (std::size_t ci = 0; ci < conns.size(); ++ci) {
    if (conn_used[ci]) continue;
    int jcount = 0;
    Site start{true, static_cast<int>(ci), 0};
    Site cur = start;
    while (true) {
      const RawFactor& c = *conns[cur.index];
      conn_used[cur.index] = 1;
      if (c.kind == RawKind::Complex) {
        ++jcount;
        if (cur.slot == 1) sign = -sign;
      }
      Site exit{true, cur.index, 1 - cur.slot};
      Site nxt = other(label_at(exit, ep_label), exit);
      if (!nxt.connector) throw Error("broken connector loop");
      if (nxt.index == start.index && nxt.slot == start.slot) break;
      cur = nxt;
    }
    if (jcount % 2) return std::nullopt;
    if ((jcount / 2) % 2) sign = -sign;
    coeff *= Poly(2L) * Poly::var(Var::m);
  }
  if (sign < 0) coeff = -coeff;
  if (coeff.is_zero()) return std::nullopt;
  return GraphTerm{std::move(m), std::move(coeff)};
}

RawTerm from_graph(const Monomial& m, const std::vector<int>& free, LabelGen& gen) {
  if (static_cast<int>(free.size()) != m.rank) throw RankError("free label count mismatch");
  RawTerm t;
  const int E = m.endpoints();
  std::vector<int> lab(E, 0);
  std::vector<RawFactor> extra;
  for (int a = 0; a < E; ++a) {
    int b = m.partner[a];
    if (b < a) continue;
    int mid;
    if (a < m.rank && !m.token[a]) mid = free[a];
    else if (b < m.rank && !m.token[b]) mid = free[b];
    else mid = gen();
    for (int x : {a, b}) {
      if (x < m.rank) {
        if (mid == free[x]) continue;
        extra.push_back(m.token[x] ? RawFactor::J(mid, free[x]) : RawFactor::g(mid, free[x]));
      } else if (m.token[x]) {
        int l = gen();
        extra.push_back(RawFactor::J(mid, l));
        lab[x] = l;
      } else {
        lab[x] = mid;
      }
    }
  }
  int e = m.rank;
  for (const auto& f : m.factors) {
    std::vector<int> ls(lab.begin() + e, lab.begin() + e + f.slots());
    t.factors.push_back(RawFactor::jet(f, std::move(ls)));
    e += f.slots();
  }
  for (auto& x : extra) t.factors.push_back(std::move(x));
  return t;
}

void relabel(RawTerm& t, int from, int to) {
  for (auto& f : t.factors)
    for (auto& l : f.labels)
      if (l == from) l = to;
}

void freshen(RawTerm& t, const std::vector<int>& keep, LabelGen& gen) {
  std::map<int, int> ren;
  for (auto& f : t.factors) {
    for (auto& l : f.labels) {
      if (std::find(keep.begin(), keep.end(), l) != keep.end()) continue;
      auto it = ren.find(l);
      if (it == ren.end()) it = ren.emplace(l, gen()).first;
      l = it->second;
    }
  }
}

RawTerm product(const RawTerm& a, const RawTerm& b) {
  RawTerm t;
  t.coeff = a.coeff * b.coeff;
  t.factors = a.factors;
  t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
  return t;
}

}  // namespace kahler
