#include "kahler/monomial.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <sstream>

#include "kahler/error.hpp"

namespace kahler {

FactorType FactorType::h(int order, bool sym) {
  if (order < 0 || order > kMaxJetOrder)
    throw OverflowError("jet order " + std::to_string(order) + " exceeds the configured maximum");
  return {Kind::H, static_cast<std::uint8_t>(order), order <= 1 ? true : sym};
}

FactorType FactorType::omega(int order, bool sym) {
  if (order < 0 || order > kMaxJetOrder)
    throw OverflowError("jet order " + std::to_string(order) + " exceeds the configured maximum");
  return {Kind::Omega, static_cast<std::uint8_t>(order), order <= 1 ? true : sym};
}

int FactorType::base() const {
  switch (kind) {
    case Kind::Curv: return 4;
    case Kind::H: return 2;
    case Kind::Omega: return 1;
  }
  return 0;
}

std::string FactorType::name() const {
  if (kind == Kind::Curv) return "R";
  std::string stem = kind == Kind::H ? "h" : "w";
  if (order == 0) return stem;
  std::string pre = sym && order >= 2 ? "S" : "D";
  return pre + (order > 1 ? std::to_string(order) : "") + stem;
}

namespace {

SlotPerm compose(const SlotPerm& g, const SlotPerm& h) {
  SlotPerm out;
  out.perm.resize(g.perm.size());
  for (std::size_t t = 0; t < g.perm.size(); ++t) out.perm[t] = g.perm[h.perm[t]];
  out.sign = g.sign * h.sign;
  return out;
}

SlotPerm transposition(int n, int a, int b, int sign) {
  SlotPerm p;
  p.perm.resize(n);
  std::iota(p.perm.begin(), p.perm.end(), 0);
  std::swap(p.perm[a], p.perm[b]);
  p.sign = sign;
  return p;
}

std::vector<SlotPerm> close_group(int n, const std::vector<SlotPerm>& gens) {
  SlotPerm id;
  id.perm.resize(n);
  std::iota(id.perm.begin(), id.perm.end(), 0);
  std::map<std::vector<std::uint8_t>, int> seen{{id.perm, 1}};
  std::vector<SlotPerm> out{id};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& g : gens) {
      SlotPerm x = compose(out[i], g);
      auto it = seen.find(x.perm);
      if (it == seen.end()) {
        seen.emplace(x.perm, x.sign);
        out.push_back(x);
      } else if (it->second != x.sign) {
        throw Error("inconsistent slot symmetry group");
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SlotPerm& a, const SlotPerm& b) { return a.perm < b.perm; });
  return out;
}

std::vector<SlotPerm> build_group(const FactorType& t) {
  const int n = t.slots();
  std::vector<SlotPerm> gens;
  if (t.kind == Kind::Curv) {
    gens.push_back(transposition(4, 0, 1, -1));
    gens.push_back(transposition(4, 2, 3, -1));
    gens.push_back({{2, 3, 0, 1}, 1});
    return close_group(4, gens);
  }
  if (t.sym) {
    for (int i = 0; i + 1 < t.order; ++i) gens.push_back(transposition(n, i, i + 1, 1));
  }
  if (t.kind == Kind::H) gens.push_back(transposition(n, t.order, t.order + 1, 1));
  return close_group(n, gens);
}

struct GroupTable {
  std::map<int, std::vector<SlotPerm>> groups;
  GroupTable() {
    groups[FactorType::curvature().code()] = build_group(FactorType::curvature());
    for (int k = 0; k <= kMaxJetOrder; ++k) {
      for (bool s : {false, true}) {
        FactorType h = FactorType::h(k, s), w = FactorType::omega(k, s);
        groups[h.code()] = build_group(h);
        groups[w.code()] = build_group(w);
      }
    }
  }
};

}  // namespace

const std::vector<SlotPerm>& symmetry_group(const FactorType& t) {
  static const GroupTable table;
  return table.groups.at(t.code());
}

std::vector<std::pair<int, int>> j_links(const FactorType& t, bool h_j_invariant) {
  if (t.kind == Kind::Curv) return {{0, 1}, {2, 3}};
  if (t.kind == Kind::H && h_j_invariant) return {{t.order, t.order + 1}};
  return {};
}

int Monomial::offset(int f) const {
  int o = rank;
  for (int i = 0; i < f; ++i) o += factors[i].slots();
  return o;
}

int Monomial::factor_of(int endpoint) const {
  if (endpoint < rank) return -1;
  int o = rank;
  for (int f = 0; f < static_cast<int>(factors.size()); ++f) {
    o += factors[f].slots();
    if (endpoint < o) return f;
  }
  throw Error("endpoint out of range");
}

int Monomial::derivative_count() const {
  int d = 0;
  for (const auto& f : factors) d += f.order;
  return d;
}

int Monomial::h_degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.kind == Kind::H;
  return d;
}

int Monomial::max_order() const {
  int d = 0;
  for (const auto& f : factors) d = std::max<int>(d, f.order);
  return d;
}

std::string Monomial::key() const {
  std::string k;
  k.reserve(8 + factors.size() * 2 + partner.size() * 2);
  k += static_cast<char>('A' + rank);
  for (const auto& f : factors) {
    k += "RHW"[int(f.kind)];
    k += static_cast<char>('0' + f.order);
    k += f.sym ? 's' : 'o';
  }
  k += '|';
  for (int e = 0; e < endpoints(); ++e) {
    k += static_cast<char>(48 + partner[e]);
    k += token[e] ? '*' : '.';
  }
  return k;
}

namespace {

std::string label_name(int idx, int rank) {
  static const std::string free_letters = "abcdefgh";
  static const std::string dummy_letters = "ijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  if (idx < rank) return idx < 8 ? std::string(1, free_letters[idx]) : "f" + std::to_string(idx);
  idx -= rank;
  return idx < static_cast<int>(dummy_letters.size()) ? std::string(1, dummy_letters[idx])
                                                      : "x" + std::to_string(idx);
}

}  // namespace

std::string Monomial::str() const {
  std::vector<int> label(endpoints(), -1);
  int next = rank;
  for (int e = 0; e < rank; ++e) label[e] = e;
  for (int e = rank; e < endpoints(); ++e) {
    if (label[e] >= 0) continue;
    int p = partner[e];
    if (p < rank) {
      label[e] = p;
    } else {
      label[e] = label[p] = next++;
    }
  }
  auto slot_text = [&](int e) {
    return (token[e] ? "J" : "") + label_name(label[e], rank);
  };
  std::ostringstream os;
  bool first = true;
  for (int e = 0; e < rank; ++e) {
    int p = partner[e];
    if (p < rank && e < p) {
      if (!first) os << "*";
      first = false;
      if (token[p] && !token[e]) os << "J(" << label_name(e, rank) << "," << label_name(p, rank) << ")";
      else if (token[e] && !token[p]) os << "J(" << label_name(p, rank) << "," << label_name(e, rank) << ")";
      else os << (token[e] ? "-" : "") << "g(" << label_name(e, rank) << "," << label_name(p, rank) << ")";
    }
  }
  int o = rank;
  for (const auto& f : factors) {
    if (!first) os << "*";
    first = false;
    os << f.name() << "(";
    for (int s = 0; s < f.slots(); ++s) {
      if (s > 0) os << (f.is_jet() && s == f.order ? ";" : ",");
      os << slot_text(o + s);
    }
    os << ")";
    o += f.slots();
  }
  if (first) os << "1";
  return os.str();
}

Canonical canonical_form(const Monomial& m, bool h_j_invariant) {
  const int F = static_cast<int>(m.factors.size());
  const int E = m.endpoints();
  const int r = m.rank;

  std::vector<int> old_off(F);
  for (int f = 0, o = r; f < F; ++f) {
    old_off[f] = o;
    o += m.factors[f].slots();
  }

  // Transport components: matched pairs plus J links inside factors.
  std::vector<std::vector<int>> adj(E);
  for (int e = 0; e < E; ++e) adj[e].push_back(m.partner[e]);
  for (int f = 0; f < F; ++f) {
    for (auto [a, b] : j_links(m.factors[f], h_j_invariant)) {
      adj[old_off[f] + a].push_back(old_off[f] + b);
      adj[old_off[f] + b].push_back(old_off[f] + a);
    }
  }
  std::vector<int> comp(E, -1), color(E, 0);
  std::vector<std::vector<int>> members;
  std::vector<std::array<int, 2>> tokens;
  for (int s = 0; s < E; ++s) {
    if (comp[s] >= 0) continue;
    int c = static_cast<int>(members.size());
    members.emplace_back();
    tokens.push_back({0, 0});
    std::vector<int> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      members[c].push_back(u);
      if (m.token[u]) ++tokens[c][color[u]];
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = c;
          color[v] = 1 - color[u];
          stack.push_back(v);
        } else if (color[v] == color[u]) {
          throw Error("odd transport cycle in monomial " + m.str());
        }
      }
    }
  }
  std::vector<int> token_comps;
  for (int c = 0; c < static_cast<int>(members.size()); ++c)
    if (tokens[c][0] + tokens[c][1] > 0) token_comps.push_back(c);

  // Factors are sorted by type; only same-type factors are permuted.
  std::vector<int> order(F);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return m.factors[a] < m.factors[b]; });
  std::vector<FactorType> types(F);
  std::vector<int> new_off(F);
  for (int i = 0, o = r; i < F; ++i) {
    types[i] = m.factors[order[i]];
    new_off[i] = o;
    o += types[i].slots();
  }
  std::vector<std::pair<int, int>> runs;
  for (int i = 0; i < F;) {
    int j = i;
    while (j < F && types[j] == types[i]) ++j;
    runs.emplace_back(i, j);
    i = j;
  }
  std::vector<const std::vector<SlotPerm>*> groups(F);
  for (int i = 0; i < F; ++i) groups[i] = &symmetry_group(types[i]);

  std::vector<int> newpos(E), inv(E), sig(2 * E), best;
  int best_sign = 0;
  bool zero = false;
  std::vector<int> elem(F, 0);

  auto evaluate = [&]() {
    int sign = 1;
    for (int e = 0; e < r; ++e) newpos[e] = e;
    for (int i = 0; i < F; ++i) {
      const SlotPerm& g = (*groups[i])[elem[i]];
      sign *= g.sign;
      const int f = order[i];
      for (int t = 0; t < types[i].slots(); ++t) newpos[old_off[f] + g.perm[t]] = new_off[i] + t;
    }
    for (int e = 0; e < E; ++e) inv[newpos[e]] = e;
    for (int p = 0; p < E; ++p) {
      sig[2 * p] = newpos[m.partner[inv[p]]];
      sig[2 * p + 1] = 0;
    }
    for (int c : token_comps) {
      int target = members[c][0];
      for (int u : members[c])
        if (newpos[u] > newpos[target]) target = u;
      int k = tokens[c][0] + tokens[c][1];
      int flips = tokens[c][1 - color[target]];
      if ((flips + k / 2) % 2) sign = -sign;
      if (k % 2) sig[2 * newpos[target] + 1] = 1;
    }
    if (best.empty() || sig < best) {
      best = sig;
      best_sign = sign;
    } else if (sig == best && sign != best_sign) {
      zero = true;
    }
  };

  // Odometer over group elements for a fixed factor order.
  auto sweep_elements = [&]() {
    std::fill(elem.begin(), elem.end(), 0);
    while (true) {
      evaluate();
      int i = F - 1;
      while (i >= 0) {
        if (++elem[i] < static_cast<int>(groups[i]->size())) break;
        elem[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
  };

  // Odometer over permutations inside each run of equal types.
  std::vector<std::vector<int>> run_members;
  for (auto [a, b] : runs) run_members.emplace_back(order.begin() + a, order.begin() + b);
  for (auto& rm : run_members) std::sort(rm.begin(), rm.end());
  std::vector<std::vector<int>> cur = run_members;
  while (true) {
    for (std::size_t k = 0; k < runs.size(); ++k)
      std::copy(cur[k].begin(), cur[k].end(), order.begin() + runs[k].first);
    sweep_elements();
    int k = static_cast<int>(runs.size()) - 1;
    while (k >= 0) {
      if (std::next_permutation(cur[k].begin(), cur[k].end())) break;
      --k;
    }
    if (k < 0) break;
  }

  Canonical out;
  if (zero) return out;
  out.sign = best_sign;
  out.mono.factors = types;
  out.mono.rank = r;
  out.mono.partner.resize(E);
  out.mono.token.resize(E);
  for (int p = 0; p < E; ++p) {
    out.mono.partner[p] = best[2 * p];
    out.mono.token[p] = static_cast<std::uint8_t>(best[2 * p + 1]);
  }
  return out;
}

}  // namespace kahler
