#include "kahler/kernel.hpp"

#include <sstream>

#include "kahler/commutation.hpp"
#include "kahler/error.hpp"

namespace kahler {

std::string ConstraintSet::str() const {
  std::ostringstream os;
  const char* sep = "";
  auto flag = [&](bool on, const char* name) {
    if (!on) return;
    os << sep << name;
    sep = ",";
  };
  flag(trace_free, "trace_free");
  flag(divergence_free, "divergence_free");
  flag(j_invariant, "j_invariant");
  flag(kahler_closed, "kahler_closed");
  flag(trace_divergence, "trace_divergence");
  flag(ricci_commutation, "ricci_commutation");
  flag(parallel_curvature, "parallel_curvature");
  flag(parallel_complex, "parallel_complex");
  return os.str();
}

TensorExpr canonicalize(const TensorExpr& e, const ConstraintSet& cs) {
  return cs.j_invariant ? e.with_j_invariance(true) : e;
}

namespace {

std::vector<int> free_labels(int rank) {
  std::vector<int> f(rank);
  for (int i = 0; i < rank; ++i) f[i] = -1 - i;
  return f;
}

// Expands the factor at index i of every term by the given rule.
template <class Rule>
std::vector<RawTerm> expand_factors(std::vector<RawTerm> terms, Rule&& rule) {
  std::vector<RawTerm> done;
  while (!terms.empty()) {
    RawTerm t = std::move(terms.back());
    terms.pop_back();
    bool hit = false;
    for (std::size_t i = 0; i < t.factors.size(); ++i) {
      auto repl = rule(t.factors[i]);
      if (!repl) continue;
      hit = true;
      for (auto& r : *repl) {
        RawTerm n;
        n.coeff = t.coeff * r.coeff;
        for (std::size_t j = 0; j < t.factors.size(); ++j)
          if (j != i) n.factors.push_back(t.factors[j]);
        n.factors.insert(n.factors.end(), r.factors.begin(), r.factors.end());
        terms.push_back(std::move(n));
      }
      break;
    }
    if (!hit) done.push_back(std::move(t));
  }
  return done;
}

TensorExpr rebuild(const TensorExpr& like, const std::vector<int>& free, std::vector<RawTerm> terms) {
  RawExpr raw;
  raw.free = free;
  raw.terms = std::move(terms);
  return TensorExpr::from_raw(raw, like.h_j_invariant());
}

}  // namespace

TensorExpr substitute_curvature(const TensorExpr& e, const SpaceFormModel& model) {
  const Poly c = model.c_poly();
  TensorExpr out(e.rank(), e.h_j_invariant());
  LabelGen gen;
  auto free = free_labels(e.rank());
  for (const auto& [key, t] : e.terms()) {
    bool has_r = false;
    for (const auto& f : t.mono.factors) has_r = has_r || f.kind == Kind::Curv;
    if (!has_r) {
      out.add_canonical(t.mono, t.coeff);
      continue;
    }
    if (c.is_zero()) continue;
    RawTerm r = from_graph(t.mono, free, gen);
    r.coeff = t.coeff;
    auto rule = [&](const RawFactor& f) -> std::optional<std::vector<RawTerm>> {
      if (f.kind != RawKind::Curv) return std::nullopt;
      int x = f.labels[0], y = f.labels[1], z = f.labels[2], w = f.labels[3];
      return std::vector<RawTerm>{
          {c, {RawFactor::g(x, z), RawFactor::g(y, w)}},
          {-c, {RawFactor::g(x, w), RawFactor::g(y, z)}},
          {c, {RawFactor::J(x, z), RawFactor::J(y, w)}},
          {-c, {RawFactor::J(x, w), RawFactor::J(y, z)}},
          {Poly(2L) * c, {RawFactor::J(x, y), RawFactor::J(z, w)}},
      };
    };
    out += rebuild(e, free, expand_factors({r}, rule));
  }
  return out;
}

TensorExpr commute_derivatives(const TensorExpr& e) {
  TensorExpr out(e.rank(), e.h_j_invariant());
  LabelGen gen;
  auto free = free_labels(e.rank());
  for (const auto& [key, t] : e.terms()) {
    bool ordered = false;
    for (const auto& f : t.mono.factors) ordered = ordered || (f.is_jet() && !f.sym);
    if (!ordered) {
      out.add_canonical(t.mono, t.coeff);
      continue;
    }
    RawTerm r = from_graph(t.mono, free, gen);
    r.coeff = t.coeff;
    auto rule = [&](const RawFactor& f) -> std::optional<std::vector<RawTerm>> {
      if ((f.kind != RawKind::H && f.kind != RawKind::Omega) || f.sym) return std::nullopt;
      std::vector<int> d(f.labels.begin(), f.labels.begin() + f.order);
      std::vector<int> b(f.labels.begin() + f.order, f.labels.end());
      return ordered_jet_expansion(f.kind == RawKind::H ? Kind::H : Kind::Omega, d, b, gen);
    };
    out += rebuild(e, free, expand_factors({r}, rule));
  }
  return out;
}

namespace {

enum class GaugeAction { Keep, Drop, Replace };

struct GaugeResult {
  GaugeAction action = GaugeAction::Keep;
  Monomial mono;  // monomial after token moves
  int sign = 1;
  int factor = -1;
  int deriv_slot = -1;  // contracted derivative slot (within the factor)
  int base_slot = -1;   // contracted base slot (within the factor)
};

// Clears the tokens on the edge between endpoints s and b, moving a lone
// token to the other base slot of the factor. Returns the sign, or 0 if
// the tokens cannot be moved.
int clear_edge_tokens(Monomial& m, int s, int b, int b_other, bool jinv) {
  int ts = m.token[s], tb = m.token[b];
  if (ts + tb == 0) return 1;
  if (ts + tb == 2) {
    m.token[s] = m.token[b] = 0;
    return 1;
  }
  if (!jinv) return 0;
  // A(J e_i) B(e_i) = -A(e_i) B(J e_i); h(J x, y) = -h(x, J y).
  int sign = (ts ? -1 : 1) * -1;
  m.token[s] = m.token[b] = 0;
  if (m.token[b_other]) {
    m.token[b_other] = 0;
    sign = -sign;
  } else {
    m.token[b_other] = 1;
  }
  return sign;
}

GaugeResult inspect(const Monomial& mono, const ConstraintSet& cs) {
  GaugeResult res;
  for (int f = 0; f < static_cast<int>(mono.factors.size()); ++f) {
    const FactorType& ft = mono.factors[f];
    if (ft.kind != Kind::H) continue;
    const int off = mono.offset(f);
    const int b0 = off + ft.order, b1 = b0 + 1;
    if (cs.trace_free && mono.partner[b0] == b1) {
      res.action = GaugeAction::Drop;
      return res;
    }
    if (ft.order == 0) continue;
    for (int d = ft.sym ? 0 : ft.order - 1; d < ft.order; ++d) {
      const int s = off + d;
      const int p = mono.partner[s];
      if (p != b0 && p != b1) continue;
      const int other = p == b0 ? b1 : b0;
      Monomial m = mono;
      int sign = clear_edge_tokens(m, s, p, other, cs.j_invariant);
      if (sign == 0) continue;
      if (cs.divergence_free) {
        res.mono = std::move(m);
        res.sign = sign;
        res.factor = f;
        res.deriv_slot = d;
        res.base_slot = p - off;
        res.action = (!ft.sym || ft.order == 1) ? GaugeAction::Drop : GaugeAction::Replace;
        return res;
      }
      if (cs.trace_divergence && ft.order == 1) {
        // D_i h(i, z) = 1/2 D_z h(i, i)
        const int z = m.partner[other];
        const int tz = m.token[other];
        m.partner[s] = z;
        m.partner[z] = s;
        m.token[s] = tz;
        m.partner[b0] = b1;
        m.partner[b1] = b0;
        m.token[b0] = m.token[b1] = 0;
        res.mono = std::move(m);
        res.sign = sign;
        res.factor = f;
        res.action = GaugeAction::Replace;
        res.deriv_slot = -1;
        return res;
      }
    }
  }
  return res;
}

}  // namespace

TensorExpr apply_gauge(const TensorExpr& e, const ConstraintSet& cs) {
  if (!cs.trace_free && !cs.divergence_free && !cs.trace_divergence) return e;
  TensorExpr out(e.rank(), e.h_j_invariant());
  LabelGen gen;
  auto free = free_labels(e.rank());
  for (const auto& [key, t] : e.terms()) {
    GaugeResult g = inspect(t.mono, cs);
    if (g.action == GaugeAction::Keep) {
      out.add_canonical(t.mono, t.coeff);
      continue;
    }
    if (g.action == GaugeAction::Drop) continue;
    const Poly coeff = g.sign > 0 ? t.coeff : -t.coeff;
    if (g.deriv_slot < 0) {
      out.add_monomial(g.mono, coeff * Poly(Rational(1, 2)));
      continue;
    }
    // Symmetrized jet with a divergence: equals minus the ordered-jet
    // correction with the contracted derivative innermost.
    RawTerm r = from_graph(g.mono, free, gen);
    r.coeff = coeff;
    std::size_t idx = 0;
    for (int seen = -1; idx < r.factors.size(); ++idx) {
      if (!r.factors[idx].is_connector() && ++seen == g.factor) break;
    }
    const RawFactor f = r.factors[idx];
    const int k = f.order;
    std::vector<int> derivs;
    for (int d = 0; d < k; ++d)
      if (d != g.deriv_slot) derivs.push_back(f.labels[d]);
    derivs.push_back(f.labels[g.deriv_slot]);
    std::vector<int> base{f.labels[g.base_slot], f.labels[g.base_slot == k ? k + 1 : k]};
    std::vector<RawTerm> terms;
    for (auto& c : ordered_jet_correction(Kind::H, derivs, base, gen)) {
      RawTerm n;
      n.coeff = -r.coeff * c.coeff;
      for (std::size_t j = 0; j < r.factors.size(); ++j)
        if (j != idx) n.factors.push_back(r.factors[j]);
      n.factors.insert(n.factors.end(), c.factors.begin(), c.factors.end());
      terms.push_back(std::move(n));
    }
    out += rebuild(e, free, std::move(terms));
  }
  return out;
}

TensorExpr simplify(const TensorExpr& e, const SpaceFormModel& model, const ConstraintSet& cs) {
  TensorExpr cur = canonicalize(e, cs).specialize(model.values());
  for (int iter = 0; iter < 64; ++iter) {
    TensorExpr next = apply_gauge(cur, cs);
    if (cs.ricci_commutation) next = commute_derivatives(next);
    if (cs.parallel_curvature) next = substitute_curvature(next, model);
    next = canonicalize(next, cs).specialize(model.values());
    if (next == cur) return cur;
    cur = std::move(next);
  }
  throw Error("simplification did not reach a fixed point");
}

}  // namespace kahler
