#include "kahler/space_form.hpp"

#include <array>
#include <map>

#include "kahler/error.hpp"
#include "kahler/kernel.hpp"
#include "kahler/parser.hpp"

namespace kahler {

SignedBasis apply_j(BasisIndex b) {
  if (!b.rotated) return {{b.k, true}, 1};
  return {{b.k, false}, -1};
}

int frame_position(BasisIndex b) { return 2 * (b.k - 1) + (b.rotated ? 1 : 0); }

BasisIndex basis_at(int position) { return {position / 2 + 1, position % 2 == 1}; }

SpaceFormModel::SpaceFormModel(std::optional<int> m, std::optional<Rational> c) : m_(m), c_(c) {
  if (m_ && *m_ < 1) throw Error("complex dimension must be at least 1");
}

Poly SpaceFormModel::m_poly() const { return m_ ? Poly(static_cast<long>(*m_)) : Poly::var(Var::m); }

Poly SpaceFormModel::c_poly() const { return c_ ? Poly(*c_) : Poly::var(Var::c); }

VarValues SpaceFormModel::values() const {
  VarValues v;
  if (m_) v.set(Var::m, *m_);
  if (c_) v.set(Var::c, *c_);
  return v;
}

namespace {

using Tuple = std::array<BasisIndex, 4>;

// Table entries in units of c; std::nullopt when the tuple is not listed.
std::optional<int> table_value(const Tuple& t) {
  const auto& [a, b, x, y] = t;
  if (a.k != b.k && x.k != a.k && x.k != b.k) return 0;
  if (a.k == b.k && x.k == y.k && a.k == x.k) {
    if (!a.rotated && b.rotated && !x.rotated && y.rotated) return 4;
    return std::nullopt;
  }
  if (a.k == b.k && x.k == y.k) {
    if (!a.rotated && b.rotated && !x.rotated && y.rotated) return 2;
    return std::nullopt;
  }
  if (a.k != b.k && a == x && b == y) {
    if (!a.rotated && !b.rotated) return 1;
    if (!a.rotated && b.rotated) return 1;
    if (a.rotated && b.rotated) return 1;
  }
  return std::nullopt;
}

int tuple_code(const Tuple& t) {
  int code = 0;
  for (const auto& b : t) code = code * 64 + frame_position(b);
  return code;
}

}  // namespace

Poly curvature_component(const SpaceFormModel& model, BasisIndex a, BasisIndex b, BasisIndex x, BasisIndex y) {
  for (const auto& v : {a, b, x, y}) {
    if (v.k < 1 || (model.m() && v.k > *model.m())) throw Error("basis index out of range for the model");
  }
  std::map<int, int> seen;
  std::vector<std::pair<Tuple, int>> queue{{Tuple{a, b, x, y}, 1}};
  seen[tuple_code(queue[0].first)] = 1;
  bool vanishes = false;
  std::optional<Rational> value;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    auto [t, s] = queue[qi];
    if (auto v = table_value(t)) {
      Rational val = s * *v;
      if (value && *value != val) throw Error("curvature table is inconsistent under symmetries");
      value = val;
    }
    std::vector<std::pair<Tuple, int>> nbrs;
    nbrs.push_back({{t[1], t[0], t[2], t[3]}, -s});
    nbrs.push_back({{t[0], t[1], t[3], t[2]}, -s});
    nbrs.push_back({{t[2], t[3], t[0], t[1]}, s});
    for (int pair : {0, 2}) {
      SignedBasis p = apply_j(t[pair]), q = apply_j(t[pair + 1]);
      Tuple u = t;
      u[pair] = p.b;
      u[pair + 1] = q.b;
      nbrs.push_back({u, s * p.sign * q.sign});
    }
    for (auto& [u, su] : nbrs) {
      int code = tuple_code(u);
      auto it = seen.find(code);
      if (it == seen.end()) {
        seen.emplace(code, su);
        queue.push_back({u, su});
      } else if (it->second != su) {
        vanishes = true;
      }
    }
  }
  if (vanishes || !value) {
    if (value && *value != 0) throw Error("curvature table contradicts the symmetries");
    return Poly();
  }
  return Poly(*value) * model.c_poly();
}

TensorExpr curvature_closed_form(const SpaceFormModel& model) {
  Env env;
  env.scalars["k"] = model.c_poly();
  return parse_expr(
      "k*(g(x,z)*g(y,w) - g(x,w)*g(y,z) + J(x,z)*J(y,w) - J(x,w)*J(y,z) + 2*J(x,y)*J(z,w))", "xyzw", env);
}

Poly einstein_constant(const SpaceFormModel& model) {
  return Poly(2L) * (model.m_poly() + Poly(1L)) * model.c_poly();
}

Poly curvature_norm_sq(const SpaceFormModel& model) {
  return Poly(32L) * model.m_poly() * (model.m_poly() + Poly(1L)) * model.c_poly() * model.c_poly();
}

TensorExpr ricci_contraction(const SpaceFormModel& model) {
  return simplify(parse_expr("R(a,i,b,i)", "ab"), model, ConstraintSet::none());
}

TensorExpr full_contraction(const SpaceFormModel& model) {
  return simplify(parse_expr("R(i,j,k,l)*R(i,j,k,l)"), model, ConstraintSet::none());
}

TensorExpr rcheck_tensor(const SpaceFormModel& model) {
  return simplify(parse_expr("R(p,i,j,k)*R(q,i,j,k)", "pq"), model, ConstraintSet::none());
}

namespace {

int j_entry(int u, int i) {
  BasisIndex bi = basis_at(i);
  SignedBasis img = apply_j(bi);
  return frame_position(img.b) == u ? img.sign : 0;
}

}  // namespace

Poly evaluate_on_frame(const TensorExpr& e, const std::vector<BasisIndex>& args) {
  if (static_cast<int>(args.size()) != e.rank()) throw RankError("wrong number of frame arguments");
  Poly total;
  for (const auto& [key, t] : e.terms()) {
    if (!t.mono.factors.empty()) throw Error("frame evaluation supports g and J only");
    int value = 1;
    for (int a = 0; a < t.mono.rank && value != 0; ++a) {
      int b = t.mono.partner[a];
      if (b < a) continue;
      int xa = frame_position(args[a]), xb = frame_position(args[b]);
      bool ta = t.mono.token[a], tb = t.mono.token[b];
      if (ta == tb) value *= xa == xb ? (ta ? 1 : 1) : 0;
      else if (ta) value *= j_entry(xa, xb);
      else value *= j_entry(xb, xa);
    }
    total += Poly(static_cast<long>(value)) * t.coeff;
  }
  return total;
}

int table_mismatches(int m) {
  SpaceFormModel model(m, std::nullopt);
  const TensorExpr cf = curvature_closed_form(model);
  const int n = 2 * m;
  int bad = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          std::vector<BasisIndex> args{basis_at(a), basis_at(b), basis_at(x), basis_at(y)};
          if (!(evaluate_on_frame(cf, args) == curvature_component(model, args[0], args[1], args[2], args[3]))) ++bad;
        }
  return bad;
}

std::vector<double> curvature_array(int m, double c) {
  const int n = 2 * m;
  SpaceFormModel unit(m, Rational(1));
  std::vector<double> out(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          Poly v = curvature_component(unit, basis_at(a), basis_at(b), basis_at(x), basis_at(y));
          out[((a * n + b) * n + x) * n + y] = c * v.constant().get_d();
        }
  return out;
}

std::vector<double> complex_structure_matrix(int m) {
  const int n = 2 * m;
  std::vector<double> J(n * n, 0.0);
  for (int u = 0; u < n; ++u)
    for (int i = 0; i < n; ++i) J[u * n + i] = j_entry(u, i);
  return J;
}

}  // namespace kahler
