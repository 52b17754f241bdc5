#include "kahler/variation.hpp"

#include <algorithm>
#include <sstream>

#include "kahler/error.hpp"

namespace kahler {

namespace {

struct Program {
  const char* name;
  const char* free;
  const char* text;
};

// Order matters: later programs use earlier ones.
const Program kPrograms[] = {
    {"P", "xyz", "1/2*(D_x(h(y,z)) + D_y(h(x,z)) - D_z(h(x,y)))"},
    {"dD", "xyz", "D_y(h(x,z)) - D_z(h(x,y))"},
    {"ddD", "xy", "D_i(dD(x,y,i)) + D_i(dD(y,x,i))"},
    {"L", "xy", "-D_i(D_i(h(x,y)))"},
    {"Ro", "xy", "R(i,x,j,y)*h(i,j)"},
    {"Q", "qijk", "D_i(D_j(h(q,k))) + D_q(D_k(h(i,j))) - D_q(D_j(h(i,k))) - D_i(D_k(h(q,j)))"},
    {"Rp", "qijk", "1/2*Q(q,i,j,k) + 1/2*(h(k,n)*R(q,i,j,n) - h(n,j)*R(q,i,k,n))"},
    {"rbar", "xy", "Rp(x,i,y,i)"},
    {"S", "pq", "1/2*R(p,i,j,k)*Q(q,i,j,k)"},
    {"rQ", "pq", "Q(p,i,q,i)"},
    {"Rcp", "pq",
     "-h(a,b)*(R(p,a,i,j)*R(q,b,i,j) + R(p,i,a,j)*R(q,i,b,j) + R(p,i,j,a)*R(q,i,j,b))"
     " + Rp(p,i,j,k)*R(q,i,j,k) + R(p,i,j,k)*Rp(q,i,j,k)"},
};

constexpr const char* kWPairing =
    "2*(R(i,j,a,l)*P(i,k,a) - R(l,i,a,j)*P(i,k,a) - R(l,i,i,a)*P(k,j,a))*dD(j,k,l)";

constexpr const char* kHessianBracket =
    "L(a,b)*L(a,b) + lam*h(a,b)*L(a,b) - 3*Ro(a,b)*L(a,b) + nR*h(a,b)*h(a,b)"
    " - 2*lam*h(a,b)*Ro(a,b) + 2*Ro(a,b)*Ro(a,b) - Rcp(a,b)*h(a,b)";

std::string rational_literal(const Rational& r) {
  std::ostringstream os;
  os << "(" << (r < 0 ? "-" : "") << mpz_class(abs(r.get_num())).get_str();
  if (r.get_den() != 1) os << "/" << r.get_den().get_str();
  os << ")";
  return os.str();
}

}  // namespace

Env variation_env(const SpaceFormModel& model, bool jinv) {
  Env env;
  env.scalars["lam"] = einstein_constant(model);
  // |R|^2 / n = 16 (m + 1) c^2
  env.scalars["nR"] = Poly(16L) * (model.m_poly() + Poly(1L)) * model.c_poly() * model.c_poly();
  for (const auto& p : kPrograms) env.tensors.emplace(p.name, parse_expr(p.text, p.free, env, jinv));
  return env;
}

TensorExpr vexpr(const SpaceFormModel& model, std::string_view text, std::string_view free_order, bool jinv) {
  Env env = variation_env(model, jinv);
  if (free_order.empty()) return parse_expr(text, env, jinv);
  return parse_expr(text, free_order, env, jinv);
}

TensorExpr connection_variation(bool jinv) { return parse_expr(kPrograms[0].text, "xyz", {}, jinv); }

TensorExpr q_tensor(bool jinv) { return parse_expr(kPrograms[5].text, "qijk", {}, jinv); }

TensorExpr linearized_curvature(const SpaceFormModel& model, bool jinv) {
  return vexpr(model, "Rp(q,i,j,k)", "qijk", jinv);
}

TensorExpr w_pairing(const SpaceFormModel& model, bool jinv) { return vexpr(model, kWPairing, "", jinv); }

TensorExpr s_pairing(const SpaceFormModel& model, bool jinv) { return vexpr(model, "S(a,b)*h(a,b)", "", jinv); }

TensorExpr ricci_of_q(const SpaceFormModel& model, bool jinv) { return vexpr(model, "rQ(p,q)", "pq", jinv); }

TensorExpr rcheck_prime_pairing(const SpaceFormModel& model, bool jinv) {
  return vexpr(model, "Rcp(a,b)*h(a,b)", "", jinv);
}

TensorExpr hessian_integrand(const SpaceFormModel& model, bool jinv) {
  return vexpr(model, kHessianBracket, "", jinv);
}

std::string IdentityTarget::rhs_text(const std::vector<Rational>& c) const {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += rational_literal(c[i]) + "*(" + terms[i] + ")";
  }
  return out.empty() ? "0" : out;
}

IdentityCheck check_identity(const SpaceFormModel& model, const IdentityTarget& t) {
  return check_identity(model, t, t.coeffs);
}

IdentityCheck check_identity(const SpaceFormModel& model, const IdentityTarget& t,
                             const std::vector<Rational>& coeffs) {
  Env env = variation_env(model, t.h_j_invariant);
  auto parse = [&](const std::string& s) {
    return t.free_order.empty() ? parse_expr(s, env, t.h_j_invariant)
                                : parse_expr(s, t.free_order, env, t.h_j_invariant);
  };
  TensorExpr lhs = parse(t.lhs);
  std::string rhs_text = t.rhs_text(coeffs);
  TensorExpr rhs = rhs_text == "0" ? TensorExpr(lhs.rank(), t.h_j_invariant) : parse(rhs_text);
  EqualityVerdict v = expr_equal(lhs, rhs, model, t.cs, t.mod_div);
  IdentityCheck out{t.name, v.equal, v.witness, 0};
  if (v.divergence) out.basis_size = v.divergence->basis_size;
  return out;
}

FalsifiabilityReport falsifiability(const SpaceFormModel& model, const IdentityTarget& t) {
  FalsifiabilityReport rep;
  for (std::size_t i = 0; i < t.coeffs.size(); ++i) {
    auto c = t.coeffs;
    c[i] += 1;
    IdentityCheck chk = check_identity(model, t, c);
    chk.name = t.name + "[coefficient " + std::to_string(i) + " + 1]";
    if (chk.holds || chk.residual.is_zero()) rep.all_rejected = false;
    rep.perturbed.push_back(std::move(chk));
  }
  return rep;
}

IdentityTarget lemma1_target() {
  return {"lemma1", "rbar(x,y)", {"L(x,y)", "lam*h(x,y)"}, {Rational(1, 2), 1}, "xy", ConstraintSet::tt(), false,
          false};
}

IdentityTarget lemma2_target() {
  return {"lemma2", "ddD(x,y)", {"L(x,y)", "lam*h(x,y)", "Ro(x,y)"}, {2, 2, -2}, "xy", ConstraintSet::tt(), false,
          false};
}

IdentityTarget lemma3_target() {
  return {"lemma3",
          kWPairing,
          {"lam*h(a,b)*L(a,b)", "lam^2*h(a,b)*h(a,b)", "Ro(a,b)*L(a,b)", "Ro(a,b)*Ro(a,b)"},
          {2, 2, 2, -2},
          "",
          ConstraintSet::tt(),
          true,
          false};
}

IdentityTarget ricci_expansion_target() {
  return {"ricci_expansion",
          "2*Rp(p,i,q,i)",
          {"D_i(D_q(h(p,i)))", "D_p(D_i(h(q,i)))", "D_p(D_q(h(i,i)))", "D_i(D_i(h(p,q)))", "h(i,j)*R(p,i,q,j)",
           "h(q,j)*R(p,i,i,j)"},
          {1, 1, -1, -1, 1, -1},
          "pq",
          ConstraintSet::none(),
          false,
          false};
}

IdentityCheck lemma1_without_divergence(const SpaceFormModel& model) {
  IdentityTarget t = lemma1_target();
  t.name = "lemma1 without divergence rule";
  t.cs.divergence_free = false;
  return check_identity(model, t);
}

TensorExpr reduce_kahler_closed(const TensorExpr& e) {
  if (e.rank() != 1 && e.rank() != 3) throw RankError("closure relations are built for ranks 1 and 3");
  Env env;
  env.tensors.emplace("K", parse_expr("D_x(J(y,u)*h(u,z)) + D_y(J(z,u)*h(u,x)) + D_z(J(x,u)*h(u,y))", "xyz", {},
                                      true));
  std::vector<TensorExpr> rels;
  const char* conn[] = {"g", "J"};
  if (e.rank() == 3) {
    std::string slots = "xyz";
    std::sort(slots.begin(), slots.end());
    do {
      for (int t = 0; t < 8; ++t) {
        std::string s = "K(a,b,c)";
        const char* dummies = "abc";
        for (int i = 0; i < 3; ++i)
          s += std::string("*") + conn[(t >> i) & 1] + "(" + slots[i] + "," + dummies[i] + ")";
        rels.push_back(parse_expr(s, "xyz", env, true));
      }
    } while (std::next_permutation(slots.begin(), slots.end()));
  } else {
    const char* shapes[] = {"K(a,i,j)", "K(i,a,j)", "K(i,j,a)"};
    for (const char* shape : shapes)
      for (const char* inner : conn)
        for (const char* outer : conn) {
          std::string s = std::string(shape) + "*" + inner + "(i,j)*" + outer + "(x,a)";
          rels.push_back(parse_expr(s, "x", env, true));
        }
  }
  return reduce_mod_relations(e.with_j_invariance(true), rels);
}

TensorExpr k2_residual(bool with_closure) {
  Env env;
  env.tensors.emplace("P", connection_variation(true));
  TensorExpr r = parse_expr("P(x,y,a)*J(a,z) - P(x,a,z)*J(y,a)", "xyz", env, true);
  return with_closure ? reduce_kahler_closed(r) : r;
}

TensorExpr trace_divergence_residual(bool with_closure) {
  TensorExpr r = parse_expr("D_z(h(i,i)) - 2*D_i(h(i,z))", "z", {}, true);
  return with_closure ? reduce_kahler_closed(r) : r;
}

IdentityCheck hessian_consistency(const SpaceFormModel& model, int w_sign) {
  IdentityTarget t{w_sign > 0 ? "hessian_consistency[+W]" : "hessian_consistency[-W]",
                   std::string("rbar(a,b)*ddD(a,b) ") + (w_sign > 0 ? "+ " : "- ") + kWPairing,
                   {"L(a,b)*L(a,b)", "lam*h(a,b)*L(a,b)", "Ro(a,b)*L(a,b)", "lam*h(a,b)*Ro(a,b)",
                    "Ro(a,b)*Ro(a,b)"},
                   {1, 1, -3, -2, 2},
                   "",
                   ConstraintSet::tt(),
                   true,
                   false};
  return check_identity(model, t);
}

}  // namespace kahler
