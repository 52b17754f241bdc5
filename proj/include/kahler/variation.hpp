#pragma once

#include <string>
#include <vector>

#include "kahler/parser.hpp"
#include "kahler/quotient.hpp"

namespace kahler {

// Named programs over the generic perturbation h. Tensors registered in
// the environment, with their slot order:
//   P(x,y,z)    g(Pi_h(x,y), z)
//   dD(x,y,z)   d^D h
//   ddD(x,y)    delta^D d^D h
//   L(x,y)      D*D h
//   Ro(x,y)     curvature action on h
//   Q(q,i,j,k)  second-derivative curvature tensor
//   Rp(q,i,j,k) linearized curvature
//   rbar(x,y)   linearized Ricci contraction
//   S(p,q), rQ(p,q), Rcp(p,q)
// and the scalars lam = 2(m+1)c, nR = |R|^2 / n.
Env variation_env(const SpaceFormModel& model, bool h_j_invariant);

// Parses text in the variation environment.
TensorExpr vexpr(const SpaceFormModel& model, std::string_view text, std::string_view free_order = {},
                 bool h_j_invariant = false);

TensorExpr connection_variation(bool h_j_invariant = false);
TensorExpr linearized_curvature(const SpaceFormModel& model, bool h_j_invariant = false);
TensorExpr w_pairing(const SpaceFormModel& model, bool h_j_invariant = false);
TensorExpr q_tensor(bool h_j_invariant = false);
TensorExpr s_pairing(const SpaceFormModel& model, bool h_j_invariant = true);
TensorExpr ricci_of_q(const SpaceFormModel& model, bool h_j_invariant = true);
TensorExpr rcheck_prime_pairing(const SpaceFormModel& model, bool h_j_invariant = true);
// Bracket of the Hessian with curvature terms kept as contractions.
TensorExpr hessian_integrand(const SpaceFormModel& model, bool h_j_invariant = true);

// Outcome of one identity check.
struct IdentityCheck {
  std::string name;
  bool holds = false;
  TensorExpr residual;
  std::size_t basis_size = 0;
};

// A target identity lhs = sum_i coeffs[i] * terms[i]. Perturbing any single
// coefficient must break it.
struct IdentityTarget {
  std::string name;
  std::string lhs;
  std::vector<std::string> terms;
  std::vector<Rational> coeffs;
  std::string free_order;
  ConstraintSet cs;
  bool mod_div = false;
  bool h_j_invariant = false;

  std::string rhs_text(const std::vector<Rational>& c) const;
};

IdentityCheck check_identity(const SpaceFormModel& model, const IdentityTarget& t);
IdentityCheck check_identity(const SpaceFormModel& model, const IdentityTarget& t, const std::vector<Rational>& coeffs);

// Every single-coefficient perturbation; true iff all of them fail.
struct FalsifiabilityReport {
  bool all_rejected = true;
  std::vector<IdentityCheck> perturbed;
};
FalsifiabilityReport falsifiability(const SpaceFormModel& model, const IdentityTarget& t);

IdentityTarget lemma1_target();
IdentityTarget lemma2_target();
IdentityTarget lemma3_target();
IdentityTarget ricci_expansion_target();  // the quoted expansion of 2 R'(p,i,q,i)

// The rbar identity with the divergence rule removed; expected to fail.
IdentityCheck lemma1_without_divergence(const SpaceFormModel& model);

// Commutator residual g(J Pi(x,y), z) - g(Pi(x,Jy), z) reduced under J-invariance,
// with and without the closure relations of the Kahler form of h.
TensorExpr k2_residual(bool with_closure);
// Trace-divergence relation d tr h + 2 delta h under the same assumptions.
TensorExpr trace_divergence_residual(bool with_closure);

// Reduces a J-invariant expression linear in Dh modulo d(h(J.,.)) = 0.
TensorExpr reduce_kahler_closed(const TensorExpr& e);

// First-variation form of H with the W-pairing entering with the given sign,
// minus the expanded bracket, modulo divergence under the trace-free gauge.
IdentityCheck hessian_consistency(const SpaceFormModel& model, int w_sign);

}  // namespace kahler
