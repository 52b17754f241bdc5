#include <doctest.h>

#include "kahler/variation.hpp"

using namespace kahler;

namespace {

const SpaceFormModel kSym = SpaceFormModel::symbolic();
const Poly kC = Poly::var(Var::c);
const Poly kM = Poly::var(Var::m);

TensorExpr v(std::string_view text, std::string_view free = {}) { return vexpr(kSym, text, free, true); }

TensorExpr nf(const TensorExpr& e) { return reduce_mod_divergence(e, kSym, ConstraintSet::kahler_tt()).normal_form; }

}  // namespace

TEST_CASE("linearized Ricci contraction") {
  auto r = check_identity(kSym, lemma1_target());
  CHECK(r.holds);
  CHECK(r.residual.is_zero());
  auto f = falsifiability(kSym, lemma1_target());
  CHECK(f.all_rejected);
  for (const auto& p : f.perturbed) CHECK(!p.residual.is_zero());
}

TEST_CASE("delta^D d^D on trace-free h") {
  CHECK(check_identity(kSym, lemma2_target()).holds);
  CHECK(falsifiability(kSym, lemma2_target()).all_rejected);
}

TEST_CASE("W pairing modulo divergence") {
  auto r = check_identity(kSym, lemma3_target());
  CHECK(r.holds);
  CHECK(r.basis_size > 0);
  auto f = falsifiability(kSym, lemma3_target());
  CHECK(f.all_rejected);
  CHECK(f.perturbed.size() == 4);
}

TEST_CASE("quoted expansion of the Ricci contraction") {
  CHECK(check_identity(kSym, ricci_expansion_target()).holds);
  CHECK(falsifiability(kSym, ricci_expansion_target()).all_rejected);
}

TEST_CASE("the divergence rule is needed") {
  auto r = lemma1_without_divergence(kSym);
  CHECK_FALSE(r.holds);
  CHECK(!r.residual.is_zero());
}

TEST_CASE("numeric dimensions") {
  for (int m = 1; m <= 3; ++m) {
    SpaceFormModel model(m, std::nullopt);
    CHECK(check_identity(model, lemma1_target()).holds);
    CHECK(check_identity(model, lemma2_target()).holds);
  }
}

TEST_CASE("connection variation of J needs the closed Kahler form") {
  CHECK(!k2_residual(false).is_zero());
  CHECK(k2_residual(true).is_zero());
  CHECK(!trace_divergence_residual(false).is_zero());
  CHECK(trace_divergence_residual(true).is_zero());
}

TEST_CASE("ricci of Q") {
  auto r = simplify(ricci_of_q(kSym) - v("L(p,q)", "pq"), kSym, ConstraintSet::kahler_tt());
  CHECK(r == Poly(2L) * kM * kC * v("h(p,q)", "pq"));
}

TEST_CASE("S pairing") {
  CHECK(nf(s_pairing(kSym)) == kC * v("D_i(h(j,k))*D_i(h(j,k))"));
  auto printed = kC * v("D_i(h(j,k))*D_i(h(j,k))") + Poly(6L) * kC * kC * v("h(i,j)*h(i,j)");
  CHECK_FALSE(nf(s_pairing(kSym)) == nf(printed));
  auto shift = nf(s_pairing(kSym) - kC * v("rQ(a,b)*h(a,b)"));
  CHECK(shift == Poly(-2L) * kM * kC * kC * v("h(i,j)*h(i,j)"));
}

TEST_CASE("linearized Rcheck pairing") {
  auto expect = Poly(2L) * kC * v("D_i(h(j,k))*D_i(h(j,k))") -
                (Poly(8L) * kM + Poly(16L)) * kC * kC * v("h(i,j)*h(i,j)");
  CHECK(nf(rcheck_prime_pairing(kSym)) == expect);
}

TEST_CASE("quadratic curvature contractions") {
  auto hh = v("h(i,j)*h(i,j)");
  CHECK(nf(v("h(p,q)*h(a,b)*R(p,a,i,j)*R(q,b,i,j)")) == (Poly(8L) * kM + Poly(16L)) * kC * kC * hh);
  CHECK(nf(v("h(p,q)*h(a,b)*R(p,i,j,a)*R(q,i,j,b)")) == (Poly(4L) * kM + Poly(16L)) * kC * kC * hh);
}

TEST_CASE("Hessian normal form") {
  auto expect = v("D_i(D_i(h(j,k)))*D_l(D_l(h(j,k)))") +
                (Poly(2L) * kM - Poly(6L)) * kC * v("D_i(h(j,k))*D_i(h(j,k))") +
                (Poly(16L) * kM + Poly(32L)) * kC * kC * v("h(i,j)*h(i,j)");
  CHECK(nf(hessian_integrand(kSym)) == nf(expect));
}

TEST_CASE("first variation form agrees with the bracket only with -W") {
  auto minus = hessian_consistency(kSym, -1);
  CHECK(minus.holds);
  auto plus = hessian_consistency(kSym, 1);
  CHECK_FALSE(plus.holds);
  CHECK(!plus.residual.is_zero());
}
