#include <doctest.h>

#include <random>

#include "kahler/error.hpp"
#include "kahler/parser.hpp"
#include "kahler/quotient.hpp"

using namespace kahler;

namespace {

const SpaceFormModel kSym = SpaceFormModel::symbolic();

TensorExpr p(std::string_view text, std::string_view free = {}) { return parse_expr(text, free, {}, true); }

const char* const kFields[] = {
    "h(x,i)*D_j(h(i,j))",
    "h(i,j)*D_x(h(i,j))",
    "h(i,j)*D_i(h(j,x))",
    "D_i(h(j,k))*D_i(D_x(h(j,k)))",
    "D_x(h(j,k))*D_i(D_i(h(j,k)))",
    "h(j,k)*D_x(D_i(D_i(h(j,k))))",
    "R(x,i,j,k)*h(i,l)*D_l(h(j,k))",
    "J(x,a)*h(a,i)*D_j(h(i,j))",
    "h(i,j)*D_i(D_k(D_k(h(j,x))))",
};

}  // namespace

TEST_CASE("divergences reduce to zero") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-3, 3);
  const auto cs = ConstraintSet::kahler_tt();
  for (int trial = 0; trial < 50; ++trial) {
    TensorExpr v(1, true);
    for (const char* f : kFields) v += Poly(static_cast<long>(coef(rng))) * p(f, "x");
    auto div = divergence_of(v, kSym, cs);
    auto r = reduce_mod_divergence(div, kSym, cs);
    CHECK(r.normal_form.is_zero());
  }
}

TEST_CASE("integration by parts") {
  const auto cs = ConstraintSet::kahler_tt();
  auto grad = p("D_i(h(j,k))*D_i(h(j,k))");
  auto lap = p("-D_i(D_i(h(j,k)))*h(j,k)");
  auto v = expr_equal(grad, lap, kSym, cs, true);
  CHECK(v.equal);
  CHECK(v.witness.is_zero());
  CHECK_FALSE(expr_equal(grad, lap, kSym, cs, false).equal);
  CHECK_FALSE(expr_equal(p("h(i,j)*h(i,j)"), TensorExpr(0, true), kSym, cs, true).equal);
}

TEST_CASE("witness reconstructs the difference") {
  const auto cs = ConstraintSet::kahler_tt();
  auto e = p("D_i(D_j(h(k,l)))*D_j(D_i(h(k,l))) + 3*h(i,j)*D_k(D_k(h(i,j)))");
  auto r = reduce_mod_divergence(e, kSym, cs);
  CHECK(!r.normal_form.is_zero());
  auto diff = simplify(e, kSym, cs) - r.normal_form;
  CHECK(divergence_of(r.witness_field(), kSym, cs) == diff);
  CHECK(reduce_mod_divergence(r.normal_form, kSym, cs).normal_form == r.normal_form);
}

TEST_CASE("equality is reflexive and symmetric") {
  const auto cs = ConstraintSet::kahler_tt();
  std::vector<TensorExpr> es{p("h(i,j)*h(i,j)"), p("D_i(h(j,k))*D_i(h(j,k))"), p("-D_i(D_i(h(j,k)))*h(j,k)"),
                             p("R(i,j,k,l)*h(i,k)*h(j,l)")};
  for (const auto& a : es) {
    CHECK(expr_equal(a, a, kSym, cs, true).equal);
    for (const auto& b : es) CHECK(expr_equal(a, b, kSym, cs, true).equal == expr_equal(b, a, kSym, cs, true).equal);
  }
}

TEST_CASE("reduction modulo relations") {
  auto a = parse_expr("h(x,y)", "xy");
  auto b = parse_expr("D_x(D_y(h(i,i)))", "xy");
  auto e = Poly(3L) * a + b;
  CHECK(reduce_mod_relations(e, {a}) == b);
  CHECK(reduce_mod_relations(e, {a, b}).is_zero());
  CHECK(reduce_mod_relations(e, {}) == e);
}

TEST_CASE("basis cap") {
  QuotientOptions tiny;
  tiny.basis_cap = 1;
  auto e = p("D_i(D_j(h(k,l)))*D_j(D_i(h(k,l)))");
  CHECK_THROWS_AS(reduce_mod_divergence(e, kSym, ConstraintSet::kahler_tt(), tiny), OverflowError);
}
