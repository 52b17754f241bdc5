#include <doctest.h>

#include "kahler/error.hpp"
#include "kahler/parser.hpp"

using namespace kahler;

TEST_CASE("contraction and free order") {
  auto tr = parse_expr("g(a,b)*h(a,b)");
  CHECK(tr.rank() == 0);
  CHECK(tr == parse_expr("h(i,i)"));
  auto rc = parse_expr("R(p,i,j,k)*R(q,i,j,k)");
  CHECK(rc.rank() == 2);
  CHECK(parse_expr("h(a,b)") == parse_expr("h(b,a)"));
  CHECK(parse_expr("J(a,b)", "ba") == -parse_expr("J(a,b)"));
  CHECK(parse_expr("J(a,i)*J(i,b)") == -parse_expr("g(a,b)"));
  CHECK(parse_expr("g(i,i)") == TensorExpr::scalar(Poly(2L) * Poly::var(Var::m)));
  CHECK(parse_expr("h(a,b) - h(b,a)").is_zero());
}

TEST_CASE("scalars and arithmetic") {
  auto e = parse_expr("(m+1)^2*c/2*h(a,b) \xE2\x88\x92 c*h(a,b)");
  Poly m = Poly::var(Var::m), c = Poly::var(Var::c);
  Poly want = (m + Poly(1L)).pow(2) * c * Poly(Rational(1, 2)) - c;
  CHECK(e == want * parse_expr("h(a,b)"));
  Env env;
  env.scalars["lam"] = Poly(3L);
  CHECK(parse_expr("lam*h(a,b)", env) == Poly(3L) * parse_expr("h(a,b)"));
}

TEST_CASE("derivatives") {
  auto div = parse_expr("D_i(h(i,x))");
  CHECK(div.rank() == 1);
  CHECK(parse_expr("D_a(D_b(h(x,y)))") == parse_expr("D_a D_b h(x,y)"));
  CHECK(parse_expr("D_i(h(a,b)*h(a,b))") == parse_expr("2*D_i(h(a,b))*h(a,b)"));
  CHECK(parse_expr("D_i(g(a,b)*R(a,b,c,d))").is_zero());
  Env env;
  env.tensors["T"] = parse_expr("h(a,i)*h(i,b)");
  CHECK(parse_expr("T(x,x)", env) == parse_expr("h(a,b)*h(a,b)"));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(parse_expr("h(a,b,c)"), ParseError);
  CHECK_THROWS_AS(parse_expr("h(a,a)*h(a,b)"), ParseError);
  CHECK_THROWS_AS(parse_expr("h(a,b) + h(a,c)"), ParseError);
  CHECK_THROWS_AS(parse_expr("h(a,b"), ParseError);
  CHECK_THROWS_AS(parse_expr("q(a)"), ParseError);
  CHECK_THROWS_AS(parse_expr("h(a,b) $"), ParseError);
  try {
    parse_expr("h(a,b) + * h(a,b)");
  } catch (const ParseError& e) {
    CHECK(e.position == 9);
  }
}
