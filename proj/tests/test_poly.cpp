#include "doctest.h"
#include "kahler/poly.hpp"
#include "kahler/ratfunc.hpp"

using namespace kahler;

TEST_CASE("poly arithmetic is exact") {
  Poly m = Poly::var(Var::m), c = Poly::var(Var::c);
  Poly lhs = (m + Poly(1L)) * (m - Poly(1L));
  CHECK(lhs == m * m - Poly(1L));
  CHECK((Poly(Rational(1, 3)) * Poly(3L)) == Poly(1L));
  CHECK((c * c * m).str() == "m*c^2");
  CHECK(Poly(Rational(-1, 2)).str() == "-1/2");
}

TEST_CASE("poly evaluation and substitution") {
  Poly m = Poly::var(Var::m), c = Poly::var(Var::c);
  Poly lam = Poly(2L) * (m + Poly(1L)) * c;
  VarValues v;
  v.set(Var::m, 2).set(Var::c, -1);
  CHECK(lam.eval(v) == -6);
  CHECK(lam.substitute(Var::c, 0).is_zero());
  CHECK(lam.coeff(Var::c, 1) == Poly(2L) * (m + Poly(1L)));
  CHECK(lam.degree(Var::m) == 1);
  CHECK_THROWS(lam.eval(VarValues{}));
}

TEST_CASE("univariate gcd and rational functions") {
  UPoly m = UPoly::from_poly(Poly::var(Var::m));
  UPoly one(Rational(1));
  UPoly a = (m - one) * (m + one), b = (m - one) * m;
  CHECK(UPoly::gcd(a, b) == m - one);
  RatFunc q(a, b);
  CHECK(q.num() == m + one);
  CHECK(q.den() == m);
  CHECK(q.eval(2) == Rational(3, 2));
  CHECK((q * RatFunc(m, one)).is_polynomial());
  CHECK((q - q).is_zero());
}
