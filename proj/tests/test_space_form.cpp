#include <doctest.h>

#include "kahler/kernel.hpp"
#include "kahler/parser.hpp"
#include "kahler/space_form.hpp"

using namespace kahler;

namespace {

std::vector<BasisIndex> frame(int m) {
  std::vector<BasisIndex> out;
  for (int p = 0; p < 2 * m; ++p) out.push_back(basis_at(p));
  return out;
}

}  // namespace

TEST_CASE("table entries") {
  SpaceFormModel model(3, Rational(1));
  BasisIndex e1{1, false}, je1{1, true}, e2{2, false}, je2{2, true}, e3{3, false};
  CHECK(curvature_component(model, e1, je1, e1, je1) == Poly(4L));
  CHECK(curvature_component(model, e1, je1, e2, je2) == Poly(2L));
  CHECK(curvature_component(model, e1, e2, e1, e2) == Poly(1L));
  CHECK(curvature_component(model, e2, e1, e2, e1) == Poly(1L));
  CHECK(curvature_component(model, e1, e2, e3, e1) == Poly());
  CHECK(curvature_component(model, e1, e2, je1, je2) == Poly(1L));
  SpaceFormModel sym(2, std::nullopt);
  CHECK(curvature_component(sym, e1, je1, e1, je1) == Poly(4L) * Poly::var(Var::c));
}

TEST_CASE("table symmetries, exhaustive for m <= 3") {
  for (int m = 1; m <= 3; ++m) {
    SpaceFormModel model(m, Rational(1));
    auto f = frame(m);
    auto R = [&](BasisIndex a, BasisIndex b, BasisIndex x, BasisIndex y) {
      return curvature_component(model, a, b, x, y).constant();
    };
    auto J = [&](BasisIndex a) { return apply_j(a); };
    for (auto a : f)
      for (auto b : f)
        for (auto x : f)
          for (auto y : f) {
            Rational v = R(a, b, x, y);
            CHECK(v == -R(b, a, x, y));
            CHECK(v == -R(a, b, y, x));
            CHECK(v == R(x, y, a, b));
            CHECK(v + R(b, x, a, y) + R(x, a, b, y) == 0);
            auto ja = J(a), jb = J(b);
            CHECK(v == ja.sign * jb.sign * R(ja.b, jb.b, x, y));
          }
  }
}

TEST_CASE("closed form agrees with the table for m = 1..4") {
  for (int m = 1; m <= 4; ++m) {
    SpaceFormModel model(m, std::nullopt);
    TensorExpr cf = curvature_closed_form(model);
    auto f = frame(m);
    int mismatches = 0;
    for (auto a : f)
      for (auto b : f)
        for (auto x : f)
          for (auto y : f)
            if (!(evaluate_on_frame(cf, {a, b, x, y}) == curvature_component(model, a, b, x, y))) ++mismatches;
    CHECK(mismatches == 0);
  }
  SpaceFormModel flat(2, Rational(0));
  CHECK(curvature_closed_form(flat).is_zero());
}

TEST_CASE("derived constants") {
  auto sym = SpaceFormModel::symbolic();
  Poly m = Poly::var(Var::m), c = Poly::var(Var::c);
  CHECK(ricci_contraction(sym) == einstein_constant(sym) * parse_expr("g(a,b)"));
  CHECK(full_contraction(sym) == TensorExpr::scalar(curvature_norm_sq(sym)));
  CHECK(rcheck_tensor(sym) == Poly(16L) * (m + Poly(1L)) * c * c * parse_expr("g(p,q)"));
  CHECK(einstein_constant(SpaceFormModel(1, Rational(1))) == Poly(4L));
  CHECK(einstein_constant(SpaceFormModel(2, Rational(-1))) == Poly(-6L));
  CHECK(curvature_norm_sq(SpaceFormModel(1, Rational(1))) == Poly(64L));
  CHECK(curvature_norm_sq(SpaceFormModel(2, Rational(1))) == Poly(192L));
  CHECK(rcheck_tensor(SpaceFormModel(1, Rational(1))) == Poly(32L) * parse_expr("g(p,q)"));
  CHECK(rcheck_tensor(SpaceFormModel(2, Rational(1))) == Poly(48L) * parse_expr("g(p,q)"));
  CHECK(rcheck_tensor(SpaceFormModel(2, Rational(0))).is_zero());
}

TEST_CASE("float arrays") {
  auto R = curvature_array(2, 0.5);
  auto J = complex_structure_matrix(2);
  const int n = 4;
  CHECK(R[((0 * n + 1) * n + 0) * n + 1] == doctest::Approx(2.0));
  CHECK(J[1 * n + 0] == 1.0);
  CHECK(J[0 * n + 1] == -1.0);
}
