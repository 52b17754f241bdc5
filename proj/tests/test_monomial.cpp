#include "doctest.h"
#include "kahler/tensor_expr.hpp"

using namespace kahler;

namespace {

RawTerm term(Poly c, std::vector<RawFactor> fs) { return RawTerm{std::move(c), std::move(fs)}; }
RawFactor h(int a, int b) { return RawFactor::jet(FactorType::h(0), {a, b}); }

}  // namespace

TEST_CASE("h is symmetric") {
  RawExpr e{{1, 2}, {term(1L, {h(1, 2)}), term(-1L, {h(2, 1)})}};
  CHECK(TensorExpr::from_raw(e).is_zero());
}

TEST_CASE("J squares to minus the identity") {
  RawExpr e{{1, 2}, {term(1L, {RawFactor::J(1, 9), RawFactor::J(9, 2)})}};
  RawExpr g{{1, 2}, {term(-1L, {RawFactor::g(1, 2)})}};
  CHECK(TensorExpr::from_raw(e) == TensorExpr::from_raw(g));
}

TEST_CASE("metric and J traces") {
  RawExpr tr{{}, {term(1L, {RawFactor::g(5, 5)})}};
  CHECK(TensorExpr::from_raw(tr) == TensorExpr::scalar(Poly(2L) * Poly::var(Var::m)));
  RawExpr trj{{}, {term(1L, {RawFactor::J(5, 5)})}};
  CHECK(TensorExpr::from_raw(trj).is_zero());
  RawExpr trjj{{}, {term(1L, {RawFactor::J(5, 6), RawFactor::J(6, 5)})}};
  CHECK(TensorExpr::from_raw(trjj) == TensorExpr::scalar(Poly(-2L) * Poly::var(Var::m)));
}

TEST_CASE("curvature antisymmetry and pair symmetry") {
  RawExpr e{{1, 2}, {term(1L, {RawFactor::R(1, 2, 5, 6), h(5, 6)})}};
  CHECK(TensorExpr::from_raw(e).is_zero());
  RawExpr f{{1, 2, 3, 4}, {term(1L, {RawFactor::R(1, 2, 3, 4)}), term(-1L, {RawFactor::R(3, 4, 1, 2)})}};
  CHECK(TensorExpr::from_raw(f).is_zero());
  RawExpr s{{1, 2, 3, 4}, {term(1L, {RawFactor::R(1, 2, 3, 4)}), term(1L, {RawFactor::R(2, 1, 3, 4)})}};
  CHECK(TensorExpr::from_raw(s).is_zero());
}

TEST_CASE("J moves across a contraction with a sign") {
  // h(a, Ji) h(i, b) = -h(a, i) h(Ji, b)
  RawExpr x{{1, 2}, {term(1L, {h(1, 7), RawFactor::J(8, 7), h(8, 2)})}};
  RawExpr y{{1, 2}, {term(1L, {h(1, 8), RawFactor::J(8, 7), h(7, 2)})}};
  auto ex = TensorExpr::from_raw(x), ey = TensorExpr::from_raw(y);
  CHECK(ex.size() == 1);
  CHECK((ex + ey).is_zero());
}

TEST_CASE("J-invariance lets tokens cross the two slots of h") {
  // h(Ji, Jj) h(i, j) equals |h|^2 only for J-invariant h
  RawExpr x{{}, {term(1L, {RawFactor::J(1, 3), RawFactor::J(2, 4), h(3, 4), h(1, 2)})}};
  RawExpr y{{}, {term(1L, {h(1, 2), h(1, 2)})}};
  CHECK(!(TensorExpr::from_raw(x) == TensorExpr::from_raw(y)));
  CHECK(TensorExpr::from_raw(x, true) == TensorExpr::from_raw(y, true));
  // J(i,j) h(i,j) vanishes for symmetric h regardless
  RawExpr z{{}, {term(1L, {RawFactor::J(1, 2), h(1, 2)})}};
  CHECK(TensorExpr::from_raw(z).is_zero());
}

TEST_CASE("canonical form is independent of factor order and dummy names") {
  FactorType d2 = FactorType::h(2, false);
  RawExpr x{{1, 8}, {term(1L, {RawFactor::jet(d2, {5, 6, 1, 7}), h(5, 7), RawFactor::R(6, 8, 9, 10), h(9, 10)})}};
  RawExpr y = x;
  std::reverse(y.terms[0].factors.begin(), y.terms[0].factors.end());
  for (auto& f : y.terms[0].factors)
    for (auto& l : f.labels)
      if (l != 1 && l != 8) l += 100;
  CHECK(TensorExpr::from_raw(x) == TensorExpr::from_raw(y));
}

TEST_CASE("graph round trip") {
  RawExpr x{{1, 2}, {term(3L, {RawFactor::J(1, 7), h(7, 8), RawFactor::J(8, 9), h(9, 2)})}};
  auto e = TensorExpr::from_raw(x);
  LabelGen gen;
  auto back = TensorExpr::from_raw(e.to_raw({1, 2}, gen));
  CHECK(back == e);
  RawExpr free_pair{{1, 2}, {term(1L, {RawFactor::J(1, 2)})}};
  auto fp = TensorExpr::from_raw(free_pair);
  CHECK(TensorExpr::from_raw(fp.to_raw({1, 2}, gen)) == fp);
  RawExpr swapped{{1, 2}, {term(-1L, {RawFactor::J(2, 1)})}};
  CHECK(TensorExpr::from_raw(swapped) == fp);
}
