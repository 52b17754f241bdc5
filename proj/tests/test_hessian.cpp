#include <doctest.h>

#include <cmath>
#include <random>

#include "kahler/error.hpp"
#include "kahler/hessian.hpp"
#include "kahler/variation.hpp"

using namespace kahler;

namespace {

const SpaceFormModel kSym = SpaceFormModel::symbolic();
const Poly kC = Poly::var(Var::c);
const Poly kM = Poly::var(Var::m);

QuadraticFormCoeffs derived() {
  static const QuadraticFormCoeffs q =
      extract_coeffs(reduce_mod_divergence(hessian_integrand(kSym), kSym, ConstraintSet::kahler_tt()).normal_form);
  return q;
}

Rational at(const Poly& p, int m, const Rational& c) {
  VarValues v;
  v.set(Var::m, m).set(Var::c, c);
  return p.eval(v);
}

}  // namespace

TEST_CASE("coefficients") {
  auto q = derived();
  CHECK(q.a == Poly(1L));
  CHECK(q.b == Poly(2L) * kC * (kM - Poly(3L)));
  CHECK(q.d == (Poly(16L) * kM + Poly(32L)) * kC * kC);
}

TEST_CASE("flat limit") {
  auto q = derived();
  CHECK(at(q.b, 3, 0) == 0);
  CHECK(at(q.d, 3, 0) == 0);
  auto k = stability_constant(q, 3, Rational(0), Rational(2));
  CHECK(k.prefactor == doctest::Approx(2.0));
  CHECK(k.k == 0.0);
}

TEST_CASE("unexpected monomial class") {
  auto e = vexpr(kSym, "h(i,j)*D_i(D_j(h(k,k)))", "", true);
  CHECK_THROWS_AS(extract_coeffs(e), Error);
}

TEST_CASE("positive constant on the grid") {
  auto q = derived();
  for (int m = 1; m <= 5; ++m)
    for (int c : {1, -1, 2, -2})
      for (int p : {2, 3, 4}) {
        auto k = stability_constant(q, m, Rational(c), Rational(p));
        CHECK(k.k > 0);
        if (k.exact) CHECK(k.exact->value() == doctest::Approx(k.k).epsilon(1e-12));
        CHECK(k.interior == (at(q.b, m, c) < 0));
      }
}

TEST_CASE("boundary minimum when the cross term is nonnegative") {
  auto q = derived();
  auto k = stability_constant(q, 4, Rational(1), Rational(2));
  CHECK_FALSE(k.interior);
  CHECK(k.bracket_min == at(q.d, 4, 1));
  CHECK(k.k == doctest::Approx(2.0 * 96));
}

TEST_CASE("interior minimum") {
  auto q = derived();
  // m = 1, c = 1: b = -4, d = 48, minimum at t = 2.
  auto k = stability_constant(q, 1, Rational(1), Rational(2));
  CHECK(k.interior);
  CHECK(k.t_star == 2);
  CHECK(k.bracket_min == 44);
}

TEST_CASE("radical prefactor") {
  auto q = derived();
  // m = 2, c = -1, p = 3: prefactor 3 * 192^(1/2) = 24 sqrt 3.
  auto k = stability_constant(q, 2, Rational(-1), Rational(3));
  REQUIRE(k.exact);
  CHECK(k.exact->radicand == 3);
  CHECK(k.exact->coeff == 24 * at(q.d, 2, -1));
  CHECK(hessian_prefactor(2, -1.0, 3.0) == doctest::Approx(3.0 * std::sqrt(192.0)));
}

TEST_CASE("random admissible triples") {
  auto q = derived();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int m = 1; m <= 5; ++m)
    for (double c : {1.0, -1.0, 2.0, -2.0}) {
      auto k = stability_constant(q, m, Rational(static_cast<long>(c)), 2.0);
      const double b = at(q.b, m, Rational(static_cast<long>(c))).get_d();
      const double d = at(q.d, m, Rational(static_cast<long>(c))).get_d();
      for (int i = 0; i < 1000; ++i) {
        const double h2 = 0.01 + u(rng), g2 = 10 * u(rng);
        const double l2 = g2 * g2 / h2 * (1 + 3 * u(rng));
        const double H = k.prefactor * (l2 + b * g2 + d * h2);
        CHECK(H >= k.k * h2 * (1 - 1e-12));
      }
    }
}

TEST_CASE("criticality") {
  auto r = criticality_check(kSym);
  CHECK(r.zero);
  CHECK(r.divergence_term.is_zero());
  CHECK(r.rcheck_proportional);
  CHECK(r.total.is_zero());
  REQUIRE(r.cancellation.size() == 4);
  for (int m = 1; m <= 5; ++m)
    for (double c : {1.0, -1.0, 2.0, -2.0})
      for (double p : {2.0, 3.0, 4.0}) CHECK(std::abs(criticality_residual(m, c, p)) < 1e-12);
}
