#include <doctest.h>

#include <cmath>

#include "kahler/error.hpp"
#include "kahler/jets.hpp"
#include "kahler/variation.hpp"

using namespace kahler;

namespace {

const SpaceFormModel kSym = SpaceFormModel::symbolic();

double max_abs(const std::vector<double>& v) {
  double r = 0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

}  // namespace

TEST_CASE("constraints hold on every ordering") {
  for (auto cs : {ConstraintSet::tt(), ConstraintSet::kahler_tt()})
    for (int m = 1; m <= 3; ++m)
      for (double c : {1.0, -1.0, 0.0}) {
        auto jets = RandomJet::generate(m, c, 4, JetConstraints::from(cs), 3);
        CHECK(jets.constraint_residual() < 1e-12);
      }
  JetConstraints closed;
  closed.kahler_closed = true;
  CHECK(RandomJet::generate(3, 1.0, 3, closed, 1).constraint_residual() < 1e-12);
}

TEST_CASE("seeded and reproducible") {
  auto a = RandomJet::generate(2, 1.0, 3, {}, 17);
  auto b = RandomJet::generate(2, 1.0, 3, {}, 17);
  auto c = RandomJet::generate(2, 1.0, 3, {}, 18);
  CHECK(a.ordered(3) == b.ordered(3));
  CHECK(a.sym(0) != c.sym(0));
}

TEST_CASE("ordered jets obey the Ricci identity") {
  auto jets = RandomJet::generate(2, -1.0, 2, JetConstraints::from(ConstraintSet::tt()), 4);
  SpaceFormModel model(2, Rational(-1));
  auto lhs = vexpr(model, "D_a(D_b(h(x,y))) - D_b(D_a(h(x,y)))", "abxy");
  auto rhs = vexpr(model, "R(a,b,x,l)*h(l,y) + R(a,b,y,l)*h(x,l)", "abxy");
  auto l = random_jet_tensor(lhs, jets);
  CHECK(max_abs(l) > 1e-3);
  CHECK(max_diff(l, random_jet_tensor(rhs, jets)) < 1e-12);
}

TEST_CASE("trace and curvature norm") {
  auto jets = RandomJet::generate(2, 1.0, 2, {}, 9);
  CHECK(std::abs(random_jet_eval(parse_expr("h(i,i)"), jets)) < 1e-12);
  CHECK(random_jet_eval(parse_expr("R(a,b,c,d)*R(a,b,c,d)"), jets) == doctest::Approx(192.0).epsilon(1e-12));
}

TEST_CASE("simplification preserves values") {
  const char* const exprs[] = {
      "D_i(D_j(h(k,l)))*D_j(D_i(h(k,l)))",
      "R(i,j,k,l)*h(i,k)*h(j,l)",
      "D_i(D_i(D_j(h(k,l))))*D_j(h(k,n))*h(n,l)",
      "J(a,b)*D_a(h(c,d))*D_b(h(c,d))",
      "D_a(D_b(h(c,c)))*h(a,b) + R(a,b,a,c)*h(b,d)*h(c,d)",
  };
  for (int m = 1; m <= 3; ++m)
    for (double c : {1.0, -1.0}) {
      SpaceFormModel model(m, Rational(static_cast<long>(c)));
      for (auto cs : {ConstraintSet::tt(), ConstraintSet::kahler_tt()})
        for (const char* text : exprs) {
          auto e = parse_expr(text, {}, {}, cs.j_invariant);
          auto s = simplify(e, model, cs);
          for (int seed = 0; seed < 10; ++seed) {
            auto jets = RandomJet::generate(m, c, 4, JetConstraints::from(cs), seed);
            const double a = random_jet_eval(e, jets), b = random_jet_eval(s, jets);
            CHECK(std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}));
          }
        }
    }
}

TEST_CASE("lemma residuals vanish numerically") {
  for (int m = 1; m <= 3; ++m)
    for (double c : {1.0, -1.0}) {
      SpaceFormModel model(m, Rational(static_cast<long>(c)));
      auto jets = RandomJet::generate(m, c, 2, JetConstraints::from(ConstraintSet::tt()), 5);
      auto l1 = vexpr(model, "rbar(x,y) - 1/2*L(x,y) - lam*h(x,y)", "xy");
      auto l2 = vexpr(model, "ddD(x,y) - 2*L(x,y) - 2*lam*h(x,y) + 2*Ro(x,y)", "xy");
      CHECK(max_abs(random_jet_tensor(l1, jets)) < 1e-10);
      CHECK(max_abs(random_jet_tensor(l2, jets)) < 1e-10);
      auto wrong = vexpr(model, "ddD(x,y) - 2*L(x,y) - 2*lam*h(x,y)", "xy");
      if (m > 1) CHECK(max_abs(random_jet_tensor(wrong, jets)) > 1e-3);
    }
}

TEST_CASE("numeric divergence matches the witness") {
  const auto cs = ConstraintSet::kahler_tt();
  auto r = reduce_mod_divergence(s_pairing(kSym), kSym, cs);
  for (int m = 2; m <= 3; ++m) {
    auto v = r.witness_field(m);
    VarValues vals;
    vals.set(Var::m, m);
    auto nf = r.normal_form.specialize(vals);
    for (int seed = 0; seed < 5; ++seed) {
      auto jets = RandomJet::generate(m, 1.0, 4, JetConstraints::from(cs), seed);
      const double e = random_jet_eval(s_pairing(kSym), jets);
      const double rest = random_jet_eval(nf, jets) + random_jet_divergence(v, jets);
      CHECK(std::abs(e - rest) <= 1e-9 * std::max(1.0, std::abs(e)));
    }
  }
}

TEST_CASE("errors") {
  auto jets = RandomJet::generate(1, 1.0, 1, {}, 0);
  CHECK_THROWS_AS(random_jet_eval(parse_expr("D_a(D_b(h(a,b)))"), jets), Error);
  CHECK_THROWS_AS(random_jet_eval(parse_expr("h(x,y)", "xy"), jets), RankError);
  CHECK_THROWS_AS(random_jet_eval(parse_expr("w(a)*w(a)"), jets), Error);
  CHECK_THROWS_AS(RandomJet::generate(0, 1.0, 1, {}, 0), Error);
}
