#include <doctest.h>

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "kahler/error.hpp"
#include "kahler/torus.hpp"

using namespace kahler;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

FourierTensorField single_mode(int m, int rank, const Mode& xi, const std::vector<Complex>& c) {
  FourierTensorField f(m, rank);
  f.set_mode(xi, c);
  return f;
}

}  // namespace

TEST_CASE("laplacian symbol") {
  Mode xi{1, -2};
  auto f = single_mode(1, 0, xi, {Complex(0.5, 0.25)});
  auto g = apply_operator(TorusOp::DstarD, f);
  const double k2 = 4 * std::numbers::pi * std::numbers::pi * 5;
  CHECK(std::abs((*g.find(xi))[0] - k2 * Complex(0.5, 0.25)) < 1e-12);
  CHECK(g.reality_defect() < 1e-14);
}

TEST_CASE("trace of the metric") {
  for (int m = 1; m <= 3; ++m) {
    auto tr = apply_operator(TorusOp::trace, metric_field(m));
    CHECK((*tr.find(Mode(2 * m, 0)))[0].real() == doctest::Approx(2.0 * m));
  }
}

TEST_CASE("rank errors") {
  FourierTensorField f(1, 1);
  CHECK_THROWS_AS(apply_operator(TorusOp::trace, f), RankError);
  CHECK_THROWS_AS(apply_operator(TorusOp::dD, f), RankError);
  CHECK_THROWS_AS(apply_operator(TorusOp::delta_g, FourierTensorField(1, 0)), RankError);
}

TEST_CASE("adjointness") {
  for (int m = 1; m <= 2; ++m)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto r = measure_adjointness({m, 4}, seed);
      CHECK(r.delta_g < 1e-10);
      CHECK(r.d_star < 1e-10);
      CHECK(r.sigma == 1);
      CHECK(r.dD_plus < 1e-10);
    }
}

TEST_CASE("parseval") {
  for (int m = 1; m <= 2; ++m)
    for (int rank = 0; rank <= 2; ++rank) {
      auto f = random_field({m, 4}, rank, 21 + rank);
      CHECK(rel(norm_sq(f), grid_norm_sq(f, 4)) < 1e-10);
    }
}

TEST_CASE("one-form identities") {
  for (int m = 1; m <= 2; ++m)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto w = random_field({m, 4}, 1, seed);
      auto r = one_form_identities(w);
      CHECK(r.killing_split < 1e-10);
      CHECK(r.weitzenbock < 1e-10);
      CHECK(r.gauge_identity > 1e-3);
      CHECK_FALSE(r.harmonic);
      CHECK_FALSE(r.parallel);
    }
  FourierTensorField c(2, 1);
  c.set_mode(Mode(4, 0), {1.0, -2.0, 0.5, 3.0});
  auto r = one_form_identities(c);
  CHECK(r.killing_split == 0);
  CHECK(r.gauge_identity == 0);
  CHECK(r.harmonic);
  CHECK(r.parallel);
  CHECK(r.constant);
  auto pure = one_form_identities(single_mode(1, 1, {0, 1}, {1.0, 0.0}));
  CHECK_FALSE(pure.harmonic);
  CHECK_FALSE(pure.constant);
}

TEST_CASE("potential variations") {
  auto cosine = single_mode(1, 0, {1, 0}, {0.5});
  auto h = kaehler_variation_from_potential(cosine);
  auto r = potential_residuals(h);
  CHECK(r.j_invariance == 0);
  CHECK(r.trace_divergence < 1e-10);
  CHECK(norm(h) > 1);
  for (int m = 1; m <= 2; ++m) {
    auto phi = random_field({m, 4}, 0, 8, {50, false, false});
    auto p = potential_residuals(kaehler_variation_from_potential(phi));
    CHECK(p.j_invariance < 1e-12);
    CHECK(p.trace_divergence < 1e-10);
  }
  FourierTensorField constant(2, 0);
  constant.set_mode(Mode(4, 0), {3.0});
  CHECK(norm(kaehler_variation_from_potential(constant)) == 0);
}

TEST_CASE("projection") {
  for (int m = 1; m <= 3; ++m)
    for (bool j : {false, true}) {
      auto h = project_tt_j(random_field({m, 3}, 2, 4, {30, true, true}), j);
      CHECK(tt_j_defect(h, j) < 1e-12 * std::max(1.0, norm(h)));
      CHECK(norm(h - project_tt_j(h, j)) <= 1e-12 * std::max(1.0, norm(h)));
      CHECK(h.reality_defect() < 1e-12);
      // Nonconstant modes survive only when the complement of span{xi, J xi} carries them.
      const bool survives = j ? m >= 3 : m >= 2;
      CHECK(h.only_constant_mode(1e-9) != survives);
    }
}

TEST_CASE("flat Hessian") {
  Mode xi{0, 0, 1, 0, 0, 0};
  auto raw = single_mode(3, 2, xi, std::vector<Complex>(36, 0.0));
  auto h = project_tt_j(random_field({3, 1}, 2, 2, {3, false, true}), true);
  auto r = hessian_flat_check(h);
  CHECK(r.closed_form > 0);
  CHECK(rel(r.assembled, r.closed_form) < 1e-9);
  auto zero = hessian_flat_check(raw);
  CHECK(zero.assembled == 0);
  CHECK(zero.closed_form == 0);
  for (int m = 2; m <= 3; ++m) {
    auto tt = project_tt_j(random_field({m, 4}, 2, 6, {50, false, true}), false);
    auto q = hessian_flat_check(tt);
    CHECK(rel(q.assembled, q.closed_form) < 1e-9);
  }
}

TEST_CASE("single mode Hessian") {
  // Symmetric trace-free J-invariant coefficient killing xi = e_3 and J e_3.
  Mode xi{0, 0, 0, 0, 1, 0};
  std::vector<Complex> c(36, 0.0);
  c[0 * 6 + 0] = c[1 * 6 + 1] = 1.0;
  c[2 * 6 + 2] = c[3 * 6 + 3] = -1.0;
  auto h = single_mode(3, 2, xi, c);
  CHECK(tt_j_defect(h) == 0);
  auto r = hessian_flat_check(h);
  const double k2 = 4 * std::numbers::pi * std::numbers::pi;
  CHECK(rel(r.closed_form, 2 * k2 * k2 * norm_sq(h)) < 1e-12);
  CHECK(rel(r.assembled, r.closed_form) < 1e-12);
}

TEST_CASE("json snapshot round trip") {
  auto f = random_field({1, 2}, 2, 3, {5, true, true});
  auto g = FourierTensorField::from_json(f.to_json());
  CHECK(norm(f - g) == 0);
  CHECK(f.to_json().dump() == g.to_json().dump());
}
