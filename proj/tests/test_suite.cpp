#include <doctest.h>

#include <algorithm>

#include "kahler/error.hpp"
#include "kahler/suite.hpp"

using namespace kahler;

namespace {

RunConfig small() {
  RunConfig cfg;
  cfg.m_values = {2};
  cfg.c_values = {1};
  cfg.p_values = {2};
  cfg.jets = 5;
  return cfg;
}

bool listed(const std::string& line) {
  for (const auto& e : list_identities())
    if (e.name + ": " + e.description == line) return true;
  return false;
}

}  // namespace

TEST_CASE("catalog") {
  CHECK(list_identities().size() == 21);
  CHECK(listed("lemma3: δ^D W identity (mod divergence)"));
  CHECK(listed("criticality: ∇𝓡_p = 0 at space forms"));
  for (const auto& e : list_identities()) CHECK_FALSE(e.anchor.empty());
}

TEST_CASE("config validation") {
  CHECK(RunConfig{}.validate().empty());
  RunConfig bad;
  bad.m_values = {0};
  bad.p_values = {Rational(3, 2)};
  bad.modes = 0;
  bad.tol_num = 0;
  bad.format = "xml";
  bad.identities = {"nope"};
  auto errs = bad.validate();
  CHECK(errs.size() == 6);
  CHECK(errs.front().rfind("m:", 0) == 0);
  CHECK_THROWS_AS(run_suite(bad), Error);
  CHECK_THROWS_AS(run_identity("nope", small()), Error);
}

TEST_CASE("lemma suite passes") {
  RunConfig cfg = small();
  cfg.identities = {"lemma2", "lemma1"};
  auto rep = run_suite(cfg);
  REQUIRE(rep.results.size() == 2);
  CHECK(rep.results[0].name == "lemma1");
  for (const auto& r : rep.results) {
    CHECK(r.status == Status::pass);
    CHECK(r.witness.empty());
  }
  CHECK(rep.exit_code() == 0);
}

TEST_CASE("hessian report rows") {
  auto r = run_identity("hessian", small());
  CHECK(r.status == Status::expected_mismatch);
  auto d = std::find_if(r.rows.begin(), r.rows.end(), [](const ComparisonRow& x) { return x.quantity == "d"; });
  REQUIRE(d != r.rows.end());
  CHECK_FALSE(d->match);
  CHECK(d->allowlist == "hessian_d");
  CHECK(d->derived == "16*m*c^2 + 32*c^2");
  REQUIRE(d->oracle_agreement);
  CHECK(*d->oracle_agreement);
  CHECK(r.details["m1_c1"]["derived_d"] == "48");
  CHECK(r.details["m1_c1"]["printed_d"] == "36");
}

TEST_CASE("every mismatch is allowlisted and every failure has a witness") {
  RunConfig cfg = small();
  cfg.identities = {"r_q", "hessian_consistency", "stability", "torus_hessian"};
  auto rep = run_suite(cfg);
  for (const auto& r : rep.results) {
    CHECK(r.status != Status::fail);
    for (const auto& row : r.rows)
      if (!row.match) CHECK_FALSE(row.allowlist.empty());
  }
  IdentityResult forced;
  forced.name = "x";
  forced.status = Status::fail;
  forced.witness = "w";
  VerificationReport fail;
  fail.results = {forced};
  CHECK(fail.exit_code() == 1);
}

TEST_CASE("report json") {
  RunConfig cfg = small();
  cfg.identities = {"constants", "torus_potential"};
  auto a = run_suite(cfg), b = run_suite(cfg);
  CHECK(a.to_json(false).dump() == b.to_json(false).dump());
  auto j = a.to_json();
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j.contains("timing_seconds"));
  CHECK_FALSE(a.to_json(false).contains("timing_seconds"));
  CHECK_FALSE(a.to_json(false)["identities"][0].contains("timing_seconds"));
  CHECK(j["summary"]["pass"] == 2);
  CHECK(j["environment"].contains("gmp"));
  CHECK(a.table().find("constants") != std::string::npos);
}

TEST_CASE("curvature action records the J-invariance dependence") {
  auto r = run_identity("curvature_action", small());
  CHECK(r.status == Status::pass);
  CHECK(r.details["j_invariance_needed"] == true);
  CHECK(r.details["without_j_invariance"] == "3*c*h(Ja,Jb) - c*h(a,b)");
}
