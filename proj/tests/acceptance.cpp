// Acceptance run: one line per criterion, exit 0 iff every failure is a
// known red listed below and every known red still fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "kahler/hessian.hpp"
#include "kahler/space_form.hpp"
#include "kahler/suite.hpp"
#include "kahler/variation.hpp"

using namespace kahler;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool ok = false;
  std::string note;
};

// Criteria whose printed target is contradicted by the derivation.
const std::map<int, std::string> kExpectedRed{
    {6, "printed (S,h) = c|Dh|^2 + 6c^2|h|^2; derived c|Dh|^2 modulo divergence, confirmed by the float oracle"},
    {7, "printed k(2c)/k(c) = 2^(2(p-1)); k is homogeneous of degree p in |c|, so the ratio is 2^p (equal only at p = 2)"},
};

const RunConfig kCfg{};
std::map<std::string, IdentityResult> g_results;

const IdentityResult& result(const std::string& name) {
  auto it = g_results.find(name);
  if (it == g_results.end()) it = g_results.emplace(name, run_identity(name, kCfg)).first;
  return it->second;
}

bool passed(const std::string& name, bool allow_expected = false) {
  const auto s = result(name).status;
  return s == Status::pass || (allow_expected && s == Status::expected_mismatch);
}

const ComparisonRow* row(const std::string& identity, const std::string& quantity) {
  for (const auto& r : result(identity).rows)
    if (r.quantity == quantity) return &r;
  return nullptr;
}

const Check* check(const std::string& identity, const std::string& prefix) {
  for (const auto& c : result(identity).checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  int bad = 0;
  for (int m = 1; m <= 4; ++m) bad += table_mismatches(m);
  const double t = since(t0);
  return {bad == 0 && t < 1.0, std::to_string(bad) + " mismatching components, " + secs(t)};
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  const auto sym = SpaceFormModel::symbolic();
  const Poly m = Poly::var(Var::m), c = Poly::var(Var::c);
  const bool lam = ricci_contraction(sym) == einstein_constant(sym) * parse_expr("g(a,b)") &&
                   einstein_constant(sym) == Poly(2L) * (m + Poly(1L)) * c;
  const bool norm = full_contraction(sym) == TensorExpr::scalar(curvature_norm_sq(sym)) &&
                    curvature_norm_sq(sym) == Poly(32L) * m * (m + Poly(1L)) * c * c;
  const double t = since(t0);
  return {lam && norm && t < 1.0, "λ " + std::string(lam ? "ok" : "wrong") + ", |R|^2 " + (norm ? "ok" : "wrong") + ", " + secs(t)};
}

Verdict criterion3() {
  const auto& r = result("curvature_action");
  const bool needed = r.details.value("j_invariance_needed", false);
  return {passed("curvature_action"), std::string("J-invariance ") + (needed ? "needed" : "not needed")};
}

Verdict criterion4() {
  const auto t0 = Clock::now();
  auto rep = criticality_check(SpaceFormModel::symbolic());
  const double t = since(t0);
  const Poly p = Poly::var(Var::p), u = Poly::var(Var::u), half(Rational(1, 2));
  const bool shape = rep.cancellation == std::vector<Poly>{-(p * u), half, p * u, -half};
  return {rep.zero && shape && passed("criticality") && t < 1.0,
          "-p/n + 1/2 + p/n - 1/2 " + std::string(shape ? "exhibited" : "missing") + ", " + secs(t)};
}

Verdict criterion5() {
  const auto sym = SpaceFormModel::symbolic();
  const auto t0 = Clock::now();
  bool ok = true;
  for (const auto& t : {lemma1_target(), lemma2_target(), lemma3_target()}) {
    ok = ok && check_identity(sym, t).holds;
    auto f = falsifiability(sym, t);
    ok = ok && f.all_rejected;
    for (const auto& pert : f.perturbed) ok = ok && !pert.residual.is_zero();
  }
  const double t = since(t0);
  const bool suites = passed("lemma1") && passed("lemma2") && passed("lemma3");
  return {ok && suites && t < 30.0, "symbolic " + secs(t) + ", float oracle " + (suites ? "agrees" : "disagrees")};
}

Verdict criterion6() {
  std::string note;
  bool ok = passed("r_q", true) && passed("rcheck_prime", true) && passed("hessian", true) && passed("s_pairing", true);
  auto need = [&](const char* id, const char* q) -> const ComparisonRow* {
    auto r = row(id, q);
    if (!r || !r->oracle_agreement || !*r->oracle_agreement) ok = false;
    return r;
  };
  auto s = need("s_pairing", "(S,h)");
  auto b = need("hessian", "b");
  need("r_q", "r_Q - D*Dh, multiple of h");
  need("rcheck_prime", "<Ř'(h),h>");
  need("hessian", "d");
  auto m1 = check("hessian", "printed d formulas coincide");
  ok = ok && m1 && m1->ok;
  const bool s_match = s && s->match, b_match = b && b->match;
  note = std::string("(S,h) printed ") + (s_match ? "reproduced" : "not reproduced") + ", b " +
         (b_match ? "reproduced" : "not reproduced") + ", derived constants oracle-confirmed" +
         (m1 && m1->ok ? ", d coincidence 36 at m = 1" : "");
  return {ok && s_match && b_match, note};
}

Verdict criterion7() {
  const auto& r = result("stability");
  auto pos = check("stability", "k > 0"), tri = check("stability", "H >= k"), der = check("stability", "k(2c)/k(c) = 2^p");
  auto law = row("stability", "k(2c)/k(c)");
  const bool base = pos && pos->ok && tri && tri->ok && der && der->ok;
  std::string failing;
  for (const auto& s : r.details["scaling"]) {
    const double p = std::stod(s["p"].get<std::string>());
    if (std::abs(s["ratio"].get<double>() - std::pow(2.0, 2 * (p - 1))) > 1e-10 * s["ratio"].get<double>() &&
        failing.find("p=" + s["p"].get<std::string>()) == std::string::npos)
      failing += " p=" + s["p"].get<std::string>();
  }
  return {base && law && law->match,
          std::string("k > 0 and H >= k|h|^2 ") + (base ? "hold" : "fail") + ", stated scaling " +
              (failing.empty() ? "holds" : "fails at" + failing)};
}

Verdict criterion8() {
  const auto t0 = Clock::now();
  bool ok = true;
  for (const char* id : {"torus_operators", "torus_one_forms", "torus_potential", "torus_hessian"})
    ok = ok && run_identity(id, kCfg).status == Status::pass;
  const double t = since(t0);
  return {ok && t < 10.0, secs(t)};
}

Verdict criterion9() {
  const auto t0 = Clock::now();
  auto full = run_suite(kCfg);
  const double t = since(t0);
  VerificationReport seq;
  seq.config = kCfg;
  for (const auto& e : list_identities()) seq.results.push_back(result(e.name));
  const bool same = full.to_json(false).dump() == seq.to_json(false).dump();
  return {same && t < 300.0, std::string("concurrent and sequential reports ") + (same ? "identical" : "differ") +
                                 ", full suite " + secs(t)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"curvature table", criterion1}, {"constants", criterion2},         {"curvature action", criterion3},
      {"criticality", criterion4},     {"lemmas 1-3", criterion5},        {"second-variation chain", criterion6},
      {"stability", criterion7},       {"flat torus suite", criterion8},  {"reproducibility", criterion9},
  };
  int rc = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    auto red = kExpectedRed.find(n);
    std::cout << "criterion " << n << " (" << criteria[i].first << "): ";
    if (v.ok && red == kExpectedRed.end()) {
      std::cout << "PASS";
    } else if (v.ok) {
      std::cout << "PASS (unexpected: listed as expected red)";
      rc = 1;
    } else if (red != kExpectedRed.end()) {
      std::cout << "FAIL (expected: " << red->second << ")";
    } else {
      std::cout << "FAIL";
      rc = 1;
    }
    std::cout << " -- " << v.note << std::endl;
  }
  return rc;
}
