#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kahler/error.hpp"
#include "kahler/suite.hpp"

using namespace kahler;

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Rational parse_rational(const std::string& s) {
  Rational r;
  if (s.empty() || r.set_str(s, 10) != 0) throw Error("not a rational number: '" + s + "'");
  r.canonicalize();
  return r;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error("not an integer: '" + s + "'");
  return v;
}

// "1..3,5" -> 1 2 3 5
std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split(s)) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    int lo = parse_int(item.substr(0, dots)), hi = parse_int(item.substr(dots + 2));
    if (hi < lo) throw Error("empty range '" + item + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw Error("empty list");
  return out;
}

std::vector<Rational> parse_rationals(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& item : split(s)) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_rational(item));
      continue;
    }
    for (int v : parse_ints(item)) out.emplace_back(v);
  }
  if (out.empty()) throw Error("empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic and numeric verification of curvature-norm stability at Kähler space forms"};
  RunConfig cfg;
  std::string identities, ms = "1..3", cs = "1,-1", ps = "2,3,4", out;
  bool list = false;
  app.add_option("--identities", identities, "comma-separated identity names (default: all)");
  app.add_option("--m", ms, "complex dimensions, e.g. 1..3 or 1,2,4")->capture_default_str();
  app.add_option("--c", cs, "curvature parameters, rationals like 1,-1,1/2")->capture_default_str();
  app.add_option("--p", ps, "exponents p >= 2")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--jets", cfg.jets, "random jets per (m, c)")->capture_default_str();
  app.add_option("--modes", cfg.modes, "torus Fourier truncation N")->capture_default_str();
  app.add_option("--tol-sym", cfg.tol_sym, "symbolic float tolerance")->capture_default_str();
  app.add_option("--tol-num", cfg.tol_num, "numeric oracle tolerance")->capture_default_str();
  app.add_option("--basis-cap", cfg.basis_cap, "quotient basis cap")->capture_default_str();
  app.add_option("--format", cfg.format, "json or table")->capture_default_str();
  app.add_option("--out", out, "write the report here instead of stdout");
  app.add_flag("--list", list, "list identities and exit");
  app.add_flag_callback("--version", [] {
    std::cout << "kahler-verify " << kToolVersion << "\n";
    throw CLI::Success();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& e : list_identities()) std::cout << e.name << "  " << e.description << "\n";
    return 0;
  }

  try {
    cfg.identities = split(identities);
    cfg.m_values = parse_ints(ms);
    cfg.c_values = parse_rationals(cs);
    cfg.p_values = parse_rationals(ps);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (auto errs = cfg.validate(); !errs.empty()) {
    for (const auto& e : errs) std::cerr << "error: " << e << "\n";
    return 2;
  }

  VerificationReport rep;
  try {
    rep = run_suite(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::string text = cfg.format == "json" ? rep.to_json().dump(2) + "\n" : rep.table();
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return 2;
    }
    f << text;
  }
  return rep.exit_code();
}
