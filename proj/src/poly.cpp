#include "kahler/poly.hpp"

#include <cmath>
#include <sstream>

#include "kahler/error.hpp"

namespace kahler {

ParseError::ParseError(std::size_t pos, std::vector<std::string> exp, const std::string& msg)
    : Error(msg), position(pos), expected(std::move(exp)) {}

namespace {
const char* kVarNames[kVarCount] = {"m", "c", "p", "u"};
}

std::string rational_str(const Rational& r) {
  return r.get_str();
}

Poly::Poly(long value) {
  if (value != 0) terms_[{}] = Rational(value);
}

Poly::Poly(const Rational& value) {
  if (value != 0) terms_[{}] = value;
}

Poly Poly::var(Var x, unsigned power) {
  Poly p;
  Exponents e{};
  e[static_cast<int>(x)] = static_cast<std::uint8_t>(power);
  p.terms_[e] = 1;
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents{});
}

Rational Poly::constant() const {
  if (!is_constant()) throw Error("polynomial " + str() + " is not a constant");
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

int Poly::degree(Var x) const {
  int d = 0;
  for (const auto& [e, r] : terms_) d = std::max<int>(d, e[static_cast<int>(x)]);
  return d;
}

Poly Poly::coeff(Var x, int k) const {
  Poly out;
  const int i = static_cast<int>(x);
  for (const auto& [e, r] : terms_) {
    if (e[i] != k) continue;
    Exponents f = e;
    f[i] = 0;
    out.add_term(f, r);
  }
  return out;
}

void Poly::add_term(const Exponents& e, const Rational& r) {
  if (r == 0) return;
  auto [it, inserted] = terms_.emplace(e, r);
  if (!inserted) {
    it->second += r;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::substitute(Var x, const Rational& value) const {
  VarValues vals;
  vals.set(x, value);
  return substitute(vals);
}

Poly Poly::substitute(const VarValues& values) const {
  Poly out;
  for (const auto& [e, r] : terms_) {
    Exponents f = e;
    Rational coef = r;
    for (int i = 0; i < kVarCount; ++i) {
      if (!values.v[i] || e[i] == 0) continue;
      Rational pw = 1;
      for (int k = 0; k < e[i]; ++k) pw *= *values.v[i];
      coef *= pw;
      f[i] = 0;
    }
    out.add_term(f, coef);
  }
  return out;
}

Rational Poly::eval(const VarValues& values) const {
  Poly p = substitute(values);
  if (!p.is_constant()) throw Error("unset variable while evaluating " + str());
  return p.constant();
}

double Poly::eval_double(const std::array<double, kVarCount>& values) const {
  double s = 0;
  for (const auto& [e, r] : terms_) {
    double t = r.get_d();
    for (int i = 0; i < kVarCount; ++i) t *= std::pow(values[i], e[i]);
    s += t;
  }
  return s;
}

Poly Poly::pow(unsigned k) const {
  Poly out(1L);
  for (unsigned i = 0; i < k; ++i) out *= *this;
  return out;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [e, r] : out.terms_) r = -r;
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [e, r] : o.terms_) add_term(e, r);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [e, r] : o.terms_) add_term(e, -r);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  Poly out;
  for (const auto& [ea, ra] : terms_) {
    for (const auto& [eb, rb] : o.terms_) {
      Exponents e;
      for (int i = 0; i < kVarCount; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      out.add_term(e, ra * rb);
    }
  }
  terms_ = std::move(out.terms_);
  return *this;
}

Poly Poly::divided(const Rational& r) const {
  if (r == 0) throw Error("division of polynomial by zero");
  Poly out = *this;
  for (auto& [e, v] : out.terms_) v /= r;
  return out;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, r] = *it;
    Rational mag = abs(r);
    bool has_var = e != Exponents{};
    if (first) {
      if (r < 0) os << "-";
    } else {
      os << (r < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (!has_var || mag != 1) {
      os << mag.get_str();
      wrote = true;
    }
    for (int i = 0; i < kVarCount; ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << "*";
      os << kVarNames[i];
      if (e[i] > 1) os << "^" << int(e[i]);
      wrote = true;
    }
  }
  return os.str();
}

}  // namespace kahler
