#include "kahler/ratfunc.hpp"

#include "kahler/error.hpp"

namespace kahler {

UPoly::UPoly(const Rational& r) {
  if (r != 0) c_.push_back(r);
}

UPoly UPoly::from_poly(const Poly& p) {
  UPoly out;
  for (const auto& [e, r] : p.terms()) {
    for (int i = 1; i < kVarCount; ++i) {
      if (e[i] != 0) throw Error("expected a polynomial in m only, got " + p.str());
    }
    if (out.c_.size() <= e[0]) out.c_.resize(e[0] + 1);
    out.c_[e[0]] += r;
  }
  out.trim();
  return out;
}

Poly UPoly::to_poly() const {
  Poly out;
  for (std::size_t k = 0; k < c_.size(); ++k) out += Poly(c_[k]) * Poly::var(Var::m, k);
  return out;
}

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UPoly::eval(const Rational& m) const {
  Rational s = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * m + *it;
  return s;
}

UPoly UPoly::operator-() const {
  UPoly out = *this;
  for (auto& r : out.c_) r = -r;
  return out;
}

UPoly operator+(const UPoly& a, const UPoly& b) {
  UPoly out;
  out.c_.resize(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) out.c_[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) out.c_[i] += b.c_[i];
  out.trim();
  return out;
}

UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }

UPoly operator*(const UPoly& a, const UPoly& b) {
  UPoly out;
  if (a.is_zero() || b.is_zero()) return out;
  out.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
  out.trim();
  return out;
}

void UPoly::divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r) {
  if (b.is_zero()) throw Error("polynomial division by zero");
  q = UPoly();
  r = a;
  if (a.degree() < b.degree()) return;
  q.c_.assign(a.degree() - b.degree() + 1, Rational(0));
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int shift = r.degree() - b.degree();
    Rational f = r.lead() / b.lead();
    q.c_[shift] = f;
    for (std::size_t i = 0; i < b.c_.size(); ++i) r.c_[i + shift] -= f * b.c_[i];
    r.trim();
  }
  q.trim();
}

UPoly UPoly::monic() const {
  if (is_zero()) return *this;
  UPoly out = *this;
  Rational l = lead();
  for (auto& x : out.c_) x /= l;
  return out;
}

UPoly UPoly::gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

RatFunc::RatFunc(UPoly num, UPoly den) {
  if (den.is_zero()) throw Error("rational function with zero denominator");
  if (num.is_zero()) {
    den_ = UPoly(Rational(1));
    return;
  }
  UPoly g = UPoly::gcd(num, den);
  UPoly q, r;
  UPoly::divmod(num, g, num_, r);
  UPoly::divmod(den, g, den_, r);
  Rational l = den_.lead();
  den_ = den_.monic();
  num_ = num_ * UPoly(1 / l);
}

Rational RatFunc::eval(const Rational& m) const {
  Rational d = den_.eval(m);
  if (d == 0) throw Error("rational function " + str() + " has a pole at m = " + m.get_str());
  return num_.eval(m) / d;
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
  return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return RatFunc();
  return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.is_zero()) throw Error("division by zero in Q(m)");
  return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
}

std::string RatFunc::str() const {
  if (is_polynomial()) return num_.to_poly().str();
  return "(" + num_.to_poly().str() + ")/(" + den_.to_poly().str() + ")";
}

}  // namespace kahler
