#pragma once

#include <string>
#include <vector>

#include "kahler/poly.hpp"

namespace kahler {

// Dense univariate polynomial over Q in the dimension variable m.
class UPoly {
 public:
  UPoly() = default;
  UPoly(const Rational& r);
  static UPoly from_poly(const Poly& p);  // p may only depend on m
  Poly to_poly() const;

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const Rational& lead() const { return c_.back(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational eval(const Rational& m) const;

  UPoly operator-() const;
  friend UPoly operator+(const UPoly& a, const UPoly& b);
  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

  static void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r);
  static UPoly gcd(UPoly a, UPoly b);  // monic
  UPoly monic() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

// Element of Q(m), kept reduced with a monic denominator.
class RatFunc {
 public:
  RatFunc() : den_(Rational(1)) {}
  RatFunc(const Rational& r) : num_(r), den_(Rational(1)) {}
  RatFunc(UPoly num, UPoly den);

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }
  const UPoly& num() const { return num_; }
  const UPoly& den() const { return den_; }
  Rational eval(const Rational& m) const;

  RatFunc operator-() const { return RatFunc(-num_, den_); }
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str() const;

 private:
  UPoly num_, den_;
};

}  // namespace kahler
