#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace kahler {

using Rational = mpq_class;

// Formal variables: complex dimension m, curvature scale c, exponent p,
// and u, a spare symbol used for 1/n in the criticality bookkeeping.
enum class Var : int { m = 0, c = 1, p = 2, u = 3 };
inline constexpr int kVarCount = 4;

struct VarValues {
  std::array<std::optional<Rational>, kVarCount> v;
  VarValues& set(Var x, const Rational& r) {
    v[static_cast<int>(x)] = r;
    return *this;
  }
};

class Poly {
 public:
  using Exponents = std::array<std::uint8_t, kVarCount>;

  Poly() = default;
  Poly(long value);
  Poly(const Rational& value);
  static Poly var(Var x, unsigned power = 1);

  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant() const;  // throws unless is_constant()
  bool depends_on(Var x) const { return degree(x) > 0; }
  int degree(Var x) const;
  Poly coeff(Var x, int k) const;  // coefficient of x^k, as a poly free of x

  Poly substitute(Var x, const Rational& value) const;
  Poly substitute(const VarValues& values) const;
  Rational eval(const VarValues& values) const;  // throws if a used var is unset
  double eval_double(const std::array<double, kVarCount>& values) const;

  Poly pow(unsigned k) const;
  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

  // Exact division by a nonzero rational.
  Poly divided(const Rational& r) const;

  std::string str() const;

 private:
  void add_term(const Exponents& e, const Rational& r);
  std::map<Exponents, Rational> terms_;
};

std::string rational_str(const Rational& r);

}  // namespace kahler
