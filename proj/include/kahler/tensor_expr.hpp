#pragma once

#include <functional>
#include <map>
#include <string>

#include "kahler/raw.hpp"

namespace kahler {

struct Term {
  Monomial mono;
  Poly coeff;
};

// Sum of canonical monomials keyed by their canonical signature. The flag
// records whether h jets were normalized as J-invariant.
class TensorExpr {
 public:
  explicit TensorExpr(int rank = 0, bool h_j_invariant = false) : rank_(rank), jinv_(h_j_invariant) {}

  static TensorExpr from_raw(const RawExpr& raw, bool h_j_invariant = false);
  static TensorExpr scalar(const Poly& p);
  RawExpr to_raw(const std::vector<int>& free, LabelGen& gen) const;

  int rank() const { return rank_; }
  bool h_j_invariant() const { return jinv_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<std::string, Term>& terms() const { return terms_; }

  void add_monomial(const Monomial& m, const Poly& coeff);
  void add_canonical(const Monomial& m, const Poly& coeff);
  TensorExpr with_j_invariance(bool on) const;
  Poly coefficient(const std::string& key) const;

  TensorExpr map_coeffs(const std::function<Poly(const Poly&)>& f) const;
  TensorExpr specialize(const VarValues& values) const;

  TensorExpr& operator+=(const TensorExpr& o);
  TensorExpr& operator-=(const TensorExpr& o);
  TensorExpr operator-() const;
  friend TensorExpr operator+(TensorExpr a, const TensorExpr& b) { return a += b; }
  friend TensorExpr operator-(TensorExpr a, const TensorExpr& b) { return a -= b; }
  friend TensorExpr operator*(const Poly& s, const TensorExpr& e);
  friend bool operator==(const TensorExpr& a, const TensorExpr& b);

  std::string str() const;

 private:
  int rank_;
  bool jinv_;
  std::map<std::string, Term> terms_;
};

}  // namespace kahler
