#pragma once

#include <optional>
#include <vector>

#include "kahler/tensor_expr.hpp"

namespace kahler {

// e_k (rotated = false) or J e_k (rotated = true), k = 1..m.
struct BasisIndex {
  int k = 1;
  bool rotated = false;
  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

struct SignedBasis {
  BasisIndex b;
  int sign = 1;
};

SignedBasis apply_j(BasisIndex b);
int frame_position(BasisIndex b);  // 0-based slot in {e_1, Je_1, ..., e_m, Je_m}
BasisIndex basis_at(int position);

// Kahler manifold of constant holomorphic sectional curvature 4c.
// Either parameter may stay symbolic.
class SpaceFormModel {
 public:
  SpaceFormModel() = default;
  SpaceFormModel(std::optional<int> m, std::optional<Rational> c);
  static SpaceFormModel symbolic() { return {}; }

  std::optional<int> m() const { return m_; }
  std::optional<Rational> c() const { return c_; }
  Poly m_poly() const;
  Poly c_poly() const;
  Poly n_poly() const { return Poly(2L) * m_poly(); }
  VarValues values() const;
  SpaceFormModel with_c(std::optional<Rational> c) const { return {m_, c}; }
  SpaceFormModel with_m(std::optional<int> m) const { return {m, c_}; }

 private:
  std::optional<int> m_;
  std::optional<Rational> c_;
};

// Table lookup extended by the algebraic symmetries and J-invariance.
Poly curvature_component(const SpaceFormModel& model, BasisIndex a, BasisIndex b, BasisIndex x, BasisIndex y);

// c[g(x,z)g(y,w) - g(x,w)g(y,z) + g(x,Jz)g(y,Jw) - g(x,Jw)g(y,Jz) + 2g(x,Jy)g(z,Jw)]
TensorExpr curvature_closed_form(const SpaceFormModel& model);

Poly einstein_constant(const SpaceFormModel& model);
Poly curvature_norm_sq(const SpaceFormModel& model);

// Contractions of the closed form, computed by the kernel.
TensorExpr ricci_contraction(const SpaceFormModel& model);
TensorExpr full_contraction(const SpaceFormModel& model);
TensorExpr rcheck_tensor(const SpaceFormModel& model);

// Exact value of an expression built from g and J only, at frame vectors.
Poly evaluate_on_frame(const TensorExpr& e, const std::vector<BasisIndex>& args);

// Frame components where the closed form and the table disagree, symbolic c.
int table_mismatches(int m);

// Dense n^4 component array from the table, for the float oracle.
std::vector<double> curvature_array(int m, double c);

// Matrix of J in the frame: J[u * n + i] is the e_u-component of J e_i.
std::vector<double> complex_structure_matrix(int m);

}  // namespace kahler
