#pragma once

#include <string>

#include "kahler/space_form.hpp"
#include "kahler/tensor_expr.hpp"

namespace kahler {

struct ConstraintSet {
  bool trace_free = false;
  bool divergence_free = false;
  bool j_invariant = false;        // h(Jx,Jy) = h(x,y) for h and every jet of h
  bool kahler_closed = false;      // d(h(J.,.)) = 0, applied as a relation family
  bool trace_divergence = false;   // d tr h + 2 delta h = 0
  bool ricci_commutation = true;   // derivative slots normalized by the Ricci identity
  bool parallel_curvature = true;  // DR = 0
  bool parallel_complex = true;    // DJ = 0

  static ConstraintSet none() { return {}; }
  static ConstraintSet tt() { return {true, true, false}; }
  static ConstraintSet kahler_tt() { return {true, true, true}; }
  std::string str() const;
};

TensorExpr canonicalize(const TensorExpr& e, const ConstraintSet& cs = {});
TensorExpr substitute_curvature(const TensorExpr& e, const SpaceFormModel& model);
TensorExpr commute_derivatives(const TensorExpr& e);
TensorExpr apply_gauge(const TensorExpr& e, const ConstraintSet& cs);

// Gauge, commutation and substitution iterated to a fixed point.
TensorExpr simplify(const TensorExpr& e, const SpaceFormModel& model, const ConstraintSet& cs);

}  // namespace kahler
