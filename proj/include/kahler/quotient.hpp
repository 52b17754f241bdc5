#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kahler/kernel.hpp"
#include "kahler/ratfunc.hpp"

namespace kahler {

struct QuotientOptions {
  std::size_t basis_cap = 10000;
};

// One summand coeff * field of a vector field V with e - nf = D_a V^a.
struct WitnessTerm {
  TensorExpr field;  // rank 1
  RatFunc coeff;
};

struct DivergenceResult {
  TensorExpr normal_form;
  std::vector<WitnessTerm> witness;
  std::size_t basis_size = 0;
  std::size_t generators = 0;

  // The witness as a single field; requires polynomial coefficients or a numeric m.
  TensorExpr witness_field(std::optional<int> m = std::nullopt) const;
};

// D_a V^a for a rank-1 expression, simplified under cs.
TensorExpr divergence_of(const TensorExpr& v, const SpaceFormModel& model, const ConstraintSet& cs);

// Normal form of a scalar integrand modulo total divergences. The quotient
// basis is the closure of the monomials of e under taking divergences of
// the vector fields obtained by freeing one derivative slot.
DivergenceResult reduce_mod_divergence(const TensorExpr& e, const SpaceFormModel& model, const ConstraintSet& cs,
                                       const QuotientOptions& opts = {});

// Normal form of e modulo the span of the given expressions of the same rank.
TensorExpr reduce_mod_relations(const TensorExpr& e, const std::vector<TensorExpr>& relations);

struct EqualityVerdict {
  bool equal = false;
  TensorExpr witness;  // canonical residual, zero iff equal
  std::optional<DivergenceResult> divergence;
};

EqualityVerdict expr_equal(const TensorExpr& a, const TensorExpr& b, const SpaceFormModel& model,
                           const ConstraintSet& cs, bool mod_div, const QuotientOptions& opts = {});

}  // namespace kahler
