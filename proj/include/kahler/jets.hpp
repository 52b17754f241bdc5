#pragma once

#include <cstdint>
#include <vector>

#include "kahler/kernel.hpp"

namespace kahler {

struct JetConstraints {
  bool trace_free = true;
  bool divergence_free = true;
  bool j_invariant = true;
  bool kahler_closed = false;

  static JetConstraints from(const ConstraintSet& cs) {
    return {cs.trace_free, cs.divergence_free, cs.j_invariant, cs.kahler_closed};
  }
};

// Pointwise values of h and its covariant derivatives up to a given order
// on a space form, drawn at random and projected onto the constraints.
// Symmetrized jets are free data; ordered jets follow from the Ricci
// identity.
class RandomJet {
 public:
  static RandomJet generate(int m, double c, int order, const JetConstraints& jc, std::uint64_t seed);

  int m() const { return m_; }
  int n() const { return 2 * m_; }
  double c() const { return c_; }
  int order() const { return static_cast<int>(sym_.size()) - 1; }
  // Arrays indexed ((d_1 n + d_2) ... ) n^2 + x n + y.
  const std::vector<double>& sym(int k) const { return sym_.at(k); }
  const std::vector<double>& ordered(int k) const { return ordered_.at(k); }
  const std::vector<double>& curvature() const { return R_; }
  const std::vector<double>& complex_structure() const { return J_; }
  // Largest violation of the constraints over all derivative orderings.
  double constraint_residual() const { return residual_; }

 private:
  int m_ = 1;
  double c_ = 0;
  std::vector<std::vector<double>> sym_, ordered_;
  std::vector<double> R_, J_;
  double residual_ = 0;
};

// Components of e on the frame, free slots in order; n^rank values.
std::vector<double> random_jet_tensor(const TensorExpr& e, const RandomJet& jets);
double random_jet_eval(const TensorExpr& e, const RandomJet& jets);
// D_a V^a of a rank-1 expression, with the derivative applied factor by factor.
double random_jet_divergence(const TensorExpr& v, const RandomJet& jets);

}  // namespace kahler
