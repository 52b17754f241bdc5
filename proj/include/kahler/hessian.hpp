#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kahler/quotient.hpp"

namespace kahler {

// a ||D*Dh||^2 + b ||Dh||^2 + d ||h||^2, inside the prefactor p |R|^(p-2).
struct QuadraticFormCoeffs {
  Poly a, b, d;
};

// Monomial keys of the three classes, under the given J-invariance flag.
std::string laplacian_sq_key(bool h_j_invariant);
std::string gradient_sq_key(bool h_j_invariant);
std::string norm_sq_key(bool h_j_invariant);

// Throws Error if the normal form has any other class.
QuadraticFormCoeffs extract_coeffs(const TensorExpr& normal_form);

// coeff * sqrt(radicand), radicand square-free.
struct Radical {
  Rational coeff;
  long radicand = 1;
  double value() const;
  std::string str() const;
};

Radical exact_sqrt(const Rational& x);

struct StabilityConstant {
  double k = 0;
  std::optional<Radical> exact;  // integer p and rational c
  bool interior = false;         // minimizer t* = -b / 2a > 0
  Rational t_star;
  Rational bracket_min;          // min over t >= 0 of a t^2 + b t + d
  double prefactor = 0;          // p |R|^(p-2), with 0^0 = 1
};

StabilityConstant stability_constant(const QuadraticFormCoeffs& q, int m, const Rational& c, const Rational& p);
StabilityConstant stability_constant(const QuadraticFormCoeffs& q, int m, const Rational& c, double p);

// Prefactor p |R|^(p-2) at (m, c) for real p.
double hessian_prefactor(int m, double c, double p);

struct CriticalityReport {
  bool zero = false;
  TensorExpr divergence_term;      // delta^D D^* R, zero when DR = 0
  bool rcheck_proportional = false;  // Rcheck = (|R|^2 / n) g
  std::vector<Poly> cancellation;  // coefficients of |R|^p g, in the variables p and u = 1/n
  Poly total;                      // their sum
  std::string witness;
};

CriticalityReport criticality_check(const SpaceFormModel& model);

// Float residual of the gradient at a numeric space form, relative to |R|^p.
double criticality_residual(int m, double c, double p);

}  // namespace kahler
