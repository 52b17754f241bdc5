#include "kahler/hessian.hpp"

#include <cmath>
#include <sstream>

#include "kahler/error.hpp"
#include "kahler/kernel.hpp"
#include "kahler/parser.hpp"

namespace kahler {

std::string laplacian_sq_key(bool jinv) {
  auto e = commute_derivatives(parse_expr("D_i(D_i(h(a,b)))*D_j(D_j(h(a,b)))", {}, jinv));
  for (const auto& [key, t] : e.terms())
    if (t.mono.derivative_count() == 4) return key;
  throw Error("no leading term in |D*Dh|^2");
}

std::string gradient_sq_key(bool jinv) { return parse_expr("D_i(h(a,b))*D_i(h(a,b))", {}, jinv).terms().begin()->first; }

std::string norm_sq_key(bool jinv) { return parse_expr("h(a,b)*h(a,b)", {}, jinv).terms().begin()->first; }

QuadraticFormCoeffs extract_coeffs(const TensorExpr& nf) {
  if (nf.rank() != 0) throw RankError("quadratic form coefficients need a scalar normal form");
  const bool j = nf.h_j_invariant();
  QuadraticFormCoeffs q;
  const std::string ka = laplacian_sq_key(j), kb = gradient_sq_key(j), kd = norm_sq_key(j);
  for (const auto& [key, t] : nf.terms()) {
    if (key == ka) q.a = t.coeff;
    else if (key == kb) q.b = t.coeff;
    else if (key == kd) q.d = t.coeff;
    else throw Error("unexpected monomial class in the Hessian normal form: " + t.mono.str());
  }
  return q;
}

double Radical::value() const { return coeff.get_d() * std::sqrt(static_cast<double>(radicand)); }

std::string Radical::str() const {
  if (radicand == 1 || coeff == 0) return rational_str(coeff);
  std::string c = coeff == 1 ? "" : rational_str(coeff) + "*";
  return c + "sqrt(" + std::to_string(radicand) + ")";
}

Radical exact_sqrt(const Rational& x) {
  if (x < 0) throw Error("square root of a negative number");
  mpz_class num = x.get_num() * x.get_den();
  if (!num.fits_slong_p()) throw OverflowError("radicand too large");
  long n = num.get_si(), square = 1, free = 1;
  for (long f = 2; f * f <= n; ++f) {
    while (n % (f * f) == 0) {
      n /= f * f;
      square *= f;
    }
    if (n % f == 0) {
      n /= f;
      free *= f;
    }
  }
  free *= n;
  if (x == 0) return {Rational(0), 1};
  return {Rational(square) / Rational(x.get_den()), free};
}

double hessian_prefactor(int m, double c, double p) {
  double r2 = 32.0 * m * (m + 1) * c * c;
  if (p == 2) return p;
  return p * std::pow(r2, (p - 2) / 2);
}

namespace {

void minimize(const QuadraticFormCoeffs& q, int m, const Rational& c, StabilityConstant& s) {
  VarValues v;
  v.set(Var::m, m).set(Var::c, c);
  Poly pa = q.a.substitute(v), pb = q.b.substitute(v), pd = q.d.substitute(v);
  if (!pa.is_constant() || !pb.is_constant() || !pd.is_constant())
    throw Error("coefficients must depend on m and c only");
  Rational a = pa.constant(), b = pb.constant(), d = pd.constant();
  if (a <= 0) throw Error("leading coefficient must be positive");
  if (b >= 0) {
    s.interior = false;
    s.t_star = 0;
    s.bracket_min = d;
  } else {
    s.interior = true;
    s.t_star = -b / (2 * a);
    s.bracket_min = d - b * b / (4 * a);
  }
}

}  // namespace

StabilityConstant stability_constant(const QuadraticFormCoeffs& q, int m, const Rational& c, double p) {
  if (p < 2) throw Error("exponent p must be at least 2");
  StabilityConstant s;
  minimize(q, m, c, s);
  s.prefactor = hessian_prefactor(m, c.get_d(), p);
  s.k = s.prefactor * s.bracket_min.get_d();
  return s;
}

StabilityConstant stability_constant(const QuadraticFormCoeffs& q, int m, const Rational& c, const Rational& p) {
  StabilityConstant s = stability_constant(q, m, c, p.get_d());
  if (p.get_den() != 1) return s;
  const long pi = p.get_num().get_si();
  const Rational r2 = Rational(32 * m * (m + 1)) * c * c;
  Rational power = 1;
  for (long i = 0; i < (pi - 2) / 2; ++i) power *= r2;
  Radical rad{Rational(pi) * power * s.bracket_min, 1};
  if ((pi - 2) % 2 != 0) {
    Radical root = exact_sqrt(r2);
    rad.coeff *= root.coeff;
    rad.radicand = root.radicand;
  }
  s.exact = rad;
  s.k = rad.value();
  return s;
}

CriticalityReport criticality_check(const SpaceFormModel& model) {
  CriticalityReport r;
  // D^*(|R|^(p-2) R) = -|R|^(p-2) D_i R(i, ., ., .): |R| is constant and DR = 0.
  r.divergence_term = simplify(parse_expr("D_i(R(i,a,b,c))", "abc"), model, ConstraintSet::none());
  TensorExpr rc = rcheck_tensor(model);
  TensorExpr g = parse_expr("g(p,q)", "pq");
  // Rcheck / (|R|^2 u) with u = 1/n must equal 1 as a function of m.
  Poly ratio_num = rc.coefficient(g.terms().begin()->first) * model.n_poly();
  Poly rn = curvature_norm_sq(model);
  r.rcheck_proportional = rc.size() == 1 && ratio_num == rn;
  if (rn.is_zero()) r.rcheck_proportional = rc.is_zero();
  const Poly p = Poly::var(Var::p), u = Poly::var(Var::u), half(Rational(1, 2));
  // -p |R|^(p-2) Rcheck + 1/2 |R|^p g + (p/n - 1/2) ||R||^p g, unit volume.
  r.cancellation = {-(p * u), half, p * u, -half};
  for (const auto& t : r.cancellation) r.total += t;
  r.zero = r.divergence_term.is_zero() && r.rcheck_proportional && r.total.is_zero();
  if (!r.zero) {
    std::ostringstream os;
    if (!r.divergence_term.is_zero()) os << "divergence term " << r.divergence_term.str() << "; ";
    if (!r.rcheck_proportional) os << "Rcheck = " << rc.str() << "; ";
    if (!r.total.is_zero()) os << "coefficient " << r.total.str();
    r.witness = os.str();
  }
  return r;
}

double criticality_residual(int m, double c, double p) {
  const int n = 2 * m;
  const std::vector<double> R = curvature_array(m, c);
  double r2 = 0;
  for (double v : R) r2 += v * v;
  const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
  const double x = p == 2 ? 1.0 : std::pow(r2, (p - 2) / 2);
  const double rp = x * r2;
  const double scale = std::max(1.0, std::abs(rp));
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double rcheck = 0;
      for (std::size_t t = 0; t < n3; ++t) rcheck += R[a * n3 + t] * R[b * n3 + t];
      double grad = -p * x * rcheck + (a == b ? 0.5 * rp + (p / n - 0.5) * rp : 0.0);
      worst = std::max(worst, std::abs(grad) / scale);
    }
  return worst;
}

}  // namespace kahler
