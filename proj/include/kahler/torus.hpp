#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace kahler {

// Flat torus R^n / Z^n with constant J; c = 0, lambda = 0, R = 0.
struct FlatTorusModel {
  int m = 1;
  int N = 4;  // modes with max-norm <= N
  int n() const { return 2 * m; }
};

using Mode = std::vector<int>;
using Complex = std::complex<double>;

// Real tensor field sum_xi T_xi exp(2 pi i <xi, x>). Coefficients of -xi are
// the conjugates of those of xi. Slots are frame indices, slot 0 first.
class FourierTensorField {
 public:
  FourierTensorField(int m, int rank) : m_(m), rank_(rank) {}

  int m() const { return m_; }
  int n() const { return 2 * m_; }
  int rank() const { return rank_; }
  std::size_t components() const;
  const std::map<Mode, std::vector<Complex>>& modes() const { return modes_; }

  // Sets xi and its conjugate partner.
  void set_mode(const Mode& xi, const std::vector<Complex>& coeff);
  const std::vector<Complex>* find(const Mode& xi) const;
  std::vector<Complex>& at(const Mode& xi);  // inserts zeros

  double reality_defect() const;
  bool only_constant_mode(double tol) const;

  FourierTensorField& operator+=(const FourierTensorField& o);
  FourierTensorField& operator*=(double s);
  friend FourierTensorField operator+(FourierTensorField a, const FourierTensorField& b) { return a += b; }
  friend FourierTensorField operator-(FourierTensorField a, FourierTensorField b) { return a += (b *= -1.0); }
  friend FourierTensorField operator*(double s, FourierTensorField a) { return a *= s; }

  // {"m", "rank", "modes": [{"xi": [...], "re": [...], "im": [...]}]}
  nlohmann::json to_json() const;
  static FourierTensorField from_json(const nlohmann::json& j);

 private:
  int m_, rank_;
  std::map<Mode, std::vector<Complex>> modes_;
};

// L^2 inner product over the unit-volume torus, full tensor contraction.
double inner(const FourierTensorField& a, const FourierTensorField& b);
double norm_sq(const FourierTensorField& f);
double norm(const FourierTensorField& f);
// The same norm by quadrature on a (2N+1)^n grid, through FFTW.
double grid_norm_sq(const FourierTensorField& f, int N);

enum class TorusOp { D, DstarD, delta_g, delta_g_star, trace, dD, deltaD, j_conj };
const char* op_name(TorusOp op);

FourierTensorField apply_operator(TorusOp op, const FourierTensorField& f);
FourierTensorField exterior_d(const FourierTensorField& f);          // ranks 0, 1
FourierTensorField codifferential(const FourierTensorField& f);      // -D_i f(i, ...)
FourierTensorField hodge_laplacian(const FourierTensorField& w);     // d delta + delta d on 1-forms
FourierTensorField d_star(const FourierTensorField& f);              // formal adjoint of D
FourierTensorField metric_field(int m);

struct FieldSpec {
  int count = 50;        // nonzero modes drawn from the half space
  bool constant = true;  // include the zero mode
  bool symmetric = false;
};

FourierTensorField random_field(const FlatTorusModel& model, int rank, std::uint64_t seed, const FieldSpec& spec = {});
// Antisymmetric in the last two slots.
FourierTensorField random_antisymmetric3(const FlatTorusModel& model, std::uint64_t seed, int count = 50);

// Orthogonal projection, mode by mode, onto symmetric trace-free
// divergence-free tensors, optionally J-invariant. With J-invariance a mode
// xi != 0 leaves (m-1)^2 - 1 dimensions, none for m <= 2.
FourierTensorField project_tt_j(const FourierTensorField& h, bool j_invariant = true);
// Largest violation of the constraints.
double tt_j_defect(const FourierTensorField& h, bool j_invariant = true);

// (1/2)(D^2 phi + D^2 phi(J., J.)).
FourierTensorField kaehler_variation_from_potential(const FourierTensorField& phi);

struct OneFormResiduals {
  double killing_split = 0;     // |2 delta delta^* w + delta d w - 2 D^*D w| / scale
  double weitzenbock = 0;       // |Delta w - D^*D w| / scale
  double gauge_identity = 0;    // |2 delta delta^* w - d delta w| / scale
  bool harmonic = false;
  bool parallel = false;
  bool constant = false;
};

OneFormResiduals one_form_identities(const FourierTensorField& w, double tol = 1e-10);

struct PotentialResiduals {
  double j_invariance = 0;        // max |h(Jx,Jy) - h(x,y)|
  double trace_divergence = 0;    // |d tr h + 2 delta h| / scale
};

PotentialResiduals potential_residuals(const FourierTensorField& h);

struct FlatHessian {
  double assembled = 0;    // 2 <rbar', delta^D d^D h>
  double closed_form = 0;  // 2 |D^*D h|^2
};

FlatHessian hessian_flat_check(const FourierTensorField& h);

// (|D^*D h|^2, |Dh|^2, |h|^2).
struct NormTriple {
  double laplacian_sq = 0, gradient_sq = 0, norm_sq = 0;
};
NormTriple norm_triple(const FourierTensorField& h);

struct AdjointnessReport {
  double delta_g = 0;   // relative defect of <delta h, w> = <h, delta^* w>
  double d_star = 0;    // relative defect of <D h, T> = <h, D^* T>
  double dD_plus = 0;   // relative defect of <d^D h, A> = <h, delta^D A>
  double dD_minus = 0;  // relative defect of <d^D h, A> = -<h, delta^D A>
  int sigma = 0;        // sign making the last pair adjoint, 0 if neither
};

AdjointnessReport measure_adjointness(const FlatTorusModel& model, std::uint64_t seed);

}  // namespace kahler
