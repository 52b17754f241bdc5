#include "kahler/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/Dense>
#include <fftw3.h>
#include <nlohmann/json.hpp>

#include "kahler/error.hpp"
#include "kahler/space_form.hpp"

namespace kahler {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

std::size_t idx2(int n, int a, int b) { return static_cast<std::size_t>(a) * n + b; }
std::size_t idx3(int n, int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; }
std::size_t idx4(int n, int a, int b, int c, int d) { return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d; }

Mode negate(Mode xi) {
  for (auto& v : xi) v = -v;
  return xi;
}

bool is_zero_mode(const Mode& xi) {
  return std::all_of(xi.begin(), xi.end(), [](int v) { return v == 0; });
}

// First nonzero entry positive.
bool upper_half(const Mode& xi) {
  for (int v : xi)
    if (v != 0) return v > 0;
  return false;
}

std::vector<double> wave(const Mode& xi) {
  std::vector<double> k(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) k[i] = kTwoPi * xi[i];
  return k;
}

void require_rank(const FourierTensorField& f, int rank, const char* op) {
  if (f.rank() != rank) throw RankError(std::string(op) + " expects rank " + std::to_string(rank));
}

template <class Fn>
FourierTensorField map_modes(const FourierTensorField& f, int out_rank, Fn fn) {
  FourierTensorField out(f.m(), out_rank);
  const std::size_t size = ipow(f.n(), out_rank);
  for (const auto& [xi, c] : f.modes()) {
    std::vector<Complex> o(size, 0.0);
    fn(xi, wave(xi), c, o);
    out.at(xi) = std::move(o);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t FourierTensorField::components() const { return ipow(n(), rank_); }

void FourierTensorField::set_mode(const Mode& xi, const std::vector<Complex>& coeff) {
  if (static_cast<int>(xi.size()) != n() || coeff.size() != components())
    throw Error("mode or coefficient size does not match the field");
  modes_[xi] = coeff;
  if (is_zero_mode(xi)) {
    for (auto& v : modes_[xi]) v = v.real();
    return;
  }
  std::vector<Complex> conj(coeff.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) conj[i] = std::conj(coeff[i]);
  modes_[negate(xi)] = conj;
}

const std::vector<Complex>* FourierTensorField::find(const Mode& xi) const {
  auto it = modes_.find(xi);
  return it == modes_.end() ? nullptr : &it->second;
}

std::vector<Complex>& FourierTensorField::at(const Mode& xi) {
  auto it = modes_.find(xi);
  if (it == modes_.end()) it = modes_.emplace(xi, std::vector<Complex>(components(), 0.0)).first;
  return it->second;
}

double FourierTensorField::reality_defect() const {
  double worst = 0;
  for (const auto& [xi, c] : modes_) {
    const auto* partner = find(negate(xi));
    for (std::size_t i = 0; i < c.size(); ++i) {
      Complex p = partner ? (*partner)[i] : 0.0;
      worst = std::max(worst, std::abs(c[i] - std::conj(p)));
    }
  }
  return worst;
}

bool FourierTensorField::only_constant_mode(double tol) const {
  for (const auto& [xi, c] : modes_) {
    if (is_zero_mode(xi)) continue;
    for (const auto& v : c)
      if (std::abs(v) > tol) return false;
  }
  return true;
}

FourierTensorField& FourierTensorField::operator+=(const FourierTensorField& o) {
  if (o.m_ != m_ || o.rank_ != rank_) throw RankError("field shapes differ");
  for (const auto& [xi, c] : o.modes_) {
    auto& mine = at(xi);
    for (std::size_t i = 0; i < c.size(); ++i) mine[i] += c[i];
  }
  return *this;
}

FourierTensorField& FourierTensorField::operator*=(double s) {
  for (auto& [xi, c] : modes_)
    for (auto& v : c) v *= s;
  return *this;
}

nlohmann::json FourierTensorField::to_json() const {
  nlohmann::json j;
  j["m"] = m_;
  j["rank"] = rank_;
  j["modes"] = nlohmann::json::array();
  for (const auto& [xi, c] : modes_) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (const auto& v : c) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    j["modes"].push_back({{"xi", xi}, {"re", re}, {"im", im}});
  }
  return j;
}

FourierTensorField FourierTensorField::from_json(const nlohmann::json& j) {
  FourierTensorField f(j.at("m").get<int>(), j.at("rank").get<int>());
  for (const auto& mode : j.at("modes")) {
    auto xi = mode.at("xi").get<Mode>();
    auto re = mode.at("re").get<std::vector<double>>();
    auto im = mode.at("im").get<std::vector<double>>();
    if (re.size() != f.components() || im.size() != re.size() || static_cast<int>(xi.size()) != f.n())
      throw Error("field snapshot has the wrong shape");
    auto& c = f.at(xi);
    for (std::size_t i = 0; i < re.size(); ++i) c[i] = Complex(re[i], im[i]);
  }
  return f;
}

double inner(const FourierTensorField& a, const FourierTensorField& b) {
  if (a.m() != b.m() || a.rank() != b.rank()) throw RankError("inner product of different shapes");
  double s = 0;
  for (const auto& [xi, c] : a.modes()) {
    const auto* d = b.find(xi);
    if (!d) continue;
    for (std::size_t i = 0; i < c.size(); ++i) s += (c[i] * std::conj((*d)[i])).real();
  }
  return s;
}

double norm_sq(const FourierTensorField& f) { return inner(f, f); }
double norm(const FourierTensorField& f) { return std::sqrt(norm_sq(f)); }

double grid_norm_sq(const FourierTensorField& f, int N) {
  const int n = f.n();
  for (const auto& [xi, c] : f.modes())
    for (int v : xi) N = std::max(N, std::abs(v));
  const int G = 2 * N + 1;
  const std::size_t points = ipow(G, n);
  std::vector<int> dims(n, G);
  fftw_complex* buf = fftw_alloc_complex(points);
  fftw_plan plan = fftw_plan_dft(n, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  double total = 0;
  for (std::size_t comp = 0; comp < f.components(); ++comp) {
    std::fill(reinterpret_cast<double*>(buf), reinterpret_cast<double*>(buf) + 2 * points, 0.0);
    for (const auto& [xi, c] : f.modes()) {
      std::size_t at = 0;
      for (int v : xi) at = at * G + static_cast<std::size_t>(((v % G) + G) % G);
      buf[at][0] += c[comp].real();
      buf[at][1] += c[comp].imag();
    }
    fftw_execute(plan);
    for (std::size_t p = 0; p < points; ++p) total += buf[p][0] * buf[p][0] + buf[p][1] * buf[p][1];
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return total / static_cast<double>(points);
}

const char* op_name(TorusOp op) {
  switch (op) {
    case TorusOp::D: return "D";
    case TorusOp::DstarD: return "D*D";
    case TorusOp::delta_g: return "delta_g";
    case TorusOp::delta_g_star: return "delta_g*";
    case TorusOp::trace: return "tr";
    case TorusOp::dD: return "d^D";
    case TorusOp::deltaD: return "delta^D";
    case TorusOp::j_conj: return "J-conjugation";
  }
  return "?";
}

FourierTensorField apply_operator(TorusOp op, const FourierTensorField& f) {
  const int n = f.n();
  switch (op) {
    case TorusOp::D: {
      const std::size_t inner_size = f.components();
      return map_modes(f, f.rank() + 1, [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
        for (int a = 0; a < n; ++a)
          for (std::size_t r = 0; r < inner_size; ++r) o[a * inner_size + r] = kI * k[a] * c[r];
      });
    }
    case TorusOp::DstarD:
      return map_modes(f, f.rank(), [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
        double k2 = 0;
        for (double v : k) k2 += v * v;
        for (std::size_t r = 0; r < c.size(); ++r) o[r] = k2 * c[r];
      });
    case TorusOp::delta_g: {
      if (f.rank() < 1) throw RankError("delta_g expects rank >= 1");
      const std::size_t rest = ipow(n, f.rank() - 1);
      return map_modes(f, f.rank() - 1, [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
        for (int i = 0; i < n; ++i)
          for (std::size_t r = 0; r < rest; ++r) o[r] -= kI * k[i] * c[i * rest + r];
      });
    }
    case TorusOp::delta_g_star:
      require_rank(f, 1, "delta_g*");
      return map_modes(f, 2, [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y) o[idx2(n, x, y)] = 0.5 * kI * (k[x] * c[y] + k[y] * c[x]);
      });
    case TorusOp::trace:
      require_rank(f, 2, "tr");
      return map_modes(f, 0, [&](const Mode&, const std::vector<double>&, const auto& c, auto& o) {
        for (int i = 0; i < n; ++i) o[0] += c[idx2(n, i, i)];
      });
    case TorusOp::dD:
      require_rank(f, 2, "d^D");
      return map_modes(f, 3, [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
              o[idx3(n, x, y, z)] = kI * (k[y] * c[idx2(n, x, z)] - k[z] * c[idx2(n, x, y)]);
      });
    case TorusOp::deltaD:
      require_rank(f, 3, "delta^D");
      return map_modes(f, 2, [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (int i = 0; i < n; ++i)
              o[idx2(n, x, y)] += kI * k[i] * (c[idx3(n, x, y, i)] + c[idx3(n, y, x, i)]);
      });
    case TorusOp::j_conj: {
      const auto J = complex_structure_matrix(f.m());
      if (f.rank() == 1)
        return map_modes(f, 1, [&](const Mode&, const std::vector<double>&, const auto& c, auto& o) {
          for (int x = 0; x < n; ++x)
            for (int u = 0; u < n; ++u) o[x] += J[u * n + x] * c[u];
        });
      require_rank(f, 2, "J-conjugation");
      return map_modes(f, 2, [&](const Mode&, const std::vector<double>&, const auto& c, auto& o) {
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (int u = 0; u < n; ++u)
              for (int v = 0; v < n; ++v) o[idx2(n, x, y)] += J[u * n + x] * J[v * n + y] * c[idx2(n, u, v)];
      });
    }
  }
  throw Error("unknown operator");
}

FourierTensorField exterior_d(const FourierTensorField& f) {
  const int n = f.n();
  if (f.rank() == 0) return apply_operator(TorusOp::D, f);
  require_rank(f, 1, "d");
  return map_modes(f, 2, [&](const Mode&, const std::vector<double>& k, const auto& c, auto& o) {
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) o[idx2(n, x, y)] = kI * (k[x] * c[y] - k[y] * c[x]);
  });
}

FourierTensorField codifferential(const FourierTensorField& f) { return apply_operator(TorusOp::delta_g, f); }

FourierTensorField d_star(const FourierTensorField& f) { return apply_operator(TorusOp::delta_g, f); }

FourierTensorField hodge_laplacian(const FourierTensorField& w) {
  require_rank(w, 1, "Hodge Laplacian");
  return exterior_d(codifferential(w)) + codifferential(exterior_d(w));
}

FourierTensorField metric_field(int m) {
  FourierTensorField g(m, 2);
  const int n = 2 * m;
  std::vector<Complex> c(ipow(n, 2), 0.0);
  for (int i = 0; i < n; ++i) c[idx2(n, i, i)] = 1.0;
  g.set_mode(Mode(n, 0), c);
  return g;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Mode> draw_modes(const FlatTorusModel& model, std::mt19937_64& rng, int count) {
  const int n = model.n();
  const std::size_t total = (ipow(2 * model.N + 1, n) - 1) / 2;
  std::set<Mode> chosen;
  std::uniform_int_distribution<int> pick(-model.N, model.N);
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(std::max(count, 0)), total);
  while (chosen.size() < want) {
    Mode xi(n);
    for (auto& v : xi) v = pick(rng);
    if (is_zero_mode(xi)) continue;
    if (!upper_half(xi)) xi = negate(xi);
    chosen.insert(xi);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace

FourierTensorField random_field(const FlatTorusModel& model, int rank, std::uint64_t seed, const FieldSpec& spec) {
  if (model.m < 1 || model.N < 1) throw Error("torus model needs m >= 1 and N >= 1");
  if (spec.symmetric && rank != 2) throw RankError("symmetric fields have rank 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierTensorField f(model.m, rank);
  const int n = model.n();
  auto sample = [&]() {
    std::vector<Complex> c(f.components());
    for (auto& v : c) v = Complex(normal(rng), normal(rng));
    if (spec.symmetric)
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) c[idx2(n, y, x)] = c[idx2(n, x, y)];
    return c;
  };
  if (spec.constant) f.set_mode(Mode(n, 0), sample());
  for (const auto& xi : draw_modes(model, rng, spec.count)) f.set_mode(xi, sample());
  return f;
}

FourierTensorField random_antisymmetric3(const FlatTorusModel& model, std::uint64_t seed, int count) {
  auto t = random_field(model, 3, seed, {count, true, false});
  const int n = model.n();
  FourierTensorField a(model.m, 3);
  for (const auto& [xi, c] : t.modes()) {
    auto& o = a.at(xi);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) o[idx3(n, x, y, z)] = 0.5 * (c[idx3(n, x, y, z)] - c[idx3(n, x, z, y)]);
  }
  return a;
}

namespace {

Eigen::MatrixXd tt_j_projector(const Mode& xi, const std::vector<double>& J, int n, bool j_invariant) {
  std::vector<Eigen::VectorXd> rows;
  const int dim = n * n;
  auto row = [&]() { return Eigen::VectorXd::Zero(dim).eval(); };
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      auto r = row();
      r[idx2(n, x, y)] = 1;
      r[idx2(n, y, x)] = -1;
      rows.push_back(r);
    }
  if (j_invariant)
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      auto r = row();
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) r[idx2(n, u, v)] += J[u * n + x] * J[v * n + y];
      r[idx2(n, x, y)] -= 1;
      rows.push_back(r);
    }
  {
    auto r = row();
    for (int i = 0; i < n; ++i) r[idx2(n, i, i)] = 1;
    rows.push_back(r);
  }
  for (int z = 0; z < n; ++z) {
    auto r = row();
    for (int i = 0; i < n; ++i) r[idx2(n, i, z)] = xi[i];
    rows.push_back(r);
  }
  Eigen::MatrixXd A(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > 1e-10 * std::max(1.0, s[0])) ++rank;
  Eigen::MatrixXd N = svd.matrixV().rightCols(dim - rank);
  return N * N.transpose();
}

}  // namespace

FourierTensorField project_tt_j(const FourierTensorField& h, bool j_invariant) {
  require_rank(h, 2, "TT projection");
  const int n = h.n();
  const auto J = complex_structure_matrix(h.m());
  FourierTensorField out(h.m(), 2);
  std::map<Mode, Eigen::MatrixXd> cache;
  for (const auto& [xi, c] : h.modes()) {
    // Share the projector between xi and -xi so the result stays real.
    Mode key = upper_half(xi) || is_zero_mode(xi) ? xi : negate(xi);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, tt_j_projector(key, J, n, j_invariant)).first;
    const Eigen::MatrixXd& P = it->second;
    Eigen::VectorXd re(n * n), im(n * n);
    for (int t = 0; t < n * n; ++t) {
      re[t] = c[t].real();
      im[t] = c[t].imag();
    }
    Eigen::VectorXd pr = P * re, pi = P * im;
    auto& o = out.at(xi);
    for (int t = 0; t < n * n; ++t) o[t] = Complex(pr[t], pi[t]);
  }
  return out;
}

double tt_j_defect(const FourierTensorField& h, bool j_invariant) {
  require_rank(h, 2, "TT defect");
  const int n = h.n();
  const auto J = complex_structure_matrix(h.m());
  double worst = 0;
  for (const auto& [xi, c] : h.modes()) {
    Complex tr = 0;
    for (int x = 0; x < n; ++x) {
      tr += c[idx2(n, x, x)];
      Complex div = 0;
      for (int i = 0; i < n; ++i) div += static_cast<double>(xi[i]) * c[idx2(n, i, x)];
      worst = std::max(worst, std::abs(div));
      for (int y = 0; y < n; ++y) {
        worst = std::max(worst, std::abs(c[idx2(n, x, y)] - c[idx2(n, y, x)]));
        Complex jc = 0;
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) jc += J[u * n + x] * J[v * n + y] * c[idx2(n, u, v)];
        if (j_invariant) worst = std::max(worst, std::abs(jc - c[idx2(n, x, y)]));
      }
    }
    worst = std::max(worst, std::abs(tr));
  }
  return worst;
}

FourierTensorField kaehler_variation_from_potential(const FourierTensorField& phi) {
  require_rank(phi, 0, "potential");
  auto hess = apply_operator(TorusOp::D, apply_operator(TorusOp::D, phi));
  return 0.5 * (hess + apply_operator(TorusOp::j_conj, hess));
}

namespace {

double relative(double defect, double scale) { return defect / std::max(scale, 1.0); }

}  // namespace

OneFormResiduals one_form_identities(const FourierTensorField& w, double tol) {
  require_rank(w, 1, "one-form identities");
  const auto ddstar = apply_operator(TorusOp::delta_g, apply_operator(TorusOp::delta_g_star, w));
  const auto dd = codifferential(exterior_d(w));
  const auto ddelta = exterior_d(codifferential(w));
  const auto rough = apply_operator(TorusOp::DstarD, w);
  const auto lap = hodge_laplacian(w);
  const double scale = std::max({norm(2.0 * rough), norm(2.0 * ddstar), norm(dd), norm(w)});

  OneFormResiduals r;
  r.killing_split = relative(norm(2.0 * ddstar + dd - 2.0 * rough), scale);
  r.weitzenbock = relative(norm(lap - rough), scale);
  r.gauge_identity = relative(norm(2.0 * ddstar - ddelta), scale);
  const double base = std::max(norm(w), 1.0);
  r.harmonic = norm(lap) <= tol * base;
  r.parallel = norm(apply_operator(TorusOp::D, w)) <= tol * base;
  r.constant = w.only_constant_mode(tol * base);
  return r;
}

PotentialResiduals potential_residuals(const FourierTensorField& h) {
  require_rank(h, 2, "potential residuals");
  PotentialResiduals r;
  const auto jh = apply_operator(TorusOp::j_conj, h);
  for (const auto& [xi, c] : h.modes()) {
    const auto* d = jh.find(xi);
    for (std::size_t i = 0; i < c.size(); ++i) r.j_invariance = std::max(r.j_invariance, std::abs((*d)[i] - c[i]));
  }
  const auto dtr = exterior_d(apply_operator(TorusOp::trace, h));
  const auto div = apply_operator(TorusOp::delta_g, h);
  r.trace_divergence = relative(norm(dtr + 2.0 * div), std::max(norm(dtr), norm(2.0 * div)));
  return r;
}

FlatHessian hessian_flat_check(const FourierTensorField& h) {
  require_rank(h, 2, "flat Hessian");
  const int n = h.n();
  // Linearized Ricci contraction from the second derivatives of h.
  const auto d2 = apply_operator(TorusOp::D, apply_operator(TorusOp::D, h));
  FourierTensorField rbar(h.m(), 2);
  for (const auto& [xi, c] : d2.modes()) {
    auto& o = rbar.at(xi);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        Complex s = 0;
        for (int i = 0; i < n; ++i)
          s += c[idx4(n, i, y, x, i)] + c[idx4(n, x, i, i, y)] - c[idx4(n, x, y, i, i)] - c[idx4(n, i, i, x, y)];
        o[idx2(n, x, y)] = 0.5 * s;
      }
  }
  const auto ddd = apply_operator(TorusOp::deltaD, apply_operator(TorusOp::dD, h));
  FlatHessian out;
  out.assembled = 2.0 * inner(rbar, ddd);
  out.closed_form = 2.0 * norm_sq(apply_operator(TorusOp::DstarD, h));
  return out;
}

NormTriple norm_triple(const FourierTensorField& h) {
  return {norm_sq(apply_operator(TorusOp::DstarD, h)), norm_sq(apply_operator(TorusOp::D, h)), norm_sq(h)};
}

AdjointnessReport measure_adjointness(const FlatTorusModel& model, std::uint64_t seed) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
  const auto h = random_field(model, 2, seed, {50, true, true});
  const auto w = random_field(model, 1, seed + 1);
  const auto T = random_field(model, 3, seed + 2);
  const auto A = random_antisymmetric3(model, seed + 3);

  AdjointnessReport r;
  r.delta_g = rel(inner(apply_operator(TorusOp::delta_g, h), w), inner(h, apply_operator(TorusOp::delta_g_star, w)));
  r.d_star = rel(inner(apply_operator(TorusOp::D, h), T), inner(h, d_star(T)));
  const double lhs = inner(apply_operator(TorusOp::dD, h), A);
  const double rhs = inner(h, apply_operator(TorusOp::deltaD, A));
  r.dD_plus = rel(lhs, rhs);
  r.dD_minus = rel(lhs, -rhs);
  r.sigma = r.dD_plus <= 1e-10 ? 1 : r.dD_minus <= 1e-10 ? -1 : 0;
  return r;
}

}  // namespace kahler
