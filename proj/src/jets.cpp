#include "kahler/jets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include <Eigen/Dense>

#include "kahler/error.hpp"
#include "kahler/space_form.hpp"

namespace kahler {
namespace {

std::size_t ipow(int n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

std::size_t encode(const std::vector<int>& idx, int n) {
  std::size_t r = 0;
  for (int v : idx) r = r * n + v;
  return r;
}

std::vector<int> decode(std::size_t code, int len, int n) {
  std::vector<int> idx(len);
  for (int i = len - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(code % n);
    code /= n;
  }
  return idx;
}

// Sorted k-tuples over [0, n).
std::vector<std::vector<int>> multisets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k, 0);
  if (k == 0) return {{}};
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[i];
  }
  return out;
}

// Orthonormal basis of symmetric n x n matrices satisfying the pointwise
// constraints, as columns of an n^2 x d matrix.
Eigen::MatrixXd base_space(int n, const std::vector<double>& J, const JetConstraints& jc) {
  std::vector<Eigen::VectorXd> rows;
  auto cell = [n](int x, int y) { return x * n + y; };
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n * n);
      r[cell(x, y)] = 1;
      r[cell(y, x)] = -1;
      rows.push_back(r);
    }
  if (jc.j_invariant)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n * n);
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) r[cell(u, v)] += J[u * n + x] * J[v * n + y];
        r[cell(x, y)] -= 1;
        rows.push_back(r);
      }
  if (jc.trace_free) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n * n);
    for (int x = 0; x < n; ++x) r[cell(x, x)] = 1;
    rows.push_back(r);
  }
  Eigen::MatrixXd A(rows.size(), n * n);
  for (std::size_t i = 0; i < rows.size(); ++i) A.row(i) = rows[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > 1e-10) ++rank;
  return svd.matrixV().rightCols(n * n - rank);
}

struct Level {
  std::vector<std::vector<int>> sets;
  std::map<std::vector<int>, int> index;
};

struct LinearSystem {
  Eigen::MatrixXd A;
  std::shared_ptr<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod;
};

class Builder {
 public:
  Builder(int m, double c, const JetConstraints& jc)
      : n_(2 * m), c_(c), jc_(jc), R_(curvature_array(m, c)), J_(complex_structure_matrix(m)) {
    B_ = base_space(n_, J_, jc_);
  }

  const std::vector<double>& R() const { return R_; }
  const std::vector<double>& J() const { return J_; }
  const Eigen::MatrixXd& B() const { return B_; }
  int n() const { return n_; }

  double Rc(int a, int b, int x, int y) const { return R_[((a * n_ + b) * n_ + x) * n_ + y]; }

  // Ordered minus symmetrized jet of order k, from the ordered jets of order k-2.
  std::vector<double> correction(int k, const std::vector<double>& lower) const {
    const std::size_t nn = static_cast<std::size_t>(n_) * n_;
    std::vector<double> A(ipow(n_, k) * nn, 0.0);
    if (k < 2 || c_ == 0) return A;
    for (const auto& base : multisets(n_, k)) {
      std::map<std::vector<int>, std::vector<double>> val;
      std::queue<std::vector<int>> todo;
      val[base] = std::vector<double>(nn, 0.0);
      todo.push(base);
      while (!todo.empty()) {
        auto d = todo.front();
        todo.pop();
        for (int i = 0; i + 1 < k; ++i) {
          if (d[i] == d[i + 1]) continue;
          auto child = d;
          std::swap(child[i], child[i + 1]);
          if (val.count(child)) continue;
          auto cv = val[d];
          auto C = commutator(d, i, lower);
          for (std::size_t t = 0; t < nn; ++t) cv[t] -= C[t];
          val[child] = cv;
          todo.push(child);
        }
      }
      std::vector<double> mean(nn, 0.0);
      for (const auto& [d, v] : val)
        for (std::size_t t = 0; t < nn; ++t) mean[t] += v[t];
      for (auto& x : mean) x /= static_cast<double>(val.size());
      for (const auto& [d, v] : val) {
        std::size_t off = encode(d, n_) * nn;
        for (std::size_t t = 0; t < nn; ++t) A[off + t] = v[t] - mean[t];
      }
    }
    return A;
  }

  // O(..u,v..) - O(..v,u..) at swap position i.
  std::vector<double> commutator(const std::vector<int>& d, int i, const std::vector<double>& lower) const {
    const int k = static_cast<int>(d.size());
    const std::size_t nn = static_cast<std::size_t>(n_) * n_;
    std::vector<double> out(nn, 0.0);
    const int u = d[i], v = d[i + 1];
    std::vector<int> rest;  // lower ordered jet derivative indices
    for (int t = 0; t < k; ++t)
      if (t != i && t != i + 1) rest.push_back(t);
    const int inner_start = i;  // position in rest where the inner derivatives begin
    const int inner_len = k - i - 2;
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y) {
        std::vector<int> idx;
        for (int t : rest) idx.push_back(d[t]);
        idx.push_back(x);
        idx.push_back(y);
        double sum = 0;
        for (int s = 0; s < inner_len + 2; ++s) {
          const int pos = inner_start + s;
          const int ts = idx[pos];
          for (int l = 0; l < n_; ++l) {
            double r = Rc(u, v, ts, l);
            if (r == 0) continue;
            auto j = idx;
            j[pos] = l;
            sum += r * lower[encode(j, n_)];
          }
        }
        out[x * n_ + y] = sum;
      }
    return out;
  }

  int n_;
  double c_;
  JetConstraints jc_;
  std::vector<double> R_, J_;
  Eigen::MatrixXd B_;
};

using SystemKey = std::tuple<int, int, double, bool, bool, bool, bool>;
std::mutex g_cache_mutex;
std::map<SystemKey, LinearSystem> g_cache;

// Row descriptors for the order-k constraints; each row is a linear form in
// the order-k ordered jet O = S + A with S unknown.
struct RowTerm {
  std::vector<int> derivs;
  int x, y;
  double w;
};

std::vector<std::vector<RowTerm>> constraint_rows(int n, int k, const std::vector<double>& J,
                                                   const JetConstraints& jc) {
  std::vector<std::vector<RowTerm>> rows;
  if (k < 1) return rows;
  const auto outer = multisets(n, k - 1);
  if (jc.divergence_free)
    for (const auto& beta : outer)
      for (int z = 0; z < n; ++z) {
        std::vector<RowTerm> row;
        for (int i = 0; i < n; ++i) {
          auto d = beta;
          d.push_back(i);
          row.push_back({d, i, z, 1.0});
        }
        rows.push_back(row);
      }
  if (jc.kahler_closed)
    for (const auto& beta : outer)
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
          for (int z = y + 1; z < n; ++z) {
            std::vector<RowTerm> row;
            const int cyc[3][3] = {{x, y, z}, {y, z, x}, {z, x, y}};
            for (const auto& pqr : cyc) {
              auto d = beta;
              d.push_back(pqr[0]);
              for (int u = 0; u < n; ++u) {
                double w = J[u * n + pqr[1]];
                if (w != 0) row.push_back({d, u, pqr[2], w});
              }
            }
            rows.push_back(row);
          }
  return rows;
}

double row_value(const std::vector<RowTerm>& row, const std::vector<double>& O, int n) {
  double s = 0;
  for (const auto& t : row) {
    auto idx = t.derivs;
    idx.push_back(t.x);
    idx.push_back(t.y);
    s += t.w * O[encode(idx, n)];
  }
  return s;
}

}  // namespace

RandomJet RandomJet::generate(int m, double c, int order, const JetConstraints& jc, std::uint64_t seed) {
  if (m < 1) throw Error("random jets need m >= 1");
  if (order < 0 || order > kMaxJetOrder) throw Error("jet order out of range");
  Builder b(m, c, jc);
  const int n = b.n();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  const Eigen::MatrixXd& B = b.B();
  const int dim = static_cast<int>(B.cols());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  RandomJet out;
  out.m_ = m;
  out.c_ = c;
  out.R_ = b.R();
  out.J_ = b.J();

  auto spread = [&](const std::vector<std::vector<int>>& sets, const Eigen::VectorXd& coef, int k) {
    std::vector<double> S(ipow(n, k) * nn, 0.0);
    for (std::size_t s = 0; s < sets.size(); ++s) {
      Eigen::VectorXd cell = B * coef.segment(static_cast<Eigen::Index>(s) * dim, dim);
      auto perm = sets[s];
      do {
        std::size_t off = encode(perm, n) * nn;
        for (std::size_t t = 0; t < nn; ++t) S[off + t] = cell[static_cast<Eigen::Index>(t)];
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return S;
  };

  for (int k = 0; k <= order; ++k) {
    const auto sets = multisets(n, k);
    const Eigen::Index unknowns = static_cast<Eigen::Index>(sets.size()) * dim;
    Eigen::VectorXd coef(unknowns);
    for (Eigen::Index i = 0; i < unknowns; ++i) coef[i] = normal(rng);
    std::vector<double> A =
        k >= 2 ? b.correction(k, out.ordered_[k - 2]) : std::vector<double>(ipow(n, k) * nn, 0.0);
    const auto rows = constraint_rows(n, k, out.J_, jc);
    if (!rows.empty() && unknowns > 0) {
      SystemKey key{m, k, c == 0 ? 0.0 : 1.0, jc.trace_free, jc.divergence_free, jc.j_invariant, jc.kahler_closed};
      LinearSystem* sys = nullptr;
      {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it == g_cache.end()) {
          std::map<std::vector<int>, int> where;
          for (std::size_t s = 0; s < sets.size(); ++s) where[sets[s]] = static_cast<int>(s);
          Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), unknowns);
          for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& t : rows[r]) {
              auto sorted = t.derivs;
              std::sort(sorted.begin(), sorted.end());
              const int s = where.at(sorted);
              for (int q = 0; q < dim; ++q) M(r, s * dim + q) += t.w * B(t.x * n + t.y, q);
            }
          LinearSystem ls;
          ls.A = M;
          ls.cod = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>(M);
          it = g_cache.emplace(key, std::move(ls)).first;
        }
        sys = &it->second;
      }
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) rhs[r] = -row_value(rows[r], A, n);
      Eigen::VectorXd resid = sys->A * coef - rhs;
      coef -= sys->cod->solve(resid);
    }
    auto S = spread(sets, coef, k);
    std::vector<double> O = S;
    for (std::size_t t = 0; t < O.size(); ++t) O[t] += A[t];
    out.sym_.push_back(std::move(S));
    out.ordered_.push_back(std::move(O));
  }

  // Audit every ordering.
  double worst = 0;
  for (int k = 0; k <= order; ++k) {
    const auto& O = out.ordered_[k];
    const std::size_t blocks = ipow(n, k);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const double* h = &O[blk * nn];
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          worst = std::max(worst, std::abs(h[x * n + y] - h[y * n + x]));
          if (jc.j_invariant) {
            double t = 0;
            for (int u = 0; u < n; ++u)
              for (int v = 0; v < n; ++v) t += out.J_[u * n + x] * out.J_[v * n + y] * h[u * n + v];
            worst = std::max(worst, std::abs(t - h[x * n + y]));
          }
        }
      if (jc.trace_free) {
        double t = 0;
        for (int x = 0; x < n; ++x) t += h[x * n + x];
        worst = std::max(worst, std::abs(t));
      }
    }
    if (k >= 1) {
      const std::size_t outer = ipow(n, k - 1);
      for (std::size_t o = 0; o < outer; ++o) {
        auto beta = decode(o, k - 1, n);
        if (jc.divergence_free)
          for (int z = 0; z < n; ++z) {
            double s = 0;
            for (int i = 0; i < n; ++i) {
              auto idx = beta;
              idx.push_back(i);
              idx.push_back(i);
              idx.push_back(z);
              s += O[encode(idx, n)];
            }
            worst = std::max(worst, std::abs(s));
          }
        if (jc.kahler_closed)
          for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
              for (int z = y + 1; z < n; ++z) {
                const int cyc[3][3] = {{x, y, z}, {y, z, x}, {z, x, y}};
                double s = 0;
                for (const auto& pqr : cyc)
                  for (int u = 0; u < n; ++u) {
                    auto idx = beta;
                    idx.push_back(pqr[0]);
                    idx.push_back(u);
                    idx.push_back(pqr[2]);
                    s += out.J_[u * n + pqr[1]] * O[encode(idx, n)];
                  }
                worst = std::max(worst, std::abs(s));
              }
      }
    }
  }
  out.residual_ = worst;
  if (worst > 1e-8) throw ToleranceError("random jet constraints inconsistent, residual " + std::to_string(worst));
  return out;
}

// ---------------------------------------------------------------------------
// Numeric contraction.

namespace {

struct LTensor {
  std::vector<int> labels;
  std::vector<double> data;
};

LTensor self_trace(LTensor t, int n) {
  while (true) {
    int a = -1, b = -1;
    for (std::size_t i = 0; i < t.labels.size() && a < 0; ++i)
      for (std::size_t j = i + 1; j < t.labels.size(); ++j)
        if (t.labels[i] == t.labels[j]) {
          a = static_cast<int>(i);
          b = static_cast<int>(j);
          break;
        }
    if (a < 0) return t;
    const int r = static_cast<int>(t.labels.size());
    LTensor o;
    for (int i = 0; i < r; ++i)
      if (i != a && i != b) o.labels.push_back(t.labels[i]);
    o.data.assign(ipow(n, r - 2), 0.0);
    for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
      auto d = decode(idx, r, n);
      if (d[a] != d[b]) continue;
      std::vector<int> e;
      for (int i = 0; i < r; ++i)
        if (i != a && i != b) e.push_back(d[i]);
      o.data[encode(e, n)] += t.data[idx];
    }
    t = std::move(o);
  }
}

LTensor contract(const LTensor& A, const LTensor& B, int n) {
  std::vector<int> shared, aonly, bonly;
  for (int l : A.labels)
    (std::find(B.labels.begin(), B.labels.end(), l) != B.labels.end() ? shared : aonly).push_back(l);
  for (int l : B.labels)
    if (std::find(A.labels.begin(), A.labels.end(), l) == A.labels.end()) bonly.push_back(l);
  auto strides = [n](const std::vector<int>& labels) {
    std::map<int, std::size_t> s;
    std::size_t st = 1;
    for (int i = static_cast<int>(labels.size()) - 1; i >= 0; --i) {
      s[labels[i]] = st;
      st *= n;
    }
    return s;
  };
  auto sa = strides(A.labels), sb = strides(B.labels);
  auto offsets = [n](const std::vector<int>& labels, const std::map<int, std::size_t>& st) {
    std::vector<std::size_t> off(ipow(n, static_cast<int>(labels.size())), 0);
    for (std::size_t i = 0; i < off.size(); ++i) {
      auto d = decode(i, static_cast<int>(labels.size()), n);
      std::size_t o = 0;
      for (std::size_t j = 0; j < labels.size(); ++j) o += d[j] * st.at(labels[j]);
      off[i] = o;
    }
    return off;
  };
  auto oa = offsets(aonly, sa), ob = offsets(bonly, sb);
  auto osa = offsets(shared, sa), osb = offsets(shared, sb);
  LTensor out;
  out.labels = aonly;
  out.labels.insert(out.labels.end(), bonly.begin(), bonly.end());
  out.data.assign(oa.size() * ob.size(), 0.0);
  for (std::size_t i = 0; i < oa.size(); ++i)
    for (std::size_t j = 0; j < ob.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < osa.size(); ++k) s += A.data[oa[i] + osa[k]] * B.data[ob[j] + osb[k]];
      out.data[i * ob.size() + j] = s;
    }
  return out;
}

// Replace axis `axis` by its value on J^t e_i.
void apply_token(LTensor& t, int axis, int tokens, const std::vector<double>& J, int n) {
  const int r = static_cast<int>(t.labels.size());
  for (int rep = 0; rep < tokens; ++rep) {
    std::vector<double> out(t.data.size(), 0.0);
    for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
      auto d = decode(idx, r, n);
      const int i = d[axis];
      double s = 0;
      for (int u = 0; u < n; ++u) {
        double w = J[u * n + i];
        if (w == 0) continue;
        d[axis] = u;
        s += w * t.data[encode(d, n)];
      }
      out[idx] = s;
    }
    t.data = std::move(out);
  }
}

// Jet of order k+1 with a new outermost derivative slot.
std::vector<double> derivative_of(const FactorType& ft, const RandomJet& jets) {
  const int n = jets.n();
  const int k = ft.order;
  if (k + 1 > jets.order()) throw Error("random jet order too low for the divergence");
  const auto& O = jets.ordered(k + 1);
  if (!ft.sym || k <= 1) return O;
  // D_a S^k(b_1..b_k) = average over orderings of the inner derivatives.
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  std::vector<double> out(O.size(), 0.0);
  const std::size_t blocks = ipow(n, k + 1);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    auto d = decode(blk, k + 1, n);
    std::vector<int> inner(d.begin() + 1, d.end());
    std::sort(inner.begin(), inner.end());
    int count = 0;
    std::vector<double> acc(nn, 0.0);
    std::vector<int> ids(k);
    for (int i = 0; i < k; ++i) ids[i] = i;
    do {
      std::vector<int> e{d[0]};
      for (int i = 0; i < k; ++i) e.push_back(d[1 + ids[i]]);
      const std::size_t off = encode(e, n) * nn;
      for (std::size_t t = 0; t < nn; ++t) acc[t] += O[off + t];
      ++count;
    } while (std::next_permutation(ids.begin(), ids.end()));
    for (std::size_t t = 0; t < nn; ++t) out[blk * nn + t] = acc[t] / count;
  }
  return out;
}

const std::vector<double>& factor_data(const FactorType& ft, const RandomJet& jets) {
  switch (ft.kind) {
    case Kind::Curv:
      return jets.curvature();
    case Kind::H:
      if (ft.order > jets.order()) throw Error("random jet order too low for " + ft.name());
      return ft.sym ? jets.sym(ft.order) : jets.ordered(ft.order);
    case Kind::Omega:
      break;
  }
  throw Error("no random data for " + ft.name());
}

// Contract a monomial. If diff >= 0 the factor diff is differentiated and the
// new slot is contracted against free endpoint 0.
std::vector<double> eval_monomial(const Monomial& mono, const RandomJet& jets, int diff) {
  const int n = jets.n();
  const auto& J = jets.complex_structure();
  const int E = mono.endpoints();
  std::vector<int> edge(E, -1);
  int next = 0;
  for (int e = 0; e < E; ++e)
    if (edge[e] < 0) {
      edge[e] = next;
      edge[mono.partner[e]] = next;
      ++next;
    }
  std::vector<LTensor> ts;
  std::vector<int> out_labels;
  const int diff_label = 1000000;
  for (int a = 0; a < mono.rank; ++a) {
    LTensor conn;
    int out = diff >= 0 && a == 0 ? diff_label : 2000000 + a;
    conn.labels = {out, edge[a]};
    conn.data.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) conn.data[i * n + i] = 1.0;
    // <J^t e_i, e_a>
    apply_token(conn, 1, mono.token[a], J, n);
    ts.push_back(std::move(conn));
    if (!(diff >= 0 && a == 0)) out_labels.push_back(out);
  }
  for (int f = 0; f < static_cast<int>(mono.factors.size()); ++f) {
    const auto& ft = mono.factors[f];
    LTensor t;
    const int off = mono.offset(f);
    if (f == diff) {
      t.labels.push_back(diff_label);
      t.data = derivative_of(ft, jets);
    } else {
      t.data = factor_data(ft, jets);
    }
    for (int s = 0; s < ft.slots(); ++s) t.labels.push_back(edge[off + s]);
    const int shift = f == diff ? 1 : 0;
    for (int s = 0; s < ft.slots(); ++s)
      if (mono.token[off + s]) apply_token(t, s + shift, mono.token[off + s], J, n);
    ts.push_back(self_trace(std::move(t), n));
  }
  while (ts.size() > 1) {
    std::size_t bi = 0, bj = 1;
    std::size_t best = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        std::set<int> u(ts[i].labels.begin(), ts[i].labels.end());
        int shared = 0;
        for (int l : ts[j].labels)
          if (u.count(l)) ++shared;
        if (shared == 0) continue;
        std::size_t size = ts[i].labels.size() + ts[j].labels.size() - 2 * shared;
        std::size_t cost = size * 16 + ts[i].labels.size() + ts[j].labels.size();
        if (cost < best) {
          best = cost;
          bi = i;
          bj = j;
        }
      }
    LTensor c = self_trace(contract(ts[bi], ts[bj], n), n);
    ts.erase(ts.begin() + static_cast<std::ptrdiff_t>(bj));
    ts[bi] = std::move(c);
  }
  if (ts.empty()) return {1.0};
  LTensor& r = ts[0];
  // Permute to the requested free order.
  std::vector<double> out(r.data.size(), 0.0);
  std::vector<int> pos;
  for (int l : out_labels) pos.push_back(static_cast<int>(std::find(r.labels.begin(), r.labels.end(), l) - r.labels.begin()));
  const int rk = static_cast<int>(out_labels.size());
  for (std::size_t idx = 0; idx < r.data.size(); ++idx) {
    auto d = decode(idx, rk, n);
    std::vector<int> e(rk);
    for (int i = 0; i < rk; ++i) e[i] = d[pos[i]];
    out[encode(e, n)] = r.data[idx];
  }
  return out;
}

std::array<double, kVarCount> numeric_vars(const RandomJet& jets) {
  return {static_cast<double>(jets.m()), jets.c(), 0.0, 0.0};
}

}  // namespace

std::vector<double> random_jet_tensor(const TensorExpr& e, const RandomJet& jets) {
  std::vector<double> out(ipow(jets.n(), e.rank()), 0.0);
  const auto vars = numeric_vars(jets);
  for (const auto& [key, term] : e.terms()) {
    const double w = term.coeff.eval_double(vars);
    if (w == 0) continue;
    auto v = eval_monomial(term.mono, jets, -1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * v[i];
  }
  return out;
}

double random_jet_eval(const TensorExpr& e, const RandomJet& jets) {
  if (e.rank() != 0) throw RankError("random_jet_eval needs a scalar expression");
  return random_jet_tensor(e, jets)[0];
}

double random_jet_divergence(const TensorExpr& v, const RandomJet& jets) {
  if (v.rank() != 1) throw RankError("divergence needs a rank-1 expression");
  const auto vars = numeric_vars(jets);
  double total = 0;
  for (const auto& [key, term] : v.terms()) {
    const double w = term.coeff.eval_double(vars);
    if (w == 0) continue;
    for (int f = 0; f < static_cast<int>(term.mono.factors.size()); ++f)
      if (term.mono.factors[f].is_jet()) total += w * eval_monomial(term.mono, jets, f)[0];
  }
  return total;
}

}  // namespace kahler
