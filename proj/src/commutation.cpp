#include "kahler/commutation.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

#include "kahler/error.hpp"

namespace kahler {

namespace {

// Free slots are the negative labels -1, -2, ...; dummies are positive.
struct Template {
  std::vector<RawTerm> terms;
};

int placeholder(int i) { return -1 - i; }

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::vector<RawTerm> instantiate(const Template& t, const std::vector<int>& labels, LabelGen& gen) {
  std::vector<RawTerm> out;
  out.reserve(t.terms.size());
  for (const auto& term : t.terms) {
    RawTerm r = term;
    std::map<int, int> ren;
    for (auto& f : r.factors) {
      for (auto& l : f.labels) {
        if (l < 0) {
          l = labels.at(-1 - l);
        } else {
          auto it = ren.find(l);
          if (it == ren.end()) it = ren.emplace(l, gen()).first;
          l = it->second;
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

const Template& ordered_template(Kind kind, int k);

Template build_ordered(Kind kind, int k) {
  const int nb = kind == Kind::H ? 2 : 1;
  FactorType sym_type = kind == Kind::H ? FactorType::h(k, true) : FactorType::omega(k, true);
  std::vector<int> all(k + nb);
  for (int i = 0; i < k + nb; ++i) all[i] = placeholder(i);
  Template t;
  t.terms.push_back(RawTerm{Poly(1L), {RawFactor::jet(sym_type, all)}});
  if (k < 2) return t;

  LabelGen gen(1);
  const Rational weight = 1 / factorial(k);
  std::vector<int> base(all.begin() + k, all.end());
  std::vector<int> a(all.begin(), all.begin() + k);
  std::vector<int> sigma(k);
  std::iota(sigma.begin(), sigma.end(), 0);

  // D_a - D_{sigma a} telescoped along adjacent swaps.
  auto swap_step = [&](const std::vector<int>& cur, int i) {
    std::vector<int> inner;  // labels of the slots of D_{cur[i+2..]} X(base)
    inner.insert(inner.end(), cur.begin() + i + 2, cur.end());
    inner.insert(inner.end(), base.begin(), base.end());
    for (std::size_t s = 0; s < inner.size(); ++s) {
      int d = gen();
      std::vector<int> outer_derivs(cur.begin(), cur.begin() + i);
      std::vector<int> rest = inner;
      rest[s] = d;
      outer_derivs.insert(outer_derivs.end(), rest.begin(), rest.end() - nb);
      std::vector<int> new_base(rest.end() - nb, rest.end());
      std::vector<int> labels = outer_derivs;
      labels.insert(labels.end(), new_base.begin(), new_base.end());
      for (auto lower : instantiate(ordered_template(kind, k - 2), labels, gen)) {
        lower.coeff *= Poly(weight);
        lower.factors.push_back(RawFactor::R(cur[i], cur[i + 1], inner[s], d));
        t.terms.push_back(std::move(lower));
      }
    }
  };

  do {
    std::vector<int> cur = a;
    std::vector<int> target(k);
    for (int i = 0; i < k; ++i) target[i] = a[sigma[i]];
    for (int pos = 0; pos < k; ++pos) {
      int j = static_cast<int>(std::find(cur.begin() + pos, cur.end(), target[pos]) - cur.begin());
      for (; j > pos; --j) {
        swap_step(cur, j - 1);
        std::swap(cur[j - 1], cur[j]);
      }
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return t;
}

const Template& ordered_template(Kind kind, int k) {
  if (k > kMaxJetOrder) throw OverflowError("jet order " + std::to_string(k) + " exceeds the configured maximum");
  static std::mutex mu;
  static std::map<std::pair<int, int>, Template> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({int(kind), k});
    if (it != cache.end()) return it->second;
  }
  Template t = build_ordered(kind, k);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(int(kind), k), std::move(t)).first->second;
}

}  // namespace

std::vector<RawTerm> ordered_jet_expansion(Kind kind, const std::vector<int>& derivs,
                                           const std::vector<int>& base, LabelGen& gen) {
  std::vector<int> labels = derivs;
  labels.insert(labels.end(), base.begin(), base.end());
  return instantiate(ordered_template(kind, static_cast<int>(derivs.size())), labels, gen);
}

std::vector<RawTerm> ordered_jet_correction(Kind kind, const std::vector<int>& derivs,
                                            const std::vector<int>& base, LabelGen& gen) {
  auto all = ordered_jet_expansion(kind, derivs, base, gen);
  all.erase(all.begin());
  return all;
}

std::vector<RawTerm> derivative(const RawTerm& t, int label) {
  std::vector<RawTerm> out;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    const RawFactor& f = t.factors[i];
    if (f.kind != RawKind::H && f.kind != RawKind::Omega) continue;
    if (f.order + 1 > kMaxJetOrder)
      throw OverflowError("jet order " + std::to_string(f.order + 1) + " exceeds the configured maximum");
    const int k = f.order;
    std::vector<int> derivs(f.labels.begin(), f.labels.begin() + k);
    std::vector<int> base(f.labels.begin() + k, f.labels.end());
    FactorType up = f.kind == RawKind::H ? FactorType::h(k + 1, false) : FactorType::omega(k + 1, false);
    if (!f.sym || k <= 1) {
      RawTerm r = t;
      std::vector<int> ls{label};
      ls.insert(ls.end(), f.labels.begin(), f.labels.end());
      r.factors[i] = RawFactor::jet(up, std::move(ls));
      out.push_back(std::move(r));
      continue;
    }
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    Poly w(1 / factorial(k));
    do {
      RawTerm r = t;
      r.coeff *= w;
      std::vector<int> ls{label};
      for (int p : perm) ls.push_back(derivs[p]);
      ls.insert(ls.end(), base.begin(), base.end());
      r.factors[i] = RawFactor::jet(up, std::move(ls));
      out.push_back(std::move(r));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

RawExpr derivative(const RawExpr& e, int label) {
  RawExpr out;
  out.free = e.free;
  auto it = std::find(out.free.begin(), out.free.end(), label);
  if (it != out.free.end()) out.free.erase(it);
  else out.free.insert(out.free.begin(), label);
  for (const auto& t : e.terms) {
    for (auto& r : derivative(t, label)) out.terms.push_back(std::move(r));
  }
  return out;
}

}  // namespace kahler
