#include "kahler/tensor_expr.hpp"

#include <sstream>

#include "kahler/error.hpp"

namespace kahler {

TensorExpr TensorExpr::from_raw(const RawExpr& raw, bool h_j_invariant) {
  TensorExpr e(static_cast<int>(raw.free.size()), h_j_invariant);
  for (const auto& t : raw.terms) {
    if (t.coeff.is_zero()) continue;
    auto g = to_graph(t, raw.free);
    if (g) e.add_monomial(g->mono, g->coeff);
  }
  return e;
}

TensorExpr TensorExpr::scalar(const Poly& p) {
  TensorExpr e(0);
  e.add_canonical(Monomial{}, p);
  return e;
}

RawExpr TensorExpr::to_raw(const std::vector<int>& free, LabelGen& gen) const {
  if (static_cast<int>(free.size()) != rank_) throw RankError("free label count does not match rank");
  RawExpr out;
  out.free = free;
  for (const auto& [k, t] : terms_) {
    RawTerm r = from_graph(t.mono, free, gen);
    r.coeff = t.coeff;
    out.terms.push_back(std::move(r));
  }
  return out;
}

void TensorExpr::add_monomial(const Monomial& m, const Poly& coeff) {
  if (m.rank != rank_) throw RankError("rank mismatch: " + std::to_string(m.rank) + " vs " + std::to_string(rank_));
  Canonical c = canonical_form(m, jinv_);
  if (c.sign == 0) return;
  add_canonical(c.mono, c.sign > 0 ? coeff : -coeff);
}

void TensorExpr::add_canonical(const Monomial& m, const Poly& coeff) {
  if (coeff.is_zero()) return;
  std::string k = m.key();
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(std::move(k), Term{m, coeff});
    return;
  }
  it->second.coeff += coeff;
  if (it->second.coeff.is_zero()) terms_.erase(it);
}

TensorExpr TensorExpr::with_j_invariance(bool on) const {
  if (on == jinv_) return *this;
  TensorExpr out(rank_, on);
  for (const auto& [k, t] : terms_) out.add_monomial(t.mono, t.coeff);
  return out;
}

Poly TensorExpr::coefficient(const std::string& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Poly() : it->second.coeff;
}

TensorExpr TensorExpr::map_coeffs(const std::function<Poly(const Poly&)>& f) const {
  TensorExpr out(rank_, jinv_);
  for (const auto& [k, t] : terms_) out.add_canonical(t.mono, f(t.coeff));
  return out;
}

TensorExpr TensorExpr::specialize(const VarValues& values) const {
  return map_coeffs([&](const Poly& p) { return p.substitute(values); });
}

TensorExpr& TensorExpr::operator+=(const TensorExpr& o) {
  if (o.rank_ != rank_) throw RankError("cannot add tensors of rank " + std::to_string(rank_) + " and " + std::to_string(o.rank_));
  if (o.jinv_ != jinv_) {
    if (!jinv_) *this = with_j_invariance(true);
    TensorExpr oo = o.with_j_invariance(true);
    for (const auto& [k, t] : oo.terms_) add_canonical(t.mono, t.coeff);
    return *this;
  }
  for (const auto& [k, t] : o.terms_) add_canonical(t.mono, t.coeff);
  return *this;
}

TensorExpr& TensorExpr::operator-=(const TensorExpr& o) { return *this += -o; }

TensorExpr TensorExpr::operator-() const {
  return map_coeffs([](const Poly& p) { return -p; });
}

TensorExpr operator*(const Poly& s, const TensorExpr& e) {
  return e.map_coeffs([&](const Poly& p) { return s * p; });
}

bool operator==(const TensorExpr& a, const TensorExpr& b) {
  if (a.rank_ != b.rank_) return false;
  if (a.jinv_ != b.jinv_) return a.with_j_invariance(true) == b.with_j_invariance(true);
  if (a.terms_.size() != b.terms_.size()) return false;
  for (auto ia = a.terms_.begin(), ib = b.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !(ia->second.coeff == ib->second.coeff)) return false;
  }
  return true;
}

std::string TensorExpr::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, t] : terms_) {
    std::string c = t.coeff.str();
    bool neg = !c.empty() && c[0] == '-' && t.coeff.terms().size() == 1;
    if (neg) c = c.substr(1);
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    first = false;
    bool compound = t.coeff.terms().size() > 1;
    std::string body = t.mono.str();
    if (c == "1") {
      os << body;
    } else {
      os << (compound ? "(" + c + ")" : c);
      if (body != "1") os << "*" << body;
    }
  }
  return os.str();
}

}  // namespace kahler
