#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kahler {

inline constexpr int kMaxJetOrder = 4;

// Non-connector factor kinds. The metric g and the complex structure J never
// appear as factors of a Monomial: they are dissolved into edges and tokens.
enum class Kind : std::uint8_t { Curv = 0, H = 1, Omega = 2 };

// A curvature tensor, or a jet D^k of h or of the one-form w. Ordered jets
// carry nested covariant derivatives (slot 0 outermost); symmetrized jets
// carry the average over all derivative orders. Jets of order <= 1 are
// always flagged symmetrized.
struct FactorType {
  Kind kind = Kind::H;
  std::uint8_t order = 0;
  bool sym = true;

  static FactorType curvature() { return {Kind::Curv, 0, true}; }
  static FactorType h(int order, bool sym = true);
  static FactorType omega(int order, bool sym = true);

  int base() const;  // tensor slots after the derivative slots
  int slots() const { return order + base(); }
  bool is_jet() const { return kind != Kind::Curv; }
  int code() const { return int(kind) * 64 + order * 2 + (sym ? 1 : 0); }
  std::string name() const;
  friend bool operator==(const FactorType& a, const FactorType& b) { return a.code() == b.code(); }
  friend bool operator<(const FactorType& a, const FactorType& b) { return a.code() < b.code(); }
};

struct SlotPerm {
  std::vector<std::uint8_t> perm;  // new slot t holds old slot perm[t]
  int sign = 1;
};

const std::vector<SlotPerm>& symmetry_group(const FactorType& t);

// Slot pairs across which a J token may be moved at the cost of a sign.
std::vector<std::pair<int, int>> j_links(const FactorType& t, bool h_j_invariant);

// A contraction graph. Endpoints are the free indices [0, rank) followed by
// the slots of each factor in order. Every endpoint is matched to exactly
// one other endpoint; a matched pair (A, B) stands for the sum over an
// orthonormal frame of A(J^tA e_i) B(J^tB e_i), where a free endpoint a acts
// as the covector <., e_a>.
struct Monomial {
  std::vector<FactorType> factors;
  int rank = 0;
  std::vector<int> partner;
  std::vector<std::uint8_t> token;

  int endpoints() const { return static_cast<int>(partner.size()); }
  int offset(int f) const;  // endpoint index of slot 0 of factor f
  int factor_of(int endpoint) const;  // -1 for free endpoints
  int derivative_count() const;
  int h_degree() const;
  int max_order() const;
  std::string key() const;
  std::string str() const;
};

struct Canonical {
  Monomial mono;
  int sign = 0;  // 0: the monomial vanishes by symmetry
};

Canonical canonical_form(const Monomial& m, bool h_j_invariant);

}  // namespace kahler
