#pragma once

#include <vector>

#include "kahler/raw.hpp"

namespace kahler {

// Ordered jet D_{d0} ... D_{dk-1} X(base), X = h or w, rewritten as the
// symmetrized jet plus curvature corrections from the Ricci identity
//   D^2_{u,v} T - D^2_{v,u} T = sum_s sum_l R(u, v, T_s, e_l) T(.. e_l at s ..).
// The first returned term is always the symmetrized jet.
std::vector<RawTerm> ordered_jet_expansion(Kind kind, const std::vector<int>& derivs,
                                           const std::vector<int>& base, LabelGen& gen);

// Same expansion without its leading symmetrized term.
std::vector<RawTerm> ordered_jet_correction(Kind kind, const std::vector<int>& derivs,
                                            const std::vector<int>& base, LabelGen& gen);

// D_label applied to one term by the Leibniz rule. g, J and R are parallel.
// The derivative of a symmetrized jet is the average of ordered jets.
std::vector<RawTerm> derivative(const RawTerm& t, int label);
RawExpr derivative(const RawExpr& e, int label);

}  // namespace kahler
