#pragma once

#include <map>
#include <string>
#include <string_view>

#include "kahler/tensor_expr.hpp"

namespace kahler {

// Named tensors and scalars available to the expression language in
// addition to the built-ins g, J, R, h, w and the variables m, c, p, u.
struct Env {
  std::map<std::string, TensorExpr> tensors;
  std::map<std::string, Poly> scalars;
};

// Free letters become slots in order of first appearance.
TensorExpr parse_expr(std::string_view text, const Env& env = {}, bool h_j_invariant = false);

// Free letters become slots in the order given by free_order.
TensorExpr parse_expr(std::string_view text, std::string_view free_order, const Env& env = {},
                      bool h_j_invariant = false);

}  // namespace kahler
