#pragma once

#include <optional>
#include <vector>

#include "kahler/monomial.hpp"
#include "kahler/poly.hpp"

namespace kahler {

// Index-labelled form. Every label occurs exactly twice in a term, or once
// if it is listed among the free labels of the enclosing expression.
enum class RawKind : std::uint8_t { Metric, Complex, Curv, H, Omega };

struct RawFactor {
  RawKind kind = RawKind::H;
  std::uint8_t order = 0;
  bool sym = true;
  std::vector<int> labels;

  static RawFactor g(int a, int b) { return {RawKind::Metric, 0, true, {a, b}}; }
  // J(a, b) = g(J e_a, e_b).
  static RawFactor J(int a, int b) { return {RawKind::Complex, 0, true, {a, b}}; }
  static RawFactor R(int a, int b, int c, int d) { return {RawKind::Curv, 0, true, {a, b, c, d}}; }
  static RawFactor jet(const FactorType& t, std::vector<int> labels);
  bool is_connector() const { return kind == RawKind::Metric || kind == RawKind::Complex; }
  FactorType type() const;  // non-connectors only
};

struct RawTerm {
  Poly coeff{1L};
  std::vector<RawFactor> factors;
};

struct RawExpr {
  std::vector<int> free;
  std::vector<RawTerm> terms;
};

class LabelGen {
 public:
  explicit LabelGen(int start = 1000) : next_(start) {}
  int operator()() { return next_++; }

 private:
  int next_;
};

struct GraphTerm {
  Monomial mono;
  Poly coeff;
};

// Dissolves g and J chains; closed connector loops become tr(J^k) factors.
std::optional<GraphTerm> to_graph(const RawTerm& t, const std::vector<int>& free);

// Inverse of to_graph: tokens become explicit J factors.
RawTerm from_graph(const Monomial& m, const std::vector<int>& free, LabelGen& gen);

void relabel(RawTerm& t, int from, int to);

// Gives every label of t that is not in keep a fresh name.
void freshen(RawTerm& t, const std::vector<int>& keep, LabelGen& gen);

RawTerm product(const RawTerm& a, const RawTerm& b);

}  // namespace kahler
