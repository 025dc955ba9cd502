#pragma once

#include <vector>

#include "covspec/expansion.hpp"
#include "covspec/qgraph_oracle.hpp"

#include <nlohmann/json_fwd.hpp>

namespace covspec {

// Ordered composition nu_1 + ... + nu_r = k, all parts positive.
struct Composition {
  std::vector<int> parts;
};

std::vector<Composition> compositions(int k, int r);

// Labeled tree on vertices 0..r-1; r-1 unordered edges, empty for r = 1.
struct LabeledTree {
  int r = 1;
  std::vector<std::pair<int, int>> edges;  // pairs (a,b) with a < b, sorted
};

// All r^(r-2) labeled trees (Prufer sequences); one tree for r in {1,2}.
std::vector<LabeledTree> enumerate_trees(int r);

// Interpretation of the class-count normalizer: the two readings disagree and
// the literal one divides by zero whenever only the identity relabeling
// exists (all r <= 2).
enum class CoefficientMode { kLiteral, kStabilizer };

CoefficientMode coefficient_mode_from_string(const std::string& s);
std::string to_string(CoefficientMode mode);

// Per-interval powers of the interval lengths for a labeled slot: all
// entries of the first word count, entries after the first elsewhere.
std::vector<int> s_powers(const std::vector<MixedMomentKey>& lprime, int m);

// Class-count coefficient for the slot (r, nu, lprime): sum over labeled
// trees of position-assignment counts divided by the relabeling normalizer.
// Throws ValidationError in literal mode when the normalizer is zero.
Rational class_coefficient(int r, const Composition& nu,
                           const std::vector<MixedMomentKey>& lprime, int m,
                           CoefficientMode mode);

// Symbolic expansion of the closed-form k-th moment (same term space as the
// oracle).
MomentExpansion closed_form_expansion(int k, int m, CoefficientMode mode);

// Numeric evaluation of the closed form.
double closed_form_moment(int k, double c, const std::vector<double>& deltas,
                          const MixedMomentProvider& provider, CoefficientMode mode);

struct AuditDiff {
  int r = 0;
  std::vector<int> nu;
  std::vector<MixedMomentKey> lprime;
  Rational formula_coeff = 0;
  Rational oracle_coeff = 0;
};

struct AuditReport {
  int k = 0;
  int m = 0;
  CoefficientMode mode = CoefficientMode::kStabilizer;
  bool matches = false;
  std::vector<AuditDiff> diffs;
};

// Exact term-by-term diff between the closed form and the enumeration
// oracle. Reports, never throws on mismatch.
AuditReport compare_formula_oracle(int k, int m, CoefficientMode mode,
                                   const OracleCaps& caps = {});

nlohmann::json audit_to_json(const AuditReport& report);

}  // namespace covspec
