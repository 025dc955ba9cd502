#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "covspec/mixed_moments.hpp"

#include <nlohmann/json_fwd.hpp>

namespace covspec {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// One aggregated contribution to a limiting moment:
//   coefficient * c^(r-1) * prod_l dt_l^(s_counts[l]) * prod_a M_{ccmis[a]}.
// ccmis[0] belongs to the component containing the trace starting index; the
// remaining words are stored sorted. All words are canonical rotations.
struct ExpansionTerm {
  int r = 1;
  std::vector<int> s_counts;            // per interval, length m
  std::vector<MixedMomentKey> ccmis;    // ccmis[0] = head component's word
  Rational coefficient = 0;
};

struct MomentExpansion {
  int k = 0;
  int m = 0;
  std::vector<ExpansionTerm> terms;  // sorted by term key, coefficients nonzero

  // Coefficients of c^0, c^1, ..., c^(k-1) with dt and M substituted exactly.
  std::vector<Rational> c_polynomial(
      const std::vector<Rational>& deltas,
      const std::function<Rational(const MixedMomentKey&)>& moment) const;

  void check_invariants() const;  // length/positivity bookkeeping
};

// Key used to aggregate and compare terms across engines.
struct TermKey {
  int r;
  std::vector<int> s_counts;
  std::vector<MixedMomentKey> ccmis;
  auto operator<=>(const TermKey&) const = default;
};

TermKey term_key(const ExpansionTerm& t);

// Builds a sorted expansion from (key -> coefficient), dropping zeros.
MomentExpansion expansion_from_map(int k, int m, const std::map<TermKey, Rational>& coeffs);

// Floating-point evaluation: deltas must be positive and sum to 1 within
// 1e-12; the provider must cover every word.
double evaluate_expansion(const MomentExpansion& e, double c, const std::vector<double>& deltas,
                          const MixedMomentProvider& provider);

nlohmann::json expansion_to_json(const MomentExpansion& e);

std::string rational_to_string(const Rational& q);

}  // namespace covspec
