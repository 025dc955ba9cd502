#include "covspec/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "covspec/errors.hpp"

namespace covspec {

TermKey term_key(const ExpansionTerm& t) { return TermKey{t.r, t.s_counts, t.ccmis}; }

void MomentExpansion::check_invariants() const {
  for (const auto& t : terms) {
    if (!(t.coefficient > 0)) throw InvariantError("expansion: non-positive coefficient");
    if (t.r < 1 || t.r > k) throw InvariantError("expansion: r out of range");
    if (static_cast<int>(t.s_counts.size()) != m)
      throw InvariantError("expansion: s_counts length != m");
    size_t total_len = 0;
    for (const auto& w : t.ccmis) total_len += w.size();
    if (static_cast<int>(total_len) != k)
      throw InvariantError("expansion: ccmi lengths do not sum to k");
    const int s = std::accumulate(t.s_counts.begin(), t.s_counts.end(), 0);
    if (s != k - t.r + 1) throw InvariantError("expansion: sum of s_counts != k - r + 1");
    if (static_cast<int>(t.ccmis.size()) != t.r)
      throw InvariantError("expansion: ccmi count != r");
  }
}

MomentExpansion expansion_from_map(int k, int m, const std::map<TermKey, Rational>& coeffs) {
  MomentExpansion e;
  e.k = k;
  e.m = m;
  for (const auto& [key, q] : coeffs) {
    if (q == 0) continue;
    ExpansionTerm t;
    t.r = key.r;
    t.s_counts = key.s_counts;
    t.ccmis = key.ccmis;
    t.coefficient = q;
    e.terms.push_back(std::move(t));
  }
  return e;
}

std::vector<Rational> MomentExpansion::c_polynomial(
    const std::vector<Rational>& deltas,
    const std::function<Rational(const MixedMomentKey&)>& moment) const {
  if (static_cast<int>(deltas.size()) != m)
    throw ValidationError("c_polynomial: deltas length != m");
  std::vector<Rational> poly(static_cast<size_t>(k), Rational(0));
  for (const auto& t : terms) {
    Rational v = t.coefficient;
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < t.s_counts[static_cast<size_t>(l)]; ++i)
        v *= deltas[static_cast<size_t>(l)];
    for (const auto& w : t.ccmis) v *= moment(w);
    poly[static_cast<size_t>(t.r - 1)] += v;
  }
  return poly;
}

double evaluate_expansion(const MomentExpansion& e, double c, const std::vector<double>& deltas,
                          const MixedMomentProvider& provider) {
  if (static_cast<int>(deltas.size()) != e.m)
    throw ValidationError("evaluate_expansion: deltas length != m");
  double total = 0.0;
  for (double d : deltas) {
    if (!(d > 0.0)) throw ValidationError("evaluate_expansion: deltas must be positive");
    total += d;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("evaluate_expansion: deltas must sum to 1");

  double sum = 0.0;
  for (const auto& t : e.terms) {
    double v = static_cast<double>(t.coefficient);
    v *= std::pow(c, t.r - 1);
    for (int l = 0; l < e.m; ++l)
      v *= std::pow(deltas[static_cast<size_t>(l)], t.s_counts[static_cast<size_t>(l)]);
    for (const auto& w : t.ccmis) v *= mixed_moment(provider, w);
    sum += v;
  }
  return sum;
}

std::string rational_to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

nlohmann::json expansion_to_json(const MomentExpansion& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : e.terms) {
    nlohmann::json jt;
    jt["r"] = t.r;
    jt["s_counts"] = t.s_counts;
    jt["ccmis"] = t.ccmis;
    if (denominator(t.coefficient) == 1)
      jt["coeff"] = static_cast<std::int64_t>(numerator(t.coefficient));
    else
      jt["coeff"] = rational_to_string(t.coefficient);
    terms.push_back(std::move(jt));
  }
  return nlohmann::json{{"k", e.k}, {"m", e.m}, {"terms", std::move(terms)}};
}

}  // namespace covspec
