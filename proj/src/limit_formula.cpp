#include "covspec/limit_formula.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "covspec/errors.hpp"

namespace covspec {

std::vector<Composition> compositions(int k, int r) {
  std::vector<Composition> out;
  Composition cur;
  cur.parts.assign(static_cast<size_t>(r), 1);
  // Recursive fill: part i gets at least 1, remainder distributed left to right.
  std::function<void(int, int)> rec = [&](int idx, int remaining) {
    if (idx == r - 1) {
      cur.parts[static_cast<size_t>(idx)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = 1; v <= remaining - (r - 1 - idx); ++v) {
      cur.parts[static_cast<size_t>(idx)] = v;
      rec(idx + 1, remaining - v);
    }
  };
  if (r >= 1 && k >= r) rec(0, k);
  return out;
}

std::vector<LabeledTree> enumerate_trees(int r) {
  if (r < 1) throw ValidationError("enumerate_trees: r must be >= 1");
  if (r > 8) throw ValidationError("enumerate_trees: r exceeds cap 8");
  std::vector<LabeledTree> out;
  if (r == 1) {
    out.push_back({1, {}});
    return out;
  }
  if (r == 2) {
    out.push_back({2, {{0, 1}}});
    return out;
  }
  // Decode every Prufer sequence of length r-2 over {0..r-1}.
  std::vector<int> seq(static_cast<size_t>(r - 2), 0);
  while (true) {
    std::vector<int> degree(static_cast<size_t>(r), 1);
    for (int v : seq) degree[static_cast<size_t>(v)]++;
    LabeledTree tree;
    tree.r = r;
    std::vector<int> deg = degree;
    for (int v : seq) {
      int leaf = -1;
      for (int u = 0; u < r; ++u)
        if (deg[static_cast<size_t>(u)] == 1) {
          leaf = u;
          break;
        }
      tree.edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
      deg[static_cast<size_t>(leaf)]--;
      deg[static_cast<size_t>(v)]--;
    }
    int u = -1, v = -1;
    for (int w = 0; w < r; ++w)
      if (deg[static_cast<size_t>(w)] == 1) (u < 0 ? u : v) = w;
    tree.edges.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(tree.edges.begin(), tree.edges.end());
    out.push_back(std::move(tree));

    int pos = r - 3;
    while (pos >= 0 && seq[static_cast<size_t>(pos)] == r - 1) seq[static_cast<size_t>(pos--)] = 0;
    if (pos < 0) break;
    seq[static_cast<size_t>(pos)]++;
  }
  return out;
}

CoefficientMode coefficient_mode_from_string(const std::string& s) {
  if (s == "literal") return CoefficientMode::kLiteral;
  if (s == "stabilizer") return CoefficientMode::kStabilizer;
  throw ValidationError("unknown coefficient mode: " + s);
}

std::string to_string(CoefficientMode mode) {
  return mode == CoefficientMode::kLiteral ? "literal" : "stabilizer";
}

std::vector<int> s_powers(const std::vector<MixedMomentKey>& lprime, int m) {
  std::vector<int> s(static_cast<size_t>(m), 0);
  for (size_t a = 0; a < lprime.size(); ++a) {
    const auto& word = lprime[a];
    if (word.empty()) throw ValidationError("s_powers: empty word");
    const size_t from = (a == 0) ? 0 : 1;
    for (size_t i = from; i < word.size(); ++i) {
      const int l = word[i];
      if (l < 1 || l > m) throw ValidationError("s_powers: color out of range");
      s[static_cast<size_t>(l - 1)]++;
    }
  }
  return s;
}

namespace {

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Parent of every vertex in the tree rooted at 0 (parent[0] = -1).
std::vector<int> parents_rooted_at_zero(const LabeledTree& tree) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(tree.r));
  for (const auto& [a, b] : tree.edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  std::vector<int> parent(static_cast<size_t>(tree.r), -2);
  std::vector<int> stack{0};
  parent[0] = -1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adj[static_cast<size_t>(v)])
      if (parent[static_cast<size_t>(u)] == -2) {
        parent[static_cast<size_t>(u)] = v;
        stack.push_back(u);
      }
  }
  return parent;
}

// Position-assignment count for one labeled tree, or 0 if some component
// lacks enough vertical edges of the required color.
BigInt tree_factor(const LabeledTree& tree, const std::vector<MixedMomentKey>& lprime, int m) {
  const int r = tree.r;
  const std::vector<int> parent = parents_rooted_at_zero(tree);
  std::vector<std::vector<int>> adj(static_cast<size_t>(r));
  for (const auto& [a, b] : tree.edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }

  BigInt product = 1;
  for (int a = 0; a < r; ++a) {
    // n_l: color counts of component a's word (skip the first entry off the
    // head component).
    std::vector<int> n(static_cast<size_t>(m), 0);
    const auto& word = lprime[static_cast<size_t>(a)];
    const size_t from = (a == 0) ? 0 : 1;
    for (size_t i = from; i < word.size(); ++i) n[static_cast<size_t>(word[i] - 1)]++;

    // n_l^G: children of a (neighbors minus the parent) whose word starts
    // with color l.
    std::vector<int> ng(static_cast<size_t>(m), 0);
    for (int u : adj[static_cast<size_t>(a)]) {
      if (u == parent[static_cast<size_t>(a)]) continue;
      ng[static_cast<size_t>(lprime[static_cast<size_t>(u)][0] - 1)]++;
    }

    for (int l = 0; l < m; ++l) {
      if (ng[static_cast<size_t>(l)] > n[static_cast<size_t>(l)]) return 0;
      // Falling factorial n! / (n - ng)!
      for (int i = 0; i < ng[static_cast<size_t>(l)]; ++i)
        product *= (n[static_cast<size_t>(l)] - i);
    }
  }
  return product;
}

LabeledTree permute_tree(const LabeledTree& tree, const std::vector<int>& perm) {
  LabeledTree out;
  out.r = tree.r;
  out.edges.reserve(tree.edges.size());
  for (const auto& [a, b] : tree.edges) {
    const int pa = perm[static_cast<size_t>(a)];
    const int pb = perm[static_cast<size_t>(b)];
    out.edges.emplace_back(std::min(pa, pb), std::max(pa, pb));
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

// Count relabelings of components 1..r-1 fixing both the word sequence and
// the tree.
long long stabilizer_size(const LabeledTree& tree, const std::vector<MixedMomentKey>& lprime) {
  const int r = tree.r;
  if (r <= 2) return 1;
  std::vector<int> tail(static_cast<size_t>(r - 1));
  std::iota(tail.begin(), tail.end(), 1);
  long long count = 0;
  std::vector<int> perm(static_cast<size_t>(r));
  perm[0] = 0;
  do {
    for (int i = 1; i < r; ++i) perm[static_cast<size_t>(i)] = tail[static_cast<size_t>(i - 1)];
    bool fixes_words = true;
    for (int a = 1; a < r && fixes_words; ++a)
      if (lprime[static_cast<size_t>(perm[static_cast<size_t>(a)])] != lprime[static_cast<size_t>(a)])
        fixes_words = false;
    if (!fixes_words) continue;
    if (permute_tree(tree, perm).edges == tree.edges) ++count;
  } while (std::next_permutation(tail.begin(), tail.end()));
  return count;
}

}  // namespace

Rational class_coefficient(int r, const Composition& nu,
                           const std::vector<MixedMomentKey>& lprime, int m,
                           CoefficientMode mode) {
  if (static_cast<int>(nu.parts.size()) != r || static_cast<int>(lprime.size()) != r)
    throw ValidationError("class_coefficient: r, nu, lprime sizes disagree");
  for (int a = 0; a < r; ++a)
    if (static_cast<int>(lprime[static_cast<size_t>(a)].size()) != nu.parts[static_cast<size_t>(a)])
      throw ValidationError("class_coefficient: word lengths do not match composition");

  Rational total = 0;
  for (const LabeledTree& tree : enumerate_trees(r)) {
    const long long stab = stabilizer_size(tree, lprime);
    long long normalizer;
    if (mode == CoefficientMode::kStabilizer) {
      normalizer = factorial(r - 1) / stab;  // orbit size of (words, tree)
    } else {
      normalizer = factorial(r - 1) - stab;  // permutations changing something
      if (normalizer == 0)
        throw ValidationError(
            "class_coefficient: literal mode normalizer is zero (division by zero); "
            "only the identity relabeling exists for r <= 2");
    }
    const BigInt factor = tree_factor(tree, lprime, m);
    if (factor == 0) continue;
    total += Rational(factor) / normalizer;
  }
  return total;
}

MomentExpansion closed_form_expansion(int k, int m, CoefficientMode mode) {
  if (k < 1) throw ValidationError("closed_form_expansion: k must be >= 1");
  if (m < 1) throw ValidationError("closed_form_expansion: m must be >= 1");

  std::map<TermKey, Rational> coeffs;
  std::vector<int> word(static_cast<size_t>(k), 1);
  for (int r = 1; r <= k; ++r) {
    for (const Composition& nu : compositions(k, r)) {
      // All color words, split along nu into per-component words.
      std::fill(word.begin(), word.end(), 1);
      while (true) {
        std::vector<MixedMomentKey> lprime(static_cast<size_t>(r));
        int offset = 0;
        for (int a = 0; a < r; ++a) {
          lprime[static_cast<size_t>(a)].assign(word.begin() + offset,
                                                word.begin() + offset + nu.parts[static_cast<size_t>(a)]);
          offset += nu.parts[static_cast<size_t>(a)];
        }
        const Rational q = class_coefficient(r, nu, lprime, m, mode);
        if (q != 0) {
          TermKey key;
          key.r = r;
          key.s_counts = s_powers(lprime, m);
          key.ccmis.push_back(canonical_rotation(lprime[0]));
          std::vector<MixedMomentKey> rest;
          for (int a = 1; a < r; ++a) rest.push_back(canonical_rotation(lprime[static_cast<size_t>(a)]));
          std::sort(rest.begin(), rest.end());
          key.ccmis.insert(key.ccmis.end(), rest.begin(), rest.end());
          coeffs[key] += q;
        }

        int pos = k - 1;
        while (pos >= 0 && word[static_cast<size_t>(pos)] == m) word[static_cast<size_t>(pos--)] = 1;
        if (pos < 0) break;
        word[static_cast<size_t>(pos)]++;
      }
    }
  }
  return expansion_from_map(k, m, coeffs);
}

double closed_form_moment(int k, double c, const std::vector<double>& deltas,
                          const MixedMomentProvider& provider, CoefficientMode mode) {
  return evaluate_expansion(closed_form_expansion(k, static_cast<int>(deltas.size()), mode), c,
                            deltas, provider);
}

AuditReport compare_formula_oracle(int k, int m, CoefficientMode mode, const OracleCaps& caps) {
  AuditReport report;
  report.k = k;
  report.m = m;
  report.mode = mode;

  const MomentExpansion formula = closed_form_expansion(k, m, mode);
  const MomentExpansion oracle = oracle_moment_expansion(k, m, caps);

  std::map<TermKey, std::pair<Rational, Rational>> table;  // (formula, oracle)
  for (const auto& t : formula.terms) table[term_key(t)].first += t.coefficient;
  for (const auto& t : oracle.terms) table[term_key(t)].second += t.coefficient;

  for (const auto& [key, pair] : table) {
    if (pair.first == pair.second) continue;
    AuditDiff diff;
    diff.r = key.r;
    for (const auto& w : key.ccmis) diff.nu.push_back(static_cast<int>(w.size()));
    diff.lprime = key.ccmis;
    diff.formula_coeff = pair.first;
    diff.oracle_coeff = pair.second;
    report.diffs.push_back(std::move(diff));
  }
  report.matches = report.diffs.empty();
  return report;
}

nlohmann::json audit_to_json(const AuditReport& report) {
  nlohmann::json diffs = nlohmann::json::array();
  for (const auto& d : report.diffs) {
    diffs.push_back(nlohmann::json{{"r", d.r},
                                   {"nu", d.nu},
                                   {"lprime", d.lprime},
                                   {"formula_coeff", rational_to_string(d.formula_coeff)},
                                   {"oracle_coeff", rational_to_string(d.oracle_coeff)}});
  }
  return nlohmann::json{{"k", report.k},
                        {"m", report.m},
                        {"mode", to_string(report.mode)},
                        {"matches", report.matches},
                        {"diffs", std::move(diffs)}};
}

}  // namespace covspec
