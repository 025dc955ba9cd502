#pragma once

#include <vector>

#include "covspec/expansion.hpp"

namespace covspec {

// Enumeration of the pairing structures behind the trace-power expansion of
// the Gram-form covariation estimator. Each power k summand is encoded by a
// cyclic graph with 2k horizontal edges on the index line and 2k vertical
// (down/up) edges to one auxiliary line per interval color. Down edge s and
// up edge s' can be glued only when their colors agree; a perfect down-up
// gluing is a color-preserving permutation.
struct VerticalMatching {
  std::vector<int> sigma;  // 0-based: down edge s glued with up edge sigma[s]
};

enum class StructureCategory { C1, C2, C3 };

std::string to_string(StructureCategory c);

// Classification stats for one glued structure.
struct StructureInfo {
  StructureCategory category = StructureCategory::C3;
  int p = 0;  // distinct vertical edges after gluing
  int r = 0;  // connected components of the horizontal-edge subgraph (head)
  int s = 0;  // distinct vertices on the auxiliary lines
};

// One equivalence class of leading-order (category C1) structures, keyed by
// the induced index partitions. Component 0 contains the trace starting
// index; its coloring word and those of the other components are kept in
// traversal order (the first entry of a non-head word is the color of the
// connection toward component 0).
struct SimilarityClass {
  std::vector<int> colors;       // length k, entries 1..m
  std::vector<int> i_partition;  // restricted growth string over 3k indices
  std::vector<int> j_partition;  // restricted growth string over k indices
  int r = 0;
  std::vector<int> nu;                // component sizes, sum k
  std::vector<MixedMomentKey> ccmis;  // per component, traversal order
  std::vector<int> s_counts;          // distinct auxiliary vertices per interval
  int p = 0;                          // = k for C1
};

struct OracleCaps {
  int k_cap = 6;
  int m_cap = 3;
};

// A pair of enumerated classes that share (colors, i_partition) but differ
// in j_partition; recorded, never merged.
struct HeadAmbiguity {
  std::vector<int> colors;
  std::vector<int> i_partition;
};

struct EnumerationResult {
  std::vector<SimilarityClass> classes;
  long long c3_structures = 0;         // matchings discarded as category C3
  long long duplicate_structures = 0;  // distinct matchings mapping to one class
  std::vector<HeadAmbiguity> head_ambiguities;
};

// Classify one structure given raw identifications. Throws ValidationError
// on malformed data (size mismatches, color-inconsistent j classes) and
// InvariantError if a C3 structure violates r + s - 1 < k.
StructureInfo classify_structure(const std::vector<int>& colors,
                                 const std::vector<int>& i_partition,
                                 const std::vector<int>& j_partition);
// Same, with identifications induced by a perfect color-compatible matching.
StructureInfo classify_structure(const std::vector<int>& colors, const VerticalMatching& match);

// Exhaustive enumeration over color words and color-compatible matchings,
// keeping exactly the category C1 structures. Every SimilarityClass invariant
// is asserted during enumeration.
EnumerationResult enumerate_c1_classes(int k, int m, const OracleCaps& caps = {});

// Ground-truth moment expansion: one unit contribution per class, aggregated
// by term key. Coefficients are positive integers (class counts).
MomentExpansion oracle_moment_expansion(int k, int m, const OracleCaps& caps = {});

// Term key of one class (head word first, remaining words sorted, all words
// canonicalized).
TermKey class_term_key(const SimilarityClass& cls);

}  // namespace covspec
