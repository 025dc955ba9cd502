#include "covspec/qgraph_oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "covspec/errors.hpp"

namespace covspec {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  // Returns false if x and y were already connected.
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (x > y) std::swap(x, y);  // keep the smaller index as root
    parent[static_cast<size_t>(y)] = x;
    return true;
  }
};

// Restricted growth string: class ids numbered by first occurrence.
std::vector<int> to_rgs(UnionFind& uf, int n) {
  std::vector<int> rgs(static_cast<size_t>(n), -1);
  std::vector<int> label(static_cast<size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (label[static_cast<size_t>(root)] < 0) label[static_cast<size_t>(root)] = next++;
    rgs[static_cast<size_t>(i)] = label[static_cast<size_t>(root)];
  }
  return rgs;
}

// Index layout per trace factor s = 0..k-1: a(s), b(s), c(s) are the three
// index-line slots; the down edge leaves b(s), the up edge arrives at c(s),
// horizontal edges are (a(s), b(s)) and (c(s), a(s+1 mod k)).
inline int idx_a(int s) { return 3 * s; }
inline int idx_b(int s) { return 3 * s + 1; }
inline int idx_c(int s) { return 3 * s + 2; }

std::vector<int> head_components(const std::vector<int>& i_partition, int k) {
  const int classes = 1 + *std::max_element(i_partition.begin(), i_partition.end());
  UnionFind head(classes);
  for (int s = 0; s < k; ++s) {
    head.unite(i_partition[static_cast<size_t>(idx_a(s))],
               i_partition[static_cast<size_t>(idx_b(s))]);
    head.unite(i_partition[static_cast<size_t>(idx_c(s))],
               i_partition[static_cast<size_t>(idx_a((s + 1) % k))]);
  }
  return to_rgs(head, classes);
}

}  // namespace

std::string to_string(StructureCategory c) {
  switch (c) {
    case StructureCategory::C1: return "C1";
    case StructureCategory::C2: return "C2";
    case StructureCategory::C3: return "C3";
  }
  return "?";
}

StructureInfo classify_structure(const std::vector<int>& colors,
                                 const std::vector<int>& i_partition,
                                 const std::vector<int>& j_partition) {
  const int k = static_cast<int>(colors.size());
  if (k < 1) throw ValidationError("classify: empty color word");
  if (static_cast<int>(i_partition.size()) != 3 * k)
    throw ValidationError("classify: i partition must cover 3k indices");
  if (static_cast<int>(j_partition.size()) != k)
    throw ValidationError("classify: j partition must cover k indices");

  // j classes must be color-consistent (one auxiliary line per color).
  const int j_classes = 1 + *std::max_element(j_partition.begin(), j_partition.end());
  std::vector<int> j_color(static_cast<size_t>(j_classes), 0);
  for (int s = 0; s < k; ++s) {
    int& col = j_color[static_cast<size_t>(j_partition[static_cast<size_t>(s)])];
    if (col == 0)
      col = colors[static_cast<size_t>(s)];
    else if (col != colors[static_cast<size_t>(s)])
      throw ValidationError("classify: j class mixes colors (malformed identifications)");
  }

  // Distinct vertical edges with down/up multiplicities.
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (i class, j class) -> (down, up)
  for (int s = 0; s < k; ++s) {
    const int j = j_partition[static_cast<size_t>(s)];
    edges[{i_partition[static_cast<size_t>(idx_b(s))], j}].first++;
    edges[{i_partition[static_cast<size_t>(idx_c(s))], j}].second++;
  }

  StructureInfo info;
  info.p = static_cast<int>(edges.size());
  info.s = j_classes;
  const std::vector<int> comp_of_class = head_components(i_partition, k);
  info.r = 1 + *std::max_element(comp_of_class.begin(), comp_of_class.end());

  bool has_single = false;
  bool perfectly_paired = true;
  for (const auto& [key, mult] : edges) {
    const int total = mult.first + mult.second;
    if (total == 1) has_single = true;
    if (!(mult.first == 1 && mult.second == 1)) perfectly_paired = false;
  }
  if (has_single) {
    info.category = StructureCategory::C2;
    return info;
  }

  // Quotient graph: head components plus auxiliary vertices, one edge per
  // distinct vertical edge. A tree has no cycle and is connected.
  bool tree = true;
  UnionFind pillar(info.r + info.s);
  for (const auto& [key, mult] : edges) {
    (void)mult;
    const int comp = comp_of_class[static_cast<size_t>(key.first)];
    if (!pillar.unite(comp, info.r + key.second)) tree = false;
  }
  int roots = 0;
  for (int v = 0; v < info.r + info.s; ++v)
    if (pillar.find(v) == v) ++roots;
  if (roots != 1) tree = false;  // disconnected quotient cannot happen for cyclic structures

  if (perfectly_paired && tree) {
    info.category = StructureCategory::C1;
    return info;
  }

  info.category = StructureCategory::C3;
  // The negligibility argument needs r + s - 1 < k for every C3 structure.
  if (!(info.r + info.s - 1 < k)) {
    std::ostringstream os;
    os << "C3 structure with r=" << info.r << " s=" << info.s << " violates r+s-1<k at k=" << k;
    throw InvariantError(os.str());
  }
  return info;
}

StructureInfo classify_structure(const std::vector<int>& colors, const VerticalMatching& match) {
  const int k = static_cast<int>(colors.size());
  if (static_cast<int>(match.sigma.size()) != k)
    throw ValidationError("classify: matching size != k");
  UnionFind iuf(3 * k);
  UnionFind juf(k);
  for (int s = 0; s < k; ++s) {
    const int t = match.sigma[static_cast<size_t>(s)];
    if (t < 0 || t >= k) throw ValidationError("classify: matching out of range");
    if (colors[static_cast<size_t>(s)] != colors[static_cast<size_t>(t)])
      throw ValidationError("classify: matching pairs edges of different colors");
    iuf.unite(idx_b(s), idx_c(t));
    juf.unite(s, t);
  }
  return classify_structure(colors, to_rgs(iuf, 3 * k), to_rgs(juf, k));
}

namespace {

// Derive the full class record; throws InvariantError if any structural
// bookkeeping identity fails.
SimilarityClass derive_class(const std::vector<int>& colors, const std::vector<int>& i_rgs,
                             const std::vector<int>& j_rgs, int m) {
  const int k = static_cast<int>(colors.size());
  SimilarityClass cls;
  cls.colors = colors;
  cls.i_partition = i_rgs;
  cls.j_partition = j_rgs;
  cls.p = k;

  const std::vector<int> comp_of_class = head_components(i_rgs, k);
  // Components relabeled so that the one containing index 0 (the trace start)
  // comes first; others keep first-appearance order.
  const int raw_r = 1 + *std::max_element(comp_of_class.begin(), comp_of_class.end());
  std::vector<int> relabel(static_cast<size_t>(raw_r), -1);
  const int head_comp = comp_of_class[static_cast<size_t>(i_rgs[0])];
  relabel[static_cast<size_t>(head_comp)] = 0;
  int next = 1;
  for (int c = 0; c < raw_r; ++c)
    if (relabel[static_cast<size_t>(c)] < 0) relabel[static_cast<size_t>(c)] = next++;
  cls.r = raw_r;

  auto comp_of_index = [&](int idx) {
    return relabel[static_cast<size_t>(
        comp_of_class[static_cast<size_t>(i_rgs[static_cast<size_t>(idx)])])];
  };

  // Coloring words: the color of the s-th up edge is appended to the word of
  // the component it arrives at, in global order.
  cls.ccmis.assign(static_cast<size_t>(raw_r), {});
  std::vector<int> t_edges(static_cast<size_t>(raw_r), 0);
  std::vector<int> tstar_edges(static_cast<size_t>(raw_r), 0);
  for (int s = 0; s < k; ++s) {
    const int comp_t = comp_of_index(idx_a(s));
    if (comp_t != comp_of_index(idx_b(s)))
      throw InvariantError("class: horizontal edge endpoints in different components");
    t_edges[static_cast<size_t>(comp_t)]++;
    const int comp_up = comp_of_index(idx_c(s));
    tstar_edges[static_cast<size_t>(comp_up)]++;
    cls.ccmis[static_cast<size_t>(comp_up)].push_back(colors[static_cast<size_t>(s)]);
  }
  cls.nu.assign(static_cast<size_t>(raw_r), 0);
  for (int a = 0; a < raw_r; ++a) {
    if (t_edges[static_cast<size_t>(a)] != tstar_edges[static_cast<size_t>(a)])
      throw InvariantError("class: component word does not alternate");
    cls.nu[static_cast<size_t>(a)] = t_edges[static_cast<size_t>(a)];
    if (static_cast<int>(cls.ccmis[static_cast<size_t>(a)].size()) != cls.nu[static_cast<size_t>(a)])
      throw InvariantError("class: word length != component size");
  }
  if (std::accumulate(cls.nu.begin(), cls.nu.end(), 0) != k)
    throw InvariantError("class: component sizes do not sum to k");

  // Distinct auxiliary vertices per interval.
  const int j_classes = 1 + *std::max_element(j_rgs.begin(), j_rgs.end());
  cls.s_counts.assign(static_cast<size_t>(m), 0);
  std::vector<int> seen(static_cast<size_t>(j_classes), 0);
  for (int s = 0; s < k; ++s) {
    const int j = j_rgs[static_cast<size_t>(s)];
    if (!seen[static_cast<size_t>(j)]) {
      seen[static_cast<size_t>(j)] = 1;
      cls.s_counts[static_cast<size_t>(colors[static_cast<size_t>(s)] - 1)]++;
    }
  }
  const int s_total = std::accumulate(cls.s_counts.begin(), cls.s_counts.end(), 0);
  if (k != cls.r + s_total - 1) throw InvariantError("class: k != r + s - 1");

  // Cross-check: s_l must equal the count formula read off the words (all
  // entries for the head component, entries after the first elsewhere).
  for (int l = 1; l <= m; ++l) {
    int n_sum = 0;
    for (int a = 0; a < raw_r; ++a) {
      const auto& word = cls.ccmis[static_cast<size_t>(a)];
      const size_t from = (a == 0) ? 0 : 1;
      for (size_t i = from; i < word.size(); ++i)
        if (word[i] == l) ++n_sum;
    }
    if (n_sum != cls.s_counts[static_cast<size_t>(l - 1)])
      throw InvariantError("class: per-interval vertex count mismatch");
  }
  return cls;
}

}  // namespace

TermKey class_term_key(const SimilarityClass& cls) {
  TermKey key;
  key.r = cls.r;
  key.s_counts = cls.s_counts;
  key.ccmis.reserve(cls.ccmis.size());
  key.ccmis.push_back(canonical_rotation(cls.ccmis[0]));
  std::vector<MixedMomentKey> rest;
  for (size_t a = 1; a < cls.ccmis.size(); ++a) rest.push_back(canonical_rotation(cls.ccmis[a]));
  std::sort(rest.begin(), rest.end());
  key.ccmis.insert(key.ccmis.end(), rest.begin(), rest.end());
  return key;
}

EnumerationResult enumerate_c1_classes(int k, int m, const OracleCaps& caps) {
  if (k < 1) throw ValidationError("enumerate: k must be >= 1");
  if (m < 1) throw ValidationError("enumerate: m must be >= 1");
  if (k > caps.k_cap || m > caps.m_cap) {
    std::ostringstream os;
    os << "enumerate: (k=" << k << ", m=" << m << ") exceeds caps (" << caps.k_cap << ", "
       << caps.m_cap << ")";
    throw ValidationError(os.str());
  }

  EnumerationResult result;
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<int>> by_head;
  std::map<std::tuple<std::vector<int>, std::vector<int>, std::vector<int>>, size_t> dedup;

  std::vector<int> colors(static_cast<size_t>(k), 1);
  while (true) {
    // Positions grouped by color; a compatible matching permutes each group.
    std::vector<std::vector<int>> groups(static_cast<size_t>(m));
    for (int s = 0; s < k; ++s) groups[static_cast<size_t>(colors[static_cast<size_t>(s)] - 1)].push_back(s);

    std::vector<std::vector<int>> perms(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) perms[g] = groups[g];

    // Odometer over per-color permutations via std::next_permutation.
    while (true) {
      VerticalMatching match;
      match.sigma.assign(static_cast<size_t>(k), 0);
      for (size_t g = 0; g < groups.size(); ++g)
        for (size_t i = 0; i < groups[g].size(); ++i)
          match.sigma[static_cast<size_t>(groups[g][i])] = perms[g][i];

      UnionFind iuf(3 * k);
      UnionFind juf(k);
      for (int s = 0; s < k; ++s) {
        iuf.unite(idx_b(s), idx_c(match.sigma[static_cast<size_t>(s)]));
        juf.unite(s, match.sigma[static_cast<size_t>(s)]);
      }
      std::vector<int> i_rgs = to_rgs(iuf, 3 * k);
      std::vector<int> j_rgs = to_rgs(juf, k);

      const StructureInfo info = classify_structure(colors, i_rgs, j_rgs);
      if (info.category == StructureCategory::C1) {
        // The derived record is a pure function of the partitions, so a
        // repeated key is the same class reached twice.
        const auto full_key = std::make_tuple(colors, i_rgs, j_rgs);
        if (dedup.count(full_key)) {
          result.duplicate_structures++;
        } else {
          dedup.emplace(full_key, result.classes.size());

          const auto head_key = std::make_pair(colors, i_rgs);
          const auto it = by_head.find(head_key);
          if (it == by_head.end())
            by_head.emplace(head_key, j_rgs);
          else if (it->second != j_rgs)
            result.head_ambiguities.push_back({colors, i_rgs});

          result.classes.push_back(derive_class(colors, i_rgs, j_rgs, m));
        }
      } else {
        // C2 cannot occur for perfect matchings; count the rest.
        result.c3_structures++;
      }

      size_t g = 0;
      while (g < perms.size() && !std::next_permutation(perms[g].begin(), perms[g].end())) ++g;
      if (g == perms.size()) break;
    }

    int pos = k - 1;
    while (pos >= 0 && colors[static_cast<size_t>(pos)] == m) colors[static_cast<size_t>(pos--)] = 1;
    if (pos < 0) break;
    colors[static_cast<size_t>(pos)]++;
  }

  // Deterministic output order, independent of enumeration chunking.
  std::sort(result.classes.begin(), result.classes.end(),
            [](const SimilarityClass& a, const SimilarityClass& b) {
              return std::tie(a.colors, a.i_partition, a.j_partition) <
                     std::tie(b.colors, b.i_partition, b.j_partition);
            });
  return result;
}

MomentExpansion oracle_moment_expansion(int k, int m, const OracleCaps& caps) {
  const EnumerationResult enumeration = enumerate_c1_classes(k, m, caps);
  std::map<TermKey, Rational> coeffs;
  for (const auto& cls : enumeration.classes) coeffs[class_term_key(cls)] += 1;
  MomentExpansion e = expansion_from_map(k, m, coeffs);
  e.check_invariants();
  return e;
}

}  // namespace covspec
