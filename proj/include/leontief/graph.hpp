#pragma once

// Weighted digraph of a coefficient matrix, its strongly connected
// components, and the block triangular (Frobenius) form they induce.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include "leontief/economy.hpp"
#include "leontief/linalg.hpp"

namespace leontief {

struct Edge {
  std::size_t to;
  double weight;
};

/// Edge i -> j for every a(i, j) above the support threshold. Sector i
/// buys from sector j, so x_i depends on x_j.
struct Digraph {
  std::vector<std::vector<Edge>> out;
  std::vector<std::vector<std::size_t>> in;

  std::size_t size() const noexcept { return out.size(); }
  bool has_edge(std::size_t i, std::size_t j) const {
    return std::any_of(out[i].begin(), out[i].end(), [j](const Edge& e) { return e.to == j; });
  }
  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& o : out) m += o.size();
    return m;
  }
};

/// Entries strictly greater than `support_eps` become edges. The default
/// of 0 makes the edge set exactly the support of A.
inline Digraph build_digraph(const TechMatrix& a, double support_eps = 0.0) {
  const std::size_t n = a.size();
  Digraph g;
  g.out.resize(n);
  g.in.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) > support_eps) {
        g.out[i].push_back({j, a(i, j)});
        g.in[j].push_back(i);
      }
  return g;
}

/// Components are numbered in a topological order of the condensation
/// (every condensation edge goes from a lower id to a higher id); ties
/// go to the component holding the smallest vertex.
struct SccDecomposition {
  std::vector<std::size_t> component_of;
  std::vector<std::vector<std::size_t>> components;
  /// Sorted, duplicate-free successor components; no self loops.
  std::vector<std::vector<std::size_t>> condensation;

  std::size_t count() const noexcept { return components.size(); }
};

inline SccDecomposition scc(const Digraph& g) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

  // Iterative Tarjan.
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), raw_comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (vertex, next edge)
  std::size_t next_index = 0, raw_count = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < g.out[v].size()) {
        const std::size_t w = g.out[v][e++].to;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          raw_comp[w] = raw_count;
        } while (w != v);
        ++raw_count;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }

  std::vector<std::vector<std::size_t>> raw_members(raw_count);
  for (std::size_t v = 0; v < n; ++v) raw_members[raw_comp[v]].push_back(v);
  std::vector<std::vector<std::size_t>> raw_succ(raw_count);
  std::vector<std::size_t> indegree(raw_count, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (const Edge& e : g.out[v]) {
      const std::size_t a = raw_comp[v], b = raw_comp[e.to];
      if (a != b) raw_succ[a].push_back(b);
    }
  for (auto& s : raw_succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (std::size_t b : s) ++indegree[b];
  }

  // Kahn's algorithm, smallest member vertex first. Members are sorted
  // ascending, so front() is the smallest.
  using Key = std::pair<std::size_t, std::size_t>;  // (smallest vertex, raw id)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::size_t c = 0; c < raw_count; ++c)
    if (indegree[c] == 0) ready.emplace(raw_members[c].front(), c);
  std::vector<std::size_t> order_of(raw_count);
  std::size_t next = 0;
  while (!ready.empty()) {
    const std::size_t c = ready.top().second;
    ready.pop();
    order_of[c] = next++;
    for (std::size_t b : raw_succ[c])
      if (--indegree[b] == 0) ready.emplace(raw_members[b].front(), b);
  }

  SccDecomposition d;
  d.component_of.resize(n);
  d.components.resize(raw_count);
  d.condensation.resize(raw_count);
  for (std::size_t c = 0; c < raw_count; ++c) {
    d.components[order_of[c]] = raw_members[c];
    for (std::size_t b : raw_succ[c]) d.condensation[order_of[c]].push_back(order_of[b]);
  }
  for (auto& s : d.condensation) std::sort(s.begin(), s.end());
  for (std::size_t c = 0; c < raw_count; ++c)
    for (std::size_t v : d.components[c]) d.component_of[v] = c;
  return d;
}

/// Permutation + block offsets such that permute_similarity(A, perm) is
/// block upper triangular with irreducible diagonal blocks. Block b
/// occupies rows/cols [bounds[b], bounds[b+1]).
struct BlockTriangularForm {
  Permutation perm;
  std::vector<std::size_t> block_bounds;
  /// Original vertex -> block index.
  std::vector<std::size_t> block_of;

  std::size_t block_count() const noexcept { return block_bounds.size() - 1; }
  std::size_t block_begin(std::size_t b) const noexcept { return block_bounds[b]; }
  std::size_t block_end(std::size_t b) const noexcept { return block_bounds[b + 1]; }
  std::size_t block_size(std::size_t b) const noexcept { return block_end(b) - block_begin(b); }

  /// Original sector indices of block b, in the order they appear in the form.
  std::vector<std::size_t> block_vertices(std::size_t b) const {
    return {perm.image().begin() + static_cast<std::ptrdiff_t>(block_begin(b)),
            perm.image().begin() + static_cast<std::ptrdiff_t>(block_end(b))};
  }
};

inline BlockTriangularForm block_triangular_form(const SccDecomposition& d) {
  BlockTriangularForm f;
  std::vector<std::size_t> image;
  image.reserve(d.component_of.size());
  f.block_bounds.push_back(0);
  for (const auto& members : d.components) {
    image.insert(image.end(), members.begin(), members.end());
    f.block_bounds.push_back(image.size());
  }
  f.perm = Permutation(std::move(image));
  f.block_of = d.component_of;
  return f;
}

inline BlockTriangularForm block_triangular_form(const TechMatrix& a, double support_eps = 0.0) {
  return block_triangular_form(scc(build_digraph(a, support_eps)));
}

struct GraphFacts {
  /// Per component: no condensation edge leaves it.
  std::vector<bool> is_closure;
  std::vector<bool> contains_sink;
  /// Per vertex. Self loops do not count toward either degree.
  std::vector<bool> is_sink;
  std::vector<bool> is_source;
  /// Per component: components with a condensation edge into it.
  std::vector<std::vector<std::size_t>> predecessors;
};

inline GraphFacts graph_facts(const SccDecomposition& d, const Digraph& g) {
  const std::size_t n = g.size(), k = d.count();
  GraphFacts f;
  f.is_closure.assign(k, false);
  f.contains_sink.assign(k, false);
  f.is_sink.assign(n, true);
  f.is_source.assign(n, true);
  f.predecessors.assign(k, {});
  for (std::size_t v = 0; v < n; ++v)
    for (const Edge& e : g.out[v])
      if (e.to != v) {
        f.is_sink[v] = false;
        f.is_source[e.to] = false;
      }
  for (std::size_t c = 0; c < k; ++c) {
    f.is_closure[c] = d.condensation[c].empty();
    for (std::size_t b : d.condensation[c]) f.predecessors[b].push_back(c);
    for (std::size_t v : d.components[c])
      if (f.is_sink[v]) f.contains_sink[c] = true;
  }
  return f;
}

/// reach[b][c] is true when block c can be reached from block b along one
/// or more condensation edges (b is then an ancestor of c).
inline std::vector<std::vector<bool>> condensation_reachability(
    const std::vector<std::vector<std::size_t>>& successors) {
  const std::size_t k = successors.size();
  std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
  // Successors have larger ids, so a reverse sweep sees them finished.
  for (std::size_t b = k; b-- > 0;)
    for (std::size_t c : successors[b]) {
      reach[b][c] = true;
      for (std::size_t e = 0; e < k; ++e)
        if (reach[c][e]) reach[b][e] = true;
    }
  return reach;
}

}  // namespace leontief
