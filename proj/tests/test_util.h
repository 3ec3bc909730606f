// Shared fixtures and independent oracles for the unit and acceptance tests.
#ifndef CGDIFF_TESTS_TEST_UTIL_H_
#define CGDIFF_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "cgdiff/graph_model.h"
#include "cgdiff/nap.h"
#include "cgdiff/similarity.h"

namespace testutil {

using cgdiff::CallGraph;
using cgdiff::Candidate;
using cgdiff::Edge;
using cgdiff::FunctionNode;
using cgdiff::Mapping;
using cgdiff::NodeId;
using cgdiff::Pair;
using cgdiff::SimilarityMatrix;

// Graph with no instruction classes and all-zero features, so every pair of
// functions has Canberra similarity 1.
inline CallGraph bare_graph(std::size_t n, std::vector<Edge> edges) {
  std::vector<FunctionNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].name = "f" + std::to_string(i);
    nodes[i].order_index = static_cast<std::uint32_t>(i);
  }
  return CallGraph("bare", {}, std::move(nodes), std::move(edges));
}

inline CallGraph random_bare_graph(std::size_t n, double density,
                                   std::mt19937_64& rng) {
  std::bernoulli_distribution call(density);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j && call(rng)) edges.push_back({i, j});
    }
  }
  return bare_graph(n, std::move(edges));
}

// Dense n_a x n_b matrix with i.i.d. uniform scores in [0,1].
inline SimilarityMatrix random_similarity(std::size_t n_a, std::size_t n_b,
                                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Candidate> entries;
  for (NodeId i = 0; i < n_a; ++i) {
    for (NodeId j = 0; j < n_b; ++j) entries.push_back({i, j, u(rng)});
  }
  return SimilarityMatrix(n_a, n_b, std::move(entries));
}

inline SimilarityMatrix uniform_similarity(std::size_t n_a, std::size_t n_b,
                                           double s) {
  std::vector<Candidate> entries;
  for (NodeId i = 0; i < n_a; ++i) {
    for (NodeId j = 0; j < n_b; ++j) entries.push_back({i, j, s});
  }
  return SimilarityMatrix(n_a, n_b, std::move(entries));
}

// Visits every partial one-to-one mapping between [0,n_a) and [0,n_b) whose
// pairs satisfy `allowed`. Pairs are emitted sorted by row.
inline void for_each_mapping(std::size_t n_a, std::size_t n_b,
                             const std::function<bool(NodeId, NodeId)>& allowed,
                             const std::function<void(const std::vector<Pair>&)>& visit) {
  std::vector<Pair> cur;
  std::vector<char> used(n_b, 0);
  std::function<void(NodeId)> rec = [&](NodeId i) {
    if (i == n_a) {
      visit(cur);
      return;
    }
    rec(i + 1);
    for (NodeId j = 0; j < n_b; ++j) {
      if (used[j] || !allowed(i, j)) continue;
      used[j] = 1;
      cur.emplace_back(i, j);
      rec(i + 1);
      cur.pop_back();
      used[j] = 0;
    }
  };
  rec(0);
}

inline Mapping random_mapping(std::size_t n_a, std::size_t n_b,
                              std::mt19937_64& rng) {
  std::vector<NodeId> cols(n_b);
  for (NodeId j = 0; j < n_b; ++j) cols[j] = j;
  std::shuffle(cols.begin(), cols.end(), rng);
  std::bernoulli_distribution keep(0.7);
  std::vector<Pair> pairs;
  for (NodeId i = 0; i < std::min(n_a, n_b); ++i) {
    if (keep(rng)) pairs.emplace_back(i, cols[i]);
  }
  return Mapping(std::move(pairs));
}

}  // namespace testutil

#endif  // CGDIFF_TESTS_TEST_UTIL_H_
