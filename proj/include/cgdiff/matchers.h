#ifndef CGDIFF_MATCHERS_H_
#define CGDIFF_MATCHERS_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cgdiff/graph_model.h"
#include "cgdiff/nap.h"

namespace cgdiff {

struct WeightedPair {
  NodeId a = 0;
  NodeId b = 0;
  double weight = 0;
};

// Exact maximum-weight bipartite matching on a sparse weight list. Every
// row may stay unmatched at weight 0, so pairs with weight <= 0 are never
// used. Solved as a rectangular assignment (one private zero-cost dummy
// column per row) with successive shortest augmenting paths.
Mapping solve_mwm(std::size_t n_a, std::size_t n_b,
                  std::span<const WeightedPair> weights);

// MWM on the problem's node weights w_ii' (squares ignored).
Mapping solve_mwm(const NapProblem& p);

// Greedy neighborhood expansion approximating a maximum common edge
// subgraph, finished by MWM on what is left.
//  - seeds: retained pairs with w > 0 whose functions both take part in at
//    least one call, best w first (ties: smallest (i,i'));
//  - expansion: among unmatched pairs (j,j') with j within k undirected hops
//    of a matched i and j' within k hops of its image i', take the best w;
//  - when the neighborhood is exhausted, restart from the best unused seed;
//  - finally run solve_mwm on the remaining unmatched rows and columns.
Mapping solve_mcs_greedy(const NapProblem& p, const CallGraph& a,
                         const CallGraph& b, int k);

struct BruteForceResult {
  Mapping mapping;
  double objective = 0;
};

// Upper bound on the number of feasible mappings of an n_a x n_b problem,
// sum_k C(n_a,k) C(n_b,k) k!, saturating at max double.
double feasible_mapping_bound(std::size_t n_a, std::size_t n_b);

// Exhaustive argmax of nap_objective. Ties (within 1e-12) go to the
// lexicographically smallest pair list. Throws RefusalError when
// feasible_mapping_bound exceeds max_mappings.
BruteForceResult brute_force_optimum(const NapProblem& p,
                                     double max_mappings = 1e7);

}  // namespace cgdiff

#endif  // CGDIFF_MATCHERS_H_
