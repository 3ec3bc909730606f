#ifndef CGDIFF_SYNTHETIC_H_
#define CGDIFF_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cgdiff/evaluation.h"
#include "cgdiff/graph_model.h"

namespace cgdiff {

// Instruction classes used by generated programs.
const std::vector<std::string>& synthetic_instruction_classes();

// Random call graph: each ordered pair (i,j), i != j, is a call with
// probability edge_density. Function sizes are heavy-tailed so that many
// small functions look alike, as in real binaries. Neighborhood features are
// derived from the edges. Deterministic in (n, edge_density, seed).
CallGraph generate_graph(std::size_t n, double edge_density, std::uint64_t seed);

struct MutationSpec {
  std::size_t insert = 0;   // new functions
  std::size_t remove = 0;   // deleted functions
  std::size_t perturb = 0;  // surviving functions whose features change
  std::size_t rewire = 0;   // calls moved to a different callee

  bool empty() const { return insert + remove + perturb + rewire == 0; }
};

struct Mutation {
  CallGraph graph;
  GroundTruth truth;  // old id -> new id for every surviving function
};

// Derives a new version of g. Survivors keep their relative address order;
// inserted functions land at random addresses and are appended to the id
// order. Throws ValidationError for an infeasible spec.
Mutation mutate(const CallGraph& g, const MutationSpec& spec,
                std::uint64_t seed);

}  // namespace cgdiff

#endif  // CGDIFF_SYNTHETIC_H_
