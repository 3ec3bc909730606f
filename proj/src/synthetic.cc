#include "cgdiff/synthetic.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "cgdiff/errors.h"

namespace cgdiff {
namespace {

using Rng = std::mt19937_64;

// Relative frequency of each instruction class.
constexpr double kClassMix[] = {0.30, 0.20, 0.15, 0.10, 0.10, 0.08, 0.05, 0.02};

FeatureVector random_features(Rng& rng) {
  std::geometric_distribution<int> extra_blocks(0.3);
  std::geometric_distribution<int> block_len(0.15);
  std::discrete_distribution<int> klass(std::begin(kClassMix), std::end(kClassMix));
  std::binomial_distribution<int> block_links(3, 0.35);

  FeatureVector f;
  const int blocks = 1 + extra_blocks(rng);
  f.class_counts.assign(std::size(kClassMix), 0);
  int total = 0;
  int longest = 0;
  for (int b = 0; b < blocks; ++b) {
    const int len = 1 + block_len(rng);
    for (int t = 0; t < len; ++t) f.class_counts[static_cast<std::size_t>(klass(rng))] += 1;
    total += len;
    longest = std::max(longest, len);
  }
  std::binomial_distribution<int> back_edges(blocks, 0.3);
  f.total_instructions = total;
  f.max_block_instructions = longest;
  f.blocks = blocks;
  f.jumps = blocks - 1 + back_edges(rng);
  f.max_block_callers = std::min(blocks - 1, block_links(rng));
  f.max_block_callees = std::min(blocks - 1, block_links(rng));
  return f;
}

// Bounded integer noise, keeping total_instructions = sum of class counts.
void perturb_features(FeatureVector& f, Rng& rng) {
  auto jitter = [&](double v, double floor) {
    const int r = std::max(1, static_cast<int>(v * 0.25));
    std::uniform_int_distribution<int> d(-r, r);
    return std::max(floor, v + d(rng));
  };
  double total = 0;
  for (double& c : f.class_counts) {
    c = jitter(c, 0);
    total += c;
  }
  if (total == 0) {
    f.class_counts[0] = 1;
    total = 1;
  }
  f.total_instructions = total;
  f.max_block_instructions = std::min(total, jitter(f.max_block_instructions, 1));
  f.blocks = jitter(f.blocks, 1);
  f.jumps = std::max(f.blocks - 1, jitter(f.jumps, 0));
  f.max_block_callers = std::min(f.blocks - 1, jitter(f.max_block_callers, 0));
  f.max_block_callees = std::min(f.blocks - 1, jitter(f.max_block_callees, 0));
}

void derive_neighborhood(std::vector<FunctionNode>& nodes,
                         const std::set<Edge>& edges) {
  for (FunctionNode& f : nodes) {
    f.features.callers = 0;
    f.features.callees = 0;
  }
  for (const Edge& e : edges) {
    nodes[e.caller].features.callees += 1;
    nodes[e.callee].features.callers += 1;
  }
}

}  // namespace

const std::vector<std::string>& synthetic_instruction_classes() {
  static const std::vector<std::string> kClasses = {
      "arith", "logic", "mov", "cmp", "jump", "stack", "call", "other"};
  return kClasses;
}

CallGraph generate_graph(std::size_t n, double edge_density, std::uint64_t seed) {
  if (!(edge_density >= 0 && edge_density <= 1)) {
    throw ValidationError("edge density must lie in [0,1]");
  }
  Rng rng(seed);
  std::vector<FunctionNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].name = "f" + std::to_string(i);
    nodes[i].order_index = static_cast<std::uint32_t>(i);
    nodes[i].features = random_features(rng);
  }
  std::set<Edge> edges;
  std::bernoulli_distribution call(edge_density);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j && call(rng)) edges.insert({i, j});
    }
  }
  derive_neighborhood(nodes, edges);
  return CallGraph("synthetic-" + std::to_string(seed),
                   synthetic_instruction_classes(), std::move(nodes),
                   std::vector<Edge>(edges.begin(), edges.end()));
}

Mutation mutate(const CallGraph& g, const MutationSpec& spec,
                std::uint64_t seed) {
  const std::size_t n = g.size();
  if (spec.remove > n) {
    throw ValidationError("cannot delete " + std::to_string(spec.remove) +
                          " of " + std::to_string(n) + " functions");
  }
  if (spec.perturb > n - spec.remove) {
    throw ValidationError("cannot perturb more functions than survive");
  }
  if (spec.insert > 0 && g.instruction_classes().size() != std::size(kClassMix)) {
    throw ValidationError(
        "function insertion needs the synthetic instruction-class layout");
  }
  if (spec.empty()) {
    std::vector<Pair> identity;
    for (NodeId i = 0; i < n; ++i) identity.emplace_back(i, i);
    return Mutation{g, GroundTruth{n, n, Mapping(std::move(identity))}};
  }
  Rng rng(seed);

  // Deletion.
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<char> removed(n, 0);
  for (std::size_t t = 0; t < spec.remove; ++t) removed[ids[t]] = 1;
  std::vector<std::int64_t> new_id(n, -1);
  std::vector<FunctionNode> nodes;
  std::vector<Pair> truth;
  for (NodeId i = 0; i < n; ++i) {
    if (removed[i]) continue;
    new_id[i] = static_cast<std::int64_t>(nodes.size());
    truth.emplace_back(i, static_cast<NodeId>(nodes.size()));
    nodes.push_back(g.node(i));
  }
  const std::size_t survivors = nodes.size();
  std::set<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (new_id[e.caller] >= 0 && new_id[e.callee] >= 0) {
      edges.insert({static_cast<NodeId>(new_id[e.caller]),
                    static_cast<NodeId>(new_id[e.callee])});
    }
  }

  // Feature perturbation.
  std::vector<NodeId> order(survivors);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t t = 0; t < spec.perturb; ++t) {
    perturb_features(nodes[order[t]].features, rng);
  }

  // Rewiring: move a call to a callee it did not call before.
  if (spec.rewire > edges.size()) {
    throw ValidationError("cannot rewire " + std::to_string(spec.rewire) +
                          " of " + std::to_string(edges.size()) + " calls");
  }
  std::vector<Edge> pool(edges.begin(), edges.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<NodeId> any_node(0, survivors > 0 ? static_cast<NodeId>(survivors - 1) : 0);
  for (std::size_t t = 0; t < spec.rewire; ++t) {
    const Edge old = pool[t];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const NodeId callee = any_node(rng);
      if (callee == old.caller || edges.contains({old.caller, callee})) continue;
      edges.erase(old);
      edges.insert({old.caller, callee});
      break;
    }
  }

  // Insertion with calls at the program's current density.
  const double density =
      survivors > 1 ? static_cast<double>(edges.size()) /
                          static_cast<double>(survivors * (survivors - 1))
                    : 0.0;
  std::bernoulli_distribution call(density);
  for (std::size_t t = 0; t < spec.insert; ++t) {
    FunctionNode f;
    f.name = "new" + std::to_string(t) + "_" + std::to_string(seed);
    f.features = random_features(rng);
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back(std::move(f));
    for (NodeId j = 0; j < id; ++j) {
      if (call(rng)) edges.insert({id, j});
      if (call(rng)) edges.insert({j, id});
    }
  }

  // Address order: survivors keep their relative order, new functions are
  // slotted in at random positions.
  std::vector<NodeId> by_address(survivors);
  std::iota(by_address.begin(), by_address.end(), 0);
  std::sort(by_address.begin(), by_address.end(), [&](NodeId x, NodeId y) {
    return nodes[x].order_index < nodes[y].order_index;
  });
  for (std::size_t t = 0; t < spec.insert; ++t) {
    std::uniform_int_distribution<std::size_t> slot(0, by_address.size());
    by_address.insert(by_address.begin() + static_cast<std::ptrdiff_t>(slot(rng)),
                      static_cast<NodeId>(survivors + t));
  }
  for (std::size_t pos = 0; pos < by_address.size(); ++pos) {
    nodes[by_address[pos]].order_index = static_cast<std::uint32_t>(pos);
  }

  derive_neighborhood(nodes, edges);
  const std::size_t n_new = nodes.size();
  CallGraph out(g.program_name() + "-mut" + std::to_string(seed),
                g.instruction_classes(), std::move(nodes),
                std::vector<Edge>(edges.begin(), edges.end()));
  return Mutation{std::move(out), GroundTruth{n, n_new, Mapping(std::move(truth))}};
}

}  // namespace cgdiff
