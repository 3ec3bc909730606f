#ifndef CGDIFF_GRAPH_MODEL_H_
#define CGDIFF_GRAPH_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cgdiff {

using NodeId = std::uint32_t;

// Per-function features, grouped as content / topology / neighborhood.
// All entries are finite and non-negative.
struct FeatureVector {
  // content
  double total_instructions = 0;
  std::vector<double> class_counts;  // one entry per declared instruction class
  double max_block_instructions = 0;
  // topology (CFG summary)
  double blocks = 0;
  double jumps = 0;
  double max_block_callers = 0;
  double max_block_callees = 0;
  // neighborhood (call graph)
  double callers = 0;
  double callees = 0;

  bool operator==(const FeatureVector&) const = default;
};

struct FunctionNode {
  NodeId id = 0;             // position in the graph, assigned on construction
  std::string name;          // optional, empty when the exporter had none
  std::uint32_t order_index = 0;  // rank by entry address
  FeatureVector features;

  bool operator==(const FunctionNode&) const = default;
};

struct Edge {
  NodeId caller = 0;
  NodeId callee = 0;

  auto operator<=>(const Edge&) const = default;
};

// Directed call graph. Immutable once constructed; the constructor enforces
// every invariant of the data model (contiguous ids, order_index permutation,
// feature layout, no self-loops) and deduplicates edges.
class CallGraph {
 public:
  CallGraph() = default;
  CallGraph(std::string program_name,
            std::vector<std::string> instruction_classes,
            std::vector<FunctionNode> nodes, std::vector<Edge> edges);

  const std::string& program_name() const { return program_name_; }
  const std::vector<std::string>& instruction_classes() const {
    return instruction_classes_;
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const FunctionNode& node(NodeId id) const { return nodes_[id]; }
  const std::vector<FunctionNode>& nodes() const { return nodes_; }

  // Sorted by (caller, callee), no duplicates.
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeId caller, NodeId callee) const;
  std::span<const NodeId> callees(NodeId id) const;
  std::span<const NodeId> callers(NodeId id) const;

  // Number of duplicate edge records dropped during construction.
  std::size_t duplicate_edges() const { return duplicate_edges_; }

  // Index of the function with this name, or -1. Names may be empty or
  // repeated; the first match wins.
  std::int64_t find(const std::string& name) const;

 private:
  std::string program_name_;
  std::vector<std::string> instruction_classes_;
  std::vector<FunctionNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
  std::size_t duplicate_edges_ = 0;
};

// Exchange format (format_version 1).
CallGraph parse_call_graph(const std::string& text);
CallGraph load_call_graph(const std::filesystem::path& path);
std::string serialize_call_graph(const CallGraph& g);
void save_call_graph(const CallGraph& g, const std::filesystem::path& path);

// Throws IncompatibleError when the two graphs declare different
// instruction-class lists.
void validate_pair(const CallGraph& a, const CallGraph& b);

}  // namespace cgdiff

#endif  // CGDIFF_GRAPH_MODEL_H_
