#include "cgdiff/graph_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cgdiff/errors.h"
#include "json.hpp"

namespace cgdiff {
namespace {

using nlohmann::json;

void check_feature(double v, NodeId id, const char* field) {
  if (!std::isfinite(v) || v < 0) {
    std::ostringstream msg;
    msg << "function " << id << ": feature '" << field
        << "' must be finite and non-negative";
    throw ValidationError(msg.str());
  }
}

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool outgoing,
               std::vector<std::size_t>& offsets, std::vector<NodeId>& adj) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(outgoing ? e.caller : e.callee) + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  adj.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : edges) {
    NodeId from = outgoing ? e.caller : e.callee;
    adj[cursor[from]++] = outgoing ? e.callee : e.caller;
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) {
    throw ParseError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace

CallGraph::CallGraph(std::string program_name,
                     std::vector<std::string> instruction_classes,
                     std::vector<FunctionNode> nodes, std::vector<Edge> edges)
    : program_name_(std::move(program_name)),
      instruction_classes_(std::move(instruction_classes)),
      nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  std::vector<char> seen_order(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    FunctionNode& f = nodes_[i];
    f.id = static_cast<NodeId>(i);
    if (f.order_index >= n || seen_order[f.order_index]) {
      throw ValidationError("function " + std::to_string(i) +
                            ": order_index values must be a permutation of "
                            "0..n-1");
    }
    seen_order[f.order_index] = 1;
    const FeatureVector& fv = f.features;
    if (fv.class_counts.size() != instruction_classes_.size()) {
      throw ValidationError(
          "function " + std::to_string(i) + ": class_counts has " +
          std::to_string(fv.class_counts.size()) + " entries, header declares " +
          std::to_string(instruction_classes_.size()));
    }
    check_feature(fv.total_instructions, f.id, "total_instructions");
    for (double c : fv.class_counts) check_feature(c, f.id, "class_counts");
    check_feature(fv.max_block_instructions, f.id, "max_block_instructions");
    check_feature(fv.blocks, f.id, "blocks");
    check_feature(fv.jumps, f.id, "jumps");
    check_feature(fv.max_block_callers, f.id, "max_block_callers");
    check_feature(fv.max_block_callees, f.id, "max_block_callees");
    check_feature(fv.callers, f.id, "callers");
    check_feature(fv.callees, f.id, "callees");
  }

  for (const Edge& e : edges) {
    if (e.caller >= n || e.callee >= n) {
      throw ValidationError("call (" + std::to_string(e.caller) + "," +
                            std::to_string(e.callee) +
                            ") refers to an unknown function");
    }
    if (e.caller == e.callee) {
      throw ValidationError("self-loop (" + std::to_string(e.caller) + "," +
                            std::to_string(e.callee) + ") is not allowed");
    }
  }
  std::sort(edges.begin(), edges.end());
  auto last = std::unique(edges.begin(), edges.end());
  duplicate_edges_ = static_cast<std::size_t>(edges.end() - last);
  edges.erase(last, edges.end());
  edges_ = std::move(edges);

  build_csr(n, edges_, true, out_offsets_, out_targets_);
  build_csr(n, edges_, false, in_offsets_, in_sources_);
  // CSR fill preserves edge order, so callees are sorted; callers are sorted
  // because edges are sorted by caller first.
}

bool CallGraph::has_edge(NodeId caller, NodeId callee) const {
  if (caller >= nodes_.size()) return false;
  auto row = callees(caller);
  return std::binary_search(row.begin(), row.end(), callee);
}

std::span<const NodeId> CallGraph::callees(NodeId id) const {
  return {out_targets_.data() + out_offsets_[id],
          out_offsets_[id + 1] - out_offsets_[id]};
}

std::span<const NodeId> CallGraph::callers(NodeId id) const {
  return {in_sources_.data() + in_offsets_[id],
          in_offsets_[id + 1] - in_offsets_[id]};
}

std::int64_t CallGraph::find(const std::string& name) const {
  for (const FunctionNode& f : nodes_) {
    if (f.name == name) return f.id;
  }
  return -1;
}

CallGraph parse_call_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document: expected an object");

  const json& version = field(doc, "format_version", "header");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ParseError("header: unsupported format_version");
  }
  std::string program_name;
  if (auto it = doc.find("program_name"); it != doc.end() && it->is_string()) {
    program_name = it->get<std::string>();
  }
  const json& classes_json = field(doc, "instruction_classes", "header");
  if (!classes_json.is_array()) {
    throw ParseError("header: instruction_classes must be an array");
  }
  std::vector<std::string> classes;
  for (const json& c : classes_json) {
    if (!c.is_string()) {
      throw ParseError("header: instruction_classes entries must be strings");
    }
    classes.push_back(c.get<std::string>());
  }

  const json& functions = field(doc, "functions", "document");
  if (!functions.is_array()) throw ParseError("functions: expected an array");
  std::vector<FunctionNode> nodes;
  nodes.reserve(functions.size());
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::string where = "functions[" + std::to_string(i) + "]";
    const json& fj = functions[i];
    FunctionNode node;
    if (!fj.is_object()) throw ParseError(where + ": expected an object");
    if (auto it = fj.find("name"); it != fj.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(where + ": name must be a string");
      node.name = it->get<std::string>();
    }
    const json& order = field(fj, "order_index", where);
    if (!order.is_number_integer() || order.get<std::int64_t>() < 0) {
      throw ParseError(where + ": order_index must be a non-negative integer");
    }
    node.order_index = order.get<std::uint32_t>();

    FeatureVector& fv = node.features;
    const std::string content_where = where + ".content";
    const json& content = field(fj, "content", where);
    fv.total_instructions = number(content, "total_instructions", content_where);
    const json& counts = field(content, "class_counts", content_where);
    if (!counts.is_array()) {
      throw ParseError(content_where + ": class_counts must be an array");
    }
    for (const json& c : counts) {
      if (!c.is_number()) {
        throw ParseError(content_where + ": class_counts must hold numbers");
      }
      fv.class_counts.push_back(c.get<double>());
    }
    fv.max_block_instructions =
        number(content, "max_block_instructions", content_where);

    const std::string topo_where = where + ".topology";
    const json& topo = field(fj, "topology", where);
    fv.blocks = number(topo, "blocks", topo_where);
    fv.jumps = number(topo, "jumps", topo_where);
    fv.max_block_callers = number(topo, "max_block_callers", topo_where);
    fv.max_block_callees = number(topo, "max_block_callees", topo_where);

    const std::string nb_where = where + ".neighborhood";
    const json& nb = field(fj, "neighborhood", where);
    fv.callers = number(nb, "callers", nb_where);
    fv.callees = number(nb, "callees", nb_where);
    nodes.push_back(std::move(node));
  }

  std::vector<Edge> edges;
  if (auto it = doc.find("calls"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("calls: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& c = (*it)[k];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer() || c[0].get<std::int64_t>() < 0 ||
          c[1].get<std::int64_t>() < 0) {
        throw ParseError("calls[" + std::to_string(k) +
                         "]: expected [caller_index, callee_index]");
      }
      edges.push_back({c[0].get<NodeId>(), c[1].get<NodeId>()});
    }
  }
  return CallGraph(std::move(program_name), std::move(classes),
                   std::move(nodes), std::move(edges));
}

CallGraph load_call_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_call_graph(buf.str());
  } catch (const Error& e) {
    // Keep the original type so callers can distinguish parse/validation.
    if (dynamic_cast<const ValidationError*>(&e)) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serialize_call_graph(const CallGraph& g) {
  json doc;
  doc["format_version"] = 1;
  doc["program_name"] = g.program_name();
  doc["instruction_classes"] = g.instruction_classes();
  json functions = json::array();
  for (const FunctionNode& f : g.nodes()) {
    const FeatureVector& fv = f.features;
    json fj;
    if (!f.name.empty()) fj["name"] = f.name;
    fj["order_index"] = f.order_index;
    fj["content"] = {{"total_instructions", fv.total_instructions},
                     {"class_counts", fv.class_counts},
                     {"max_block_instructions", fv.max_block_instructions}};
    fj["topology"] = {{"blocks", fv.blocks},
                      {"jumps", fv.jumps},
                      {"max_block_callers", fv.max_block_callers},
                      {"max_block_callees", fv.max_block_callees}};
    fj["neighborhood"] = {{"callers", fv.callers}, {"callees", fv.callees}};
    functions.push_back(std::move(fj));
  }
  doc["functions"] = std::move(functions);
  json calls = json::array();
  for (const Edge& e : g.edges()) calls.push_back({e.caller, e.callee});
  doc["calls"] = std::move(calls);
  return doc.dump(1) + "\n";
}

void save_call_graph(const CallGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_call_graph(g);
}

void validate_pair(const CallGraph& a, const CallGraph& b) {
  if (a.instruction_classes() != b.instruction_classes()) {
    throw IncompatibleError(
        "instruction class lists differ (" +
        std::to_string(a.instruction_classes().size()) + " vs " +
        std::to_string(b.instruction_classes().size()) + " classes)");
  }
}

}  // namespace cgdiff
