#include "cgdiff/report.h"

#include <fstream>
#include <sstream>
#include <vector>

#include "cgdiff/errors.h"
#include "json.hpp"

namespace cgdiff {
namespace {

using nlohmann::json;

json key_of(const CallGraph& g, NodeId id) {
  const std::string& name = g.node(id).name;
  if (name.empty()) return id;
  return name;
}

NodeId resolve(const json& entry, const CallGraph& g, const std::string& where) {
  if (entry.is_number_integer()) {
    const auto idx = entry.get<std::int64_t>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= g.size()) {
      throw ValidationError(where + ": function index " + std::to_string(idx) +
                            " out of range");
    }
    return static_cast<NodeId>(idx);
  }
  if (entry.is_string()) {
    const std::int64_t idx = g.find(entry.get<std::string>());
    if (idx < 0) {
      throw ValidationError(where + ": unknown function '" +
                            entry.get<std::string>() + "'");
    }
    return static_cast<NodeId>(idx);
  }
  throw ParseError(where + ": expected a function name or index");
}

}  // namespace

std::string write_report(const CallGraph& a, const CallGraph& b,
                         const SimilarityMatrix& sim, const Mapping& m,
                         const ReportInfo& info) {
  json matched = json::array();
  std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
  for (const auto& [i, ip] : m.pairs()) {
    matched.push_back({key_of(a, i), key_of(b, ip), sim.score(i, ip).value_or(0.0)});
    used_a[i] = 1;
    used_b[ip] = 1;
  }
  json unmatched_a = json::array();
  for (NodeId i = 0; i < a.size(); ++i) {
    if (!used_a[i]) unmatched_a.push_back(key_of(a, i));
  }
  json unmatched_b = json::array();
  for (NodeId i = 0; i < b.size(); ++i) {
    if (!used_b[i]) unmatched_b.push_back(key_of(b, i));
  }
  json doc;
  doc["matcher"] = info.matcher;
  doc["matched"] = std::move(matched);
  doc["unmatched_a"] = std::move(unmatched_a);
  doc["unmatched_b"] = std::move(unmatched_b);
  doc["objective"] = info.objective;
  doc["ged"] = info.ged;
  doc["squares"] = info.squares;
  doc["iterations"] = info.iterations;
  doc["converged"] = info.converged;
  return doc.dump(1) + "\n";
}

Mapping parse_report_mapping(const std::string& text, const CallGraph& a,
                             const CallGraph& b) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("matched") || !doc["matched"].is_array()) {
    throw ParseError("report: missing 'matched' list");
  }
  std::vector<Pair> pairs;
  const json& list = doc["matched"];
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string where = "matched[" + std::to_string(k) + "]";
    const json& e = list[k];
    if (!e.is_array() || e.size() < 2) {
      throw ParseError(where + ": expected [a, b, similarity]");
    }
    pairs.emplace_back(resolve(e[0], a, where), resolve(e[1], b, where));
  }
  return Mapping(std::move(pairs));
}

Mapping load_report_mapping(const std::filesystem::path& path,
                            const CallGraph& a, const CallGraph& b) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report_mapping(buf.str(), a, b);
}

}  // namespace cgdiff
