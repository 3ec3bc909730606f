#include "cgdiff/evaluation.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "cgdiff/errors.h"
#include "json.hpp"

namespace cgdiff {
namespace {

using nlohmann::json;

double ratio(std::size_t num, std::size_t den, bool both_empty) {
  if (den == 0) return both_empty ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

NodeId resolve(const json& entry, const CallGraph& g, const char* side,
               std::size_t k) {
  const std::string where = "pairs[" + std::to_string(k) + "]";
  if (entry.is_number_integer()) {
    const auto idx = entry.get<std::int64_t>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= g.size()) {
      throw ValidationError(where + ": index " + std::to_string(idx) +
                            " is not a function of " + side);
    }
    return static_cast<NodeId>(idx);
  }
  if (entry.is_string()) {
    const std::string name = entry.get<std::string>();
    const std::int64_t idx = g.find(name);
    if (idx < 0) {
      throw ValidationError(where + ": no function named '" + name + "' in " +
                            side);
    }
    return static_cast<NodeId>(idx);
  }
  throw ParseError(where + ": expected a function name or index");
}

json key_of(const CallGraph& g, NodeId id) {
  const std::string& name = g.node(id).name;
  if (name.empty()) return id;
  return name;
}

}  // namespace

GroundTruth extrapolate(std::span<const GroundTruth> chain) {
  if (chain.empty()) throw CompositionError("empty ground-truth chain");
  GroundTruth acc = chain.front();
  for (std::size_t t = 1; t < chain.size(); ++t) {
    const GroundTruth& link = chain[t];
    if (link.n_a != acc.n_b) {
      throw CompositionError("link " + std::to_string(t) + " starts from " +
                             std::to_string(link.n_a) +
                             " functions, previous link ends at " +
                             std::to_string(acc.n_b));
    }
    std::vector<std::int64_t> step(link.n_a, -1);
    for (const auto& [x, y] : link.pairs.pairs()) step[x] = y;
    std::vector<Pair> composed;
    for (const auto& [x, y] : acc.pairs.pairs()) {
      if (step[y] >= 0) composed.emplace_back(x, static_cast<NodeId>(step[y]));
    }
    acc = GroundTruth{acc.n_a, link.n_b, Mapping(std::move(composed))};
  }
  return acc;
}

Scores score(const Mapping& m, const GroundTruth& g) {
  Scores s;
  s.matched = m.size();
  s.truth = g.pairs.size();
  for (const auto& [a, b] : m.pairs()) {
    if (g.pairs.contains(a, b)) ++s.correct;
  }
  const bool both_empty = s.matched == 0 && s.truth == 0;
  s.swapped_precision = ratio(s.correct, s.truth, both_empty);
  s.swapped_recall = ratio(s.correct, s.matched, both_empty);
  s.precision = ratio(s.correct, s.matched, both_empty);
  s.recall = ratio(s.correct, s.truth, both_empty);
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2 * s.precision * s.recall / sum : 0.0;
  return s;
}

GroundTruth parse_ground_truth(const std::string& text, const CallGraph& a,
                               const CallGraph& b) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw ParseError("ground truth: expected {format_version, pairs: [...]}");
  }
  if (!doc.contains("format_version") || doc["format_version"] != 1) {
    throw ParseError("ground truth: unsupported format_version");
  }
  std::vector<Pair> pairs;
  const json& list = doc["pairs"];
  for (std::size_t k = 0; k < list.size(); ++k) {
    const json& p = list[k];
    if (!p.is_array() || p.size() < 2) {
      throw ParseError("pairs[" + std::to_string(k) + "]: expected [a, b]");
    }
    pairs.emplace_back(resolve(p[0], a, "A", k), resolve(p[1], b, "B", k));
  }
  return GroundTruth{a.size(), b.size(), Mapping(std::move(pairs))};
}

GroundTruth load_ground_truth(const std::filesystem::path& path,
                              const CallGraph& a, const CallGraph& b) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ground_truth(buf.str(), a, b);
}

std::string serialize_ground_truth(const GroundTruth& g, const CallGraph& a,
                                   const CallGraph& b) {
  json pairs = json::array();
  for (const auto& [x, y] : g.pairs.pairs()) {
    pairs.push_back({key_of(a, x), key_of(b, y)});
  }
  json doc;
  doc["format_version"] = 1;
  doc["pairs"] = std::move(pairs);
  return doc.dump(1) + "\n";
}

}  // namespace cgdiff
