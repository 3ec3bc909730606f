#include "cgdiff/nap.h"

#include <algorithm>
#include <string>

#include "cgdiff/errors.h"

namespace cgdiff {
namespace {

std::string pair_str(NodeId a, NodeId b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

void check_costs(double alpha, double d_node, double d_edge) {
  if (!(alpha >= 0 && alpha <= 1)) {
    throw ValidationError("alpha must lie in [0,1]");
  }
  if (!(d_node >= 0) || !(d_edge >= 0)) {
    throw ValidationError("insertion/deletion costs must be non-negative");
  }
}

}  // namespace

Mapping::Mapping(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  std::vector<NodeId> cols;
  cols.reserve(pairs_.size());
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    if (k > 0 && pairs_[k - 1].first == pairs_[k].first) {
      throw ConstraintError("constraint violated: function " +
                            std::to_string(pairs_[k].first) +
                            " of A is matched twice");
    }
    cols.push_back(pairs_[k].second);
  }
  std::sort(cols.begin(), cols.end());
  auto dup = std::adjacent_find(cols.begin(), cols.end());
  if (dup != cols.end()) {
    throw ConstraintError("constraint violated: function " +
                          std::to_string(*dup) + " of B is matched twice");
  }
}

bool Mapping::contains(NodeId a, NodeId b) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), Pair{a, b});
}

std::span<const Square> NapProblem::squares_from(std::size_t k) const {
  return {squares_.data() + square_offsets_[k],
          square_offsets_[k + 1] - square_offsets_[k]};
}

double NapProblem::empty_path_cost() const {
  return static_cast<double>(n_a() + n_b()) * d_node_ +
         static_cast<double>(edges_a_ + edges_b_) * d_edge_;
}

void NapProblem::index_squares() {
  std::sort(squares_.begin(), squares_.end(),
            [](const Square& x, const Square& y) {
              return x.from != y.from ? x.from < y.from : x.to < y.to;
            });
  square_offsets_.assign(node_weights_.size() + 1, 0);
  for (const Square& s : squares_) ++square_offsets_[s.from + 1];
  for (std::size_t k = 0; k < node_weights_.size(); ++k) {
    square_offsets_[k + 1] += square_offsets_[k];
  }
}

NapProblem NapProblem::from_parts(SimilarityMatrix sim,
                                  std::vector<double> node_weights,
                                  std::vector<Square> squares, double alpha,
                                  double d_node, double d_edge,
                                  std::size_t edges_a, std::size_t edges_b) {
  check_costs(alpha, d_node, d_edge);
  if (node_weights.size() != sim.nnz()) {
    throw ValidationError("one node weight per candidate is required");
  }
  for (const Square& s : squares) {
    if (s.from >= node_weights.size() || s.to >= node_weights.size() ||
        s.from == s.to) {
      throw ValidationError("square refers to an invalid candidate");
    }
  }
  NapProblem p;
  p.sim_ = std::move(sim);
  p.node_weights_ = std::move(node_weights);
  p.squares_ = std::move(squares);
  p.alpha_ = alpha;
  p.d_node_ = d_node;
  p.d_edge_ = d_edge;
  p.edges_a_ = edges_a;
  p.edges_b_ = edges_b;
  p.index_squares();
  return p;
}

NapProblem build_problem(const SimilarityMatrix& sim, const CallGraph& a,
                         const CallGraph& b, double alpha, double d_node,
                         double d_edge) {
  check_costs(alpha, d_node, d_edge);
  if (sim.n_a() != a.size() || sim.n_b() != b.size()) {
    throw IncompatibleError("similarity matrix does not match the graphs");
  }
  NapProblem p;
  p.sim_ = sim;
  p.alpha_ = alpha;
  p.d_node_ = d_node;
  p.d_edge_ = d_edge;
  p.edges_a_ = a.edges().size();
  p.edges_b_ = b.edges().size();
  p.node_weights_.reserve(sim.nnz());
  for (const Candidate& c : sim.entries()) {
    p.node_weights_.push_back(c.score + 2 * d_node - 1);
  }
  // 0/1 call similarity: every pair of calls that can overlap has s = 1.
  const double square_weight = 1.0 + 2 * d_edge - 1;
  for (const Edge& ea : a.edges()) {
    for (const Edge& eb : b.edges()) {
      auto from = sim.index_of(ea.caller, eb.caller);
      if (!from) continue;
      auto to = sim.index_of(ea.callee, eb.callee);
      if (!to) continue;
      p.squares_.push_back({static_cast<std::uint32_t>(*from),
                            static_cast<std::uint32_t>(*to), square_weight});
    }
  }
  p.index_squares();
  return p;
}

std::vector<std::size_t> candidate_indices(const NapProblem& p,
                                           const Mapping& m) {
  std::vector<std::size_t> idx;
  idx.reserve(m.size());
  for (const auto& [a, b] : m.pairs()) {
    auto k = p.index_of(a, b);
    if (!k) {
      throw DomainError("pair " + pair_str(a, b) +
                        " is not a retained candidate");
    }
    idx.push_back(*k);
  }
  return idx;
}

namespace {

struct Parts {
  double node = 0;
  double square = 0;
  std::size_t squares = 0;
};

Parts evaluate(const NapProblem& p, const Mapping& m) {
  const std::vector<std::size_t> idx = candidate_indices(p, m);
  std::vector<char> chosen(p.num_candidates(), 0);
  for (std::size_t k : idx) chosen[k] = 1;
  Parts parts;
  // Sum in candidate order so results do not depend on how m was built.
  std::vector<std::size_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k : sorted) {
    parts.node += p.node_weight(k);
    for (const Square& s : p.squares_from(k)) {
      if (chosen[s.to]) {
        parts.square += s.weight;
        ++parts.squares;
      }
    }
  }
  return parts;
}

}  // namespace

double nap_objective(const NapProblem& p, const Mapping& m) {
  const Parts parts = evaluate(p, m);
  return p.alpha() * parts.node + (1 - p.alpha()) * parts.square;
}

double quadratic_form(const NapProblem& p, const Mapping& m) {
  const Parts parts = evaluate(p, m);
  return parts.node + parts.square;
}

std::size_t count_squares(const NapProblem& p, const Mapping& m) {
  return evaluate(p, m).squares;
}

double ged_cost_direct(const NapProblem& p, const Mapping& m) {
  return p.empty_path_cost() - quadratic_form(p, m);
}

double ged_cost_direct(const CallGraph& a, const CallGraph& b, const Mapping& m,
                       const SimilarityMatrix& sim, double d_node,
                       double d_edge) {
  // alpha does not enter x^T Q x.
  return ged_cost_direct(build_problem(sim, a, b, 0.5, d_node, d_edge), m);
}

double ged_cost_editpath(const CallGraph& a, const CallGraph& b,
                         const Mapping& m, const SimilarityMatrix& sim,
                         double d_node, double d_edge) {
  constexpr NodeId kNone = static_cast<NodeId>(-1);
  std::vector<NodeId> image(a.size(), kNone);
  std::vector<char> b_matched(b.size(), 0);
  double cost = 0;

  // Function operations.
  for (const auto& [i, ip] : m.pairs()) {
    if (i >= a.size() || ip >= b.size()) {
      throw DomainError("pair " + pair_str(i, ip) + " is out of range");
    }
    auto s = sim.score(i, ip);
    if (!s) {
      throw DomainError("pair " + pair_str(i, ip) +
                        " is not a retained candidate");
    }
    cost += 1 - *s;  // edit function
    image[i] = ip;
    b_matched[ip] = 1;
  }
  const std::size_t deleted = a.size() - m.size();
  const std::size_t inserted = b.size() - m.size();
  cost += static_cast<double>(deleted) * d_node;
  cost += static_cast<double>(inserted) * d_node;

  // Call operations of A: edited when the image call exists, deleted
  // otherwise (including calls touching a deleted function).
  std::size_t edited = 0;
  for (const Edge& e : a.edges()) {
    const NodeId ip = image[e.caller];
    const NodeId jp = image[e.callee];
    if (ip != kNone && jp != kNone && b.has_edge(ip, jp)) {
      const double s_call = 1.0;
      cost += 1 - s_call;  // edit call
      ++edited;
    } else {
      cost += d_edge;  // delete call
    }
  }
  // Every call of B not covered by an edited call is inserted.
  cost += static_cast<double>(b.edges().size() - edited) * d_edge;
  return cost;
}

}  // namespace cgdiff
