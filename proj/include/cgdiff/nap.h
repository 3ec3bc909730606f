#ifndef CGDIFF_NAP_H_
#define CGDIFF_NAP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cgdiff/graph_model.h"
#include "cgdiff/similarity.h"

namespace cgdiff {

using Pair = std::pair<NodeId, NodeId>;

// One-to-one partial correspondence between V_A and V_B. Pairs are kept
// sorted; construction throws ConstraintError when a node repeats.
class Mapping {
 public:
  Mapping() = default;
  explicit Mapping(std::vector<Pair> pairs);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(NodeId a, NodeId b) const;

  bool operator==(const Mapping&) const = default;

 private:
  std::vector<Pair> pairs_;
};

// Directed square potential between two candidates, stored by candidate
// index: from = (i,i'), to = (j,j') with (i,j) in E_A and (i',j') in E_B.
struct Square {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double weight = 0;
};

// Cost structure of the network alignment problem:
//   node weights   w_ii'   = s_ii' + 2 d_node - 1   (diagonal of Q)
//   square weights w_ii'jj' = s_ii'jj' + 2 d_edge - 1 with s_ii'jj' = 1
// and the trade-off alpha between the two parts.
class NapProblem {
 public:
  NapProblem() = default;

  std::size_t n_a() const { return sim_.n_a(); }
  std::size_t n_b() const { return sim_.n_b(); }
  double alpha() const { return alpha_; }
  double d_node() const { return d_node_; }
  double d_edge() const { return d_edge_; }
  std::size_t edges_a() const { return edges_a_; }
  std::size_t edges_b() const { return edges_b_; }

  // Candidates share the order of the similarity matrix entries.
  std::size_t num_candidates() const { return node_weights_.size(); }
  const Candidate& candidate(std::size_t k) const { return sim_.entries()[k]; }
  double node_weight(std::size_t k) const { return node_weights_[k]; }
  const std::vector<double>& node_weights() const { return node_weights_; }
  std::optional<std::size_t> index_of(NodeId a, NodeId b) const {
    return sim_.index_of(a, b);
  }
  const SimilarityMatrix& similarity() const { return sim_; }

  // Sorted by (from, to).
  const std::vector<Square>& squares() const { return squares_; }
  std::span<const Square> squares_from(std::size_t k) const;

  // C(P0): cost of deleting all of A and inserting all of B.
  double empty_path_cost() const;

  // Builds a problem directly from weights, bypassing build_problem. Used by
  // tests and synthetic benchmarks that need control over Q.
  static NapProblem from_parts(SimilarityMatrix sim, std::vector<double> node_weights,
                               std::vector<Square> squares, double alpha,
                               double d_node, double d_edge,
                               std::size_t edges_a = 0, std::size_t edges_b = 0);

 private:
  friend NapProblem build_problem(const SimilarityMatrix&, const CallGraph&,
                                  const CallGraph&, double, double, double);
  void index_squares();

  SimilarityMatrix sim_;
  std::vector<double> node_weights_;
  std::vector<Square> squares_;
  std::vector<std::size_t> square_offsets_;
  double alpha_ = 0.75;
  double d_node_ = 0.5;
  double d_edge_ = 0.5;
  std::size_t edges_a_ = 0;
  std::size_t edges_b_ = 0;
};

NapProblem build_problem(const SimilarityMatrix& sim, const CallGraph& a,
                         const CallGraph& b, double alpha, double d_node,
                         double d_edge);

// Candidate indices of the mapping's pairs, in pair order. Throws
// DomainError for a pair outside the candidate set.
std::vector<std::size_t> candidate_indices(const NapProblem& p,
                                           const Mapping& m);

// alpha * sum w_ii' + (1 - alpha) * sum of realized square weights.
double nap_objective(const NapProblem& p, const Mapping& m);
// Unweighted x^T Q x.
double quadratic_form(const NapProblem& p, const Mapping& m);
std::size_t count_squares(const NapProblem& p, const Mapping& m);

// C(P0) - x^T Q x, with Q built from sim and the given costs.
double ged_cost_direct(const CallGraph& a, const CallGraph& b, const Mapping& m,
                       const SimilarityMatrix& sim, double d_node, double d_edge);
double ged_cost_direct(const NapProblem& p, const Mapping& m);

// Explicit accounting of every node and edge operation of the edit path
// induced by the mapping.
double ged_cost_editpath(const CallGraph& a, const CallGraph& b,
                         const Mapping& m, const SimilarityMatrix& sim,
                         double d_node, double d_edge);

}  // namespace cgdiff

#endif  // CGDIFF_NAP_H_
