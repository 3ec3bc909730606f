#ifndef CGDIFF_SIMILARITY_H_
#define CGDIFF_SIMILARITY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cgdiff/graph_model.h"

namespace cgdiff {

struct SimilarityConfig {
  // Group weights of the Canberra distance. Each group's weight is split
  // evenly across the features it contains.
  double content_weight = 23;
  double topology_weight = 19;
  double neighborhood_weight = 7;
  // Scale of the address-order tie-breaking bonus.
  double perturbation_scale = 1e-3;
  // Fraction of lowest-scoring candidate pairs dropped, in [0,1].
  double sparsity_ratio = 0;

  void validate() const;
};

struct Candidate {
  NodeId a = 0;
  NodeId b = 0;
  double score = 0;
};

// Sparse n_a x n_b score matrix restricted to retained candidate pairs.
// Entries are stored in row-major (a, b) order.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t n_a, std::size_t n_b,
                   std::vector<Candidate> entries);

  std::size_t n_a() const { return n_a_; }
  std::size_t n_b() const { return n_b_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Candidate>& entries() const { return entries_; }
  std::span<const Candidate> row(NodeId a) const;

  // Position of (a, b) in entries(), if retained.
  std::optional<std::size_t> index_of(NodeId a, NodeId b) const;
  std::optional<double> score(NodeId a, NodeId b) const;

 private:
  std::size_t n_a_ = 0;
  std::size_t n_b_ = 0;
  std::vector<Candidate> entries_;
  std::vector<std::size_t> row_offsets_;
};

// Sum_k u_k |a_k - b_k| / (|a_k| + |b_k|) / Sum_k u_k, with 0/0 = 0.
double weighted_canberra_distance(std::span<const double> a,
                                  std::span<const double> b,
                                  std::span<const double> weights);

// Feature layout used by the distance: total instructions, class counts,
// max block instructions, the four topology features, then callers/callees.
std::vector<double> flatten(const FeatureVector& f);
std::vector<double> feature_weights(std::size_t class_count,
                                    const SimilarityConfig& cfg);

// 1 - weighted Canberra distance, in [0,1].
double canberra_similarity(const FeatureVector& fa, const FeatureVector& fb,
                           const SimilarityConfig& cfg);

// Scores every pair, adds the address-order bonus, clamps to [0,1], then
// prunes floor(sparsity_ratio * n_a * n_b) lowest-scoring pairs.
SimilarityMatrix build_similarity_matrix(const CallGraph& a, const CallGraph& b,
                                         const SimilarityConfig& cfg);

// Pruning step on its own, for matrices assembled by other means.
SimilarityMatrix prune(std::size_t n_a, std::size_t n_b,
                       std::vector<Candidate> entries, double sparsity_ratio);

}  // namespace cgdiff

#endif  // CGDIFF_SIMILARITY_H_
