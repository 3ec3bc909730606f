#include "cgdiff/similarity.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgdiff/errors.h"

namespace cgdiff {
namespace {

double canberra_term(double x, double y) {
  const double den = std::abs(x) + std::abs(y);
  return den == 0 ? 0.0 : std::abs(x - y) / den;
}

}  // namespace

void SimilarityConfig::validate() const {
  if (!(content_weight > 0) || !(topology_weight > 0) ||
      !(neighborhood_weight > 0)) {
    throw ValidationError("similarity group weights must be positive");
  }
  if (!(perturbation_scale >= 0)) {
    throw ValidationError("perturbation scale must be non-negative");
  }
  if (!(sparsity_ratio >= 0 && sparsity_ratio <= 1)) {
    throw ValidationError("sparsity ratio must lie in [0,1]");
  }
}

SimilarityMatrix::SimilarityMatrix(std::size_t n_a, std::size_t n_b,
                                   std::vector<Candidate> entries)
    : n_a_(n_a), n_b_(n_b), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Candidate& x, const Candidate& y) {
              return x.a != y.a ? x.a < y.a : x.b < y.b;
            });
  row_offsets_.assign(n_a_ + 1, 0);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Candidate& c = entries_[k];
    if (c.a >= n_a_ || c.b >= n_b_) {
      throw ValidationError("similarity entry outside matrix bounds");
    }
    if (k > 0 && entries_[k - 1].a == c.a && entries_[k - 1].b == c.b) {
      throw ValidationError("duplicate similarity entry");
    }
    if (!(c.score >= 0 && c.score <= 1)) {
      throw ValidationError("similarity scores must lie in [0,1]");
    }
    ++row_offsets_[c.a + 1];
  }
  for (std::size_t i = 0; i < n_a_; ++i) row_offsets_[i + 1] += row_offsets_[i];
}

std::span<const Candidate> SimilarityMatrix::row(NodeId a) const {
  return {entries_.data() + row_offsets_[a],
          row_offsets_[a + 1] - row_offsets_[a]};
}

std::optional<std::size_t> SimilarityMatrix::index_of(NodeId a,
                                                      NodeId b) const {
  if (a >= n_a_ || b >= n_b_) return std::nullopt;
  auto r = row(a);
  auto it = std::lower_bound(
      r.begin(), r.end(), b,
      [](const Candidate& c, NodeId key) { return c.b < key; });
  if (it == r.end() || it->b != b) return std::nullopt;
  return row_offsets_[a] + static_cast<std::size_t>(it - r.begin());
}

std::optional<double> SimilarityMatrix::score(NodeId a, NodeId b) const {
  auto idx = index_of(a, b);
  if (!idx) return std::nullopt;
  return entries_[*idx].score;
}

double weighted_canberra_distance(std::span<const double> a,
                                  std::span<const double> b,
                                  std::span<const double> weights) {
  if (a.size() != b.size() || a.size() != weights.size()) {
    throw IncompatibleError("feature vectors have different layouts");
  }
  double num = 0;
  double den = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += weights[k] * canberra_term(a[k], b[k]);
    den += weights[k];
  }
  return den == 0 ? 0.0 : num / den;
}

double canberra_similarity(const FeatureVector& fa, const FeatureVector& fb,
                           const SimilarityConfig& cfg) {
  if (fa.class_counts.size() != fb.class_counts.size()) {
    throw IncompatibleError("feature vectors have different layouts");
  }
  const std::vector<double> xa = flatten(fa);
  const std::vector<double> xb = flatten(fb);
  const std::vector<double> u = feature_weights(fa.class_counts.size(), cfg);
  return std::clamp(1.0 - weighted_canberra_distance(xa, xb, u), 0.0, 1.0);
}

std::vector<double> flatten(const FeatureVector& f) {
  std::vector<double> x;
  x.reserve(f.class_counts.size() + 8);
  x.push_back(f.total_instructions);
  x.insert(x.end(), f.class_counts.begin(), f.class_counts.end());
  x.push_back(f.max_block_instructions);
  x.push_back(f.blocks);
  x.push_back(f.jumps);
  x.push_back(f.max_block_callers);
  x.push_back(f.max_block_callees);
  x.push_back(f.callers);
  x.push_back(f.callees);
  return x;
}

std::vector<double> feature_weights(std::size_t class_count,
                                    const SimilarityConfig& cfg) {
  const std::size_t content = class_count + 2;
  std::vector<double> u;
  u.reserve(content + 6);
  u.insert(u.end(), content, cfg.content_weight / static_cast<double>(content));
  u.insert(u.end(), 4, cfg.topology_weight / 4.0);
  u.insert(u.end(), 2, cfg.neighborhood_weight / 2.0);
  return u;
}

SimilarityMatrix prune(std::size_t n_a, std::size_t n_b,
                       std::vector<Candidate> entries, double sparsity_ratio) {
  // The small slack keeps e.g. 0.29 * 100 from flooring to 28.
  const double dense = static_cast<double>(n_a) * static_cast<double>(n_b);
  auto drop = static_cast<std::size_t>(std::floor(sparsity_ratio * dense + 1e-9));
  drop = std::min(drop, entries.size());
  if (drop > 0) {
    auto lowest_first = [](const Candidate& x, const Candidate& y) {
      if (x.score != y.score) return x.score < y.score;
      return x.a != y.a ? x.a < y.a : x.b < y.b;
    };
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(drop),
                     entries.end(), lowest_first);
    entries.erase(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return SimilarityMatrix(n_a, n_b, std::move(entries));
}

SimilarityMatrix build_similarity_matrix(const CallGraph& a, const CallGraph& b,
                                         const SimilarityConfig& cfg) {
  cfg.validate();
  validate_pair(a, b);
  const std::size_t n_a = a.size();
  const std::size_t n_b = b.size();
  const double span = static_cast<double>(std::max(n_a, n_b));
  const std::vector<double> u =
      feature_weights(a.instruction_classes().size(), cfg);
  std::vector<std::vector<double>> flat_b;
  flat_b.reserve(n_b);
  for (const FunctionNode& fb : b.nodes()) flat_b.push_back(flatten(fb.features));
  std::vector<Candidate> entries;
  entries.reserve(n_a * n_b);
  for (const FunctionNode& fa : a.nodes()) {
    const std::vector<double> xa = flatten(fa.features);
    for (const FunctionNode& fb : b.nodes()) {
      const double gap = std::abs(static_cast<double>(fa.order_index) -
                                  static_cast<double>(fb.order_index));
      const double bonus = 1.0 - gap / span;
      const double base =
          1.0 - weighted_canberra_distance(xa, flat_b[fb.id], u);
      const double s = base + cfg.perturbation_scale * bonus;
      entries.push_back({fa.id, fb.id, std::clamp(s, 0.0, 1.0)});
    }
  }
  return prune(n_a, n_b, std::move(entries), cfg.sparsity_ratio);
}

}  // namespace cgdiff
