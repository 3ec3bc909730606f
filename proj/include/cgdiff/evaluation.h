#ifndef CGDIFF_EVALUATION_H_
#define CGDIFF_EVALUATION_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "cgdiff/graph_model.h"
#include "cgdiff/nap.h"

namespace cgdiff {

// Reference correspondence between an A-side id space of size n_a and a
// B-side id space of size n_b.
struct GroundTruth {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  Mapping pairs;
};

// Relational composition along a version chain A_k -> ... -> A_n. Each link's
// B side must be the next link's A side (equal sizes), otherwise
// CompositionError.
GroundTruth extrapolate(std::span<const GroundTruth> chain);

struct Scores {
  std::size_t matched = 0;  // |M|
  std::size_t truth = 0;    // |G|
  std::size_t correct = 0;  // |M n G|
  // Ratios exchanged: p = |MnG|/|G|, r = |MnG|/|M|.
  double swapped_precision = 0;
  double swapped_recall = 0;
  // Usual convention: p = |MnG|/|M|, r = |MnG|/|G|.
  double precision = 0;
  double recall = 0;
  double f1 = 0;  // harmonic mean of the usual pair
};

Scores score(const Mapping& m, const GroundTruth& g);

// Ground-truth file: {format_version: 1, pairs: [[name_a, name_b], ...]}.
// Entries are resolved against the graphs by name; integers are taken as
// function indices. Unresolvable entries throw ValidationError.
GroundTruth parse_ground_truth(const std::string& text, const CallGraph& a,
                               const CallGraph& b);
GroundTruth load_ground_truth(const std::filesystem::path& path,
                              const CallGraph& a, const CallGraph& b);
std::string serialize_ground_truth(const GroundTruth& g, const CallGraph& a,
                                   const CallGraph& b);

}  // namespace cgdiff

#endif  // CGDIFF_EVALUATION_H_
