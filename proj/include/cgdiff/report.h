#ifndef CGDIFF_REPORT_H_
#define CGDIFF_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <string>

#include "cgdiff/graph_model.h"
#include "cgdiff/nap.h"
#include "cgdiff/similarity.h"

namespace cgdiff {

// Summary written by `cgdiff diff`:
// {matched: [[a, b, similarity], ...], unmatched_a: [...], unmatched_b: [...],
//  objective, ged, squares, iterations, converged, matcher}
// Functions are referred to by name, or by index when unnamed.
struct ReportInfo {
  std::string matcher;
  double objective = 0;
  double ged = 0;
  std::size_t squares = 0;
  int iterations = 0;
  bool converged = true;
};

std::string write_report(const CallGraph& a, const CallGraph& b,
                         const SimilarityMatrix& sim, const Mapping& m,
                         const ReportInfo& info);

// Reads the `matched` list of a report back into a Mapping. Throws
// ValidationError on unresolvable functions and ConstraintError when the
// list is not one-to-one.
Mapping parse_report_mapping(const std::string& text, const CallGraph& a,
                             const CallGraph& b);
Mapping load_report_mapping(const std::filesystem::path& path,
                            const CallGraph& a, const CallGraph& b);

}  // namespace cgdiff

#endif  // CGDIFF_REPORT_H_
