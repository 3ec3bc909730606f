#ifndef CGDIFF_BP_SOLVER_H_
#define CGDIFF_BP_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cgdiff/nap.h"

namespace cgdiff {

struct BpConfig {
  double epsilon = 0.5;          // complementary-slackness penalty
  int max_iterations = 1000;
  int convergence_window = 100;  // stop once the mode is stable this long
  double damping = 0;            // new = (1 - damping) * update + damping * old
  int threads = 1;

  void validate() const;
};

struct BpState;

// Factor-graph view of a NapProblem with the alpha trade-off folded in:
// node weights are alpha * w_ii', and every pair of candidates linked by one
// or two directed squares becomes a single symmetric interaction of weight
// (1 - alpha) * (Q_uv + Q_vu). Each interaction carries two directed
// messages (arcs), one towards each endpoint.
class BpModel {
 public:
  explicit BpModel(const NapProblem& p);

  const NapProblem& problem() const { return *problem_; }
  std::size_t num_candidates() const { return node_weight_.size(); }
  std::size_t num_arcs() const { return arc_src_.size(); }

 private:
  friend struct BpKernel;
  friend BpState bp_iterate(const BpModel&, const BpState&, const BpConfig&,
                            std::uint64_t*);

  const NapProblem* problem_;
  std::vector<double> node_weight_;
  std::vector<std::uint32_t> row_of_, col_of_;
  std::vector<std::size_t> row_offsets_;   // candidates of row i are contiguous
  std::vector<std::size_t> col_offsets_;
  std::vector<std::uint32_t> col_members_;
  std::vector<std::uint32_t> arc_src_, arc_dst_, arc_rev_;
  std::vector<double> arc_weight_;
  std::vector<std::size_t> in_offsets_;    // arcs grouped by destination
  std::vector<std::uint32_t> in_arcs_;
};

// Messages f, g (one per candidate) and h (one per arc), plus the slackness
// indicators of the last update and best-so-far bookkeeping.
struct BpState {
  std::vector<double> f, g, h;
  std::vector<double> phi, gamma;
  int iteration = 0;
  Mapping best_mapping;
  double best_objective = 0;

  std::size_t message_bytes() const;
};

BpState bp_init(const BpModel& model);

// One synchronous update of every message from the iteration-t values.
// `ops`, when given, receives the number of elementary message operations.
BpState bp_iterate(const BpModel& model, const BpState& s, const BpConfig& cfg,
                   std::uint64_t* ops = nullptr);

// Log-ratio estimate of each candidate's max-marginal.
std::vector<double> max_marginals(const BpModel& model, const BpState& s,
                                  const BpConfig& cfg);

// Thresholds the max-marginals at 0 and resolves conflicts with an exact MWM
// over the positive candidates.
Mapping estimate_mode(const BpModel& model, const BpState& s,
                      const BpConfig& cfg);
Mapping round_marginals(const NapProblem& p, const std::vector<double>& pmax);

struct BpDiagnostics {
  int iterations = 0;
  bool converged = false;        // messages stopped changing
  std::string stop_reason;       // "empty", "messages", "stable_mode", "max_iterations"
  std::vector<double> mode_objective;  // objective of each iteration's mode
  std::vector<double> best_objective;  // best-so-far, non-decreasing
  std::vector<std::uint64_t> ops_per_iteration;
  std::size_t message_bytes = 0;
};

struct NapSolution {
  Mapping mapping;
  double objective = 0;
  BpDiagnostics diagnostics;
};

NapSolution solve_nap(const NapProblem& p, const BpConfig& cfg);

}  // namespace cgdiff

#endif  // CGDIFF_BP_SOLVER_H_
