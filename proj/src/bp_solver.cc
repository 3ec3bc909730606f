#include "cgdiff/bp_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cgdiff/errors.h"
#include "cgdiff/matchers.h"
#include "parallel.h"

namespace cgdiff {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double positive_part(double x) { return x > 0 ? x : 0; }

// [x]_lo^hi
double clamp_to(double x, double lo, double hi) {
  return x <= lo ? lo : (x < hi ? x : hi);
}

bool is_tie(double value, double max) {
  return max - value <= 1e-12 * std::max(1.0, std::abs(max));
}

// Top-two values of a group of messages. The "other" maximum of the group's
// argmax is the runner-up; for every other member it is the maximum.
struct TopTwo {
  double first = kNegInf;
  double second = kNegInf;
  std::uint32_t arg = std::numeric_limits<std::uint32_t>::max();

  void add(double x, std::uint32_t k) {
    if (x > first) {
      second = first;
      first = x;
      arg = k;
    } else if (x > second) {
      second = x;
    }
  }
  double other(std::uint32_t k) const { return k == arg ? second : first; }
};

}  // namespace

// Row/column statistics and incoming square sums of one message state. All
// quantities of an update are functions of these plus the node weights.
struct BpKernel {
  const BpModel& m;
  const BpState& s;
  double epsilon;
  int threads;

  std::vector<TopTwo> row_f, col_g;
  std::vector<double> incoming;  // sum over arcs into u of [W + h]_0^W

  BpKernel(const BpModel& model, const BpState& state, const BpConfig& cfg,
           std::uint64_t* ops)
      : m(model), s(state), epsilon(cfg.epsilon), threads(cfg.threads) {
    const std::size_t n_a = m.row_offsets_.size() - 1;
    const std::size_t n_b = m.col_offsets_.size() - 1;
    row_f.assign(n_a, {});
    col_g.assign(n_b, {});
    incoming.assign(m.num_candidates(), 0);
    internal::parallel_for(n_a, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        for (std::size_t k = m.row_offsets_[r]; k < m.row_offsets_[r + 1]; ++k) {
          row_f[r].add(s.f[k], static_cast<std::uint32_t>(k));
        }
      }
    });
    internal::parallel_for(n_b, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t c = lo; c < hi; ++c) {
        for (std::size_t t = m.col_offsets_[c]; t < m.col_offsets_[c + 1]; ++t) {
          const std::uint32_t k = m.col_members_[t];
          col_g[c].add(s.g[k], k);
        }
      }
    });
    internal::parallel_for(m.num_candidates(), threads,
                           [&](std::size_t lo, std::size_t hi) {
                             for (std::size_t u = lo; u < hi; ++u) {
                               double sum = 0;
                               for (std::size_t t = m.in_offsets_[u];
                                    t < m.in_offsets_[u + 1]; ++t) {
                                 sum += arc_term(m.in_arcs_[t]);
                               }
                               incoming[u] = sum;
                             }
                           });
    if (ops) *ops += 2 * m.num_candidates() + m.num_arcs();
  }

  double arc_term(std::uint32_t e) const {
    const double w = m.arc_weight_[e];
    return clamp_to(w + s.h[e], 0, w);
  }

  // (max_{k' != i'} f_ik')_+ and its slackness indicator phi.
  double row_other(std::size_t u) const {
    return positive_part(row_f[m.row_of_[u]].other(static_cast<std::uint32_t>(u)));
  }
  double col_other(std::size_t u) const {
    return positive_part(col_g[m.col_of_[u]].other(static_cast<std::uint32_t>(u)));
  }
  double phi(std::size_t u) const {
    return is_tie(s.f[u], row_f[m.row_of_[u]].first) ? 0 : epsilon;
  }
  double gamma(std::size_t u) const {
    return is_tie(s.g[u], col_g[m.col_of_[u]].first) ? 0 : epsilon;
  }
  double pmax(std::size_t u) const {
    return m.node_weight_[u] - row_other(u) - phi(u) - col_other(u) - gamma(u) +
           incoming[u];
  }
};

void BpConfig::validate() const {
  if (!(epsilon >= 0)) throw ValidationError("epsilon must be non-negative");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (convergence_window < 1) {
    throw ValidationError("convergence_window must be >= 1");
  }
  if (!(damping >= 0 && damping < 1)) {
    throw ValidationError("damping must lie in [0,1)");
  }
}

BpModel::BpModel(const NapProblem& p) : problem_(&p) {
  const std::size_t nc = p.num_candidates();
  const double alpha = p.alpha();
  node_weight_.resize(nc);
  row_of_.resize(nc);
  col_of_.resize(nc);
  row_offsets_.assign(p.n_a() + 1, 0);
  col_offsets_.assign(p.n_b() + 1, 0);
  for (std::size_t k = 0; k < nc; ++k) {
    const Candidate& c = p.candidate(k);
    node_weight_[k] = alpha * p.node_weight(k);
    row_of_[k] = c.a;
    col_of_[k] = c.b;
    ++row_offsets_[c.a + 1];
    ++col_offsets_[c.b + 1];
  }
  for (std::size_t r = 0; r < p.n_a(); ++r) row_offsets_[r + 1] += row_offsets_[r];
  for (std::size_t c = 0; c < p.n_b(); ++c) col_offsets_[c + 1] += col_offsets_[c];
  col_members_.resize(nc);
  {
    std::vector<std::size_t> cursor(col_offsets_.begin(), col_offsets_.end() - 1);
    for (std::size_t k = 0; k < nc; ++k) {
      col_members_[cursor[col_of_[k]]++] = static_cast<std::uint32_t>(k);
    }
  }

  // Merge directed squares into symmetric interactions keyed by (lo, hi).
  std::vector<std::pair<std::uint64_t, double>> links;
  links.reserve(p.squares().size());
  for (const Square& sq : p.squares()) {
    const std::uint64_t lo = std::min(sq.from, sq.to);
    const std::uint64_t hi = std::max(sq.from, sq.to);
    links.push_back({(lo << 32) | hi, sq.weight});
  }
  std::sort(links.begin(), links.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t t = 0; t < links.size();) {
    const std::uint64_t key = links[t].first;
    double w = 0;
    for (; t < links.size() && links[t].first == key; ++t) w += links[t].second;
    const auto lo = static_cast<std::uint32_t>(key >> 32);
    const auto hi = static_cast<std::uint32_t>(key & 0xffffffffu);
    const auto e = static_cast<std::uint32_t>(arc_src_.size());
    // arc e: lo -> hi, arc e + 1: hi -> lo
    arc_src_.push_back(lo);
    arc_dst_.push_back(hi);
    arc_rev_.push_back(e + 1);
    arc_src_.push_back(hi);
    arc_dst_.push_back(lo);
    arc_rev_.push_back(e);
    arc_weight_.push_back((1 - alpha) * w);
    arc_weight_.push_back((1 - alpha) * w);
  }
  in_offsets_.assign(nc + 1, 0);
  for (std::uint32_t d : arc_dst_) ++in_offsets_[d + 1];
  for (std::size_t k = 0; k < nc; ++k) in_offsets_[k + 1] += in_offsets_[k];
  in_arcs_.resize(arc_dst_.size());
  std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t e = 0; e < arc_dst_.size(); ++e) {
    in_arcs_[cursor[arc_dst_[e]]++] = static_cast<std::uint32_t>(e);
  }
}

std::size_t BpState::message_bytes() const {
  return sizeof(double) *
         (f.size() + g.size() + h.size() + phi.size() + gamma.size());
}

BpState bp_init(const BpModel& model) {
  BpState s;
  s.f.assign(model.num_candidates(), 0);
  s.g.assign(model.num_candidates(), 0);
  s.h.assign(model.num_arcs(), 0);
  s.phi.assign(model.num_candidates(), 0);
  s.gamma.assign(model.num_candidates(), 0);
  return s;
}

BpState bp_iterate(const BpModel& model, const BpState& s, const BpConfig& cfg,
                   std::uint64_t* ops) {
  if (s.f.size() != model.num_candidates() ||
      s.g.size() != model.num_candidates() || s.h.size() != model.num_arcs()) {
    throw ValidationError("message state does not match the problem");
  }
  const BpKernel kernel(model, s, cfg, ops);
  const BpModel& m = model;
  BpState next;
  next.iteration = s.iteration + 1;
  next.best_mapping = s.best_mapping;
  next.best_objective = s.best_objective;
  const std::size_t nc = m.num_candidates();
  next.f.resize(nc);
  next.g.resize(nc);
  next.phi.resize(nc);
  next.gamma.resize(nc);
  next.h.resize(m.num_arcs());
  const double keep = cfg.damping;
  const double take = 1 - cfg.damping;

  internal::parallel_for(nc, cfg.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t u = lo; u < hi; ++u) {
      const double w = m.node_weight_[u];
      const double phi = kernel.phi(u);
      const double gamma = kernel.gamma(u);
      const double f = w - kernel.col_other(u) - gamma + kernel.incoming[u];
      const double g = w - kernel.row_other(u) - phi + kernel.incoming[u];
      next.phi[u] = phi;
      next.gamma[u] = gamma;
      next.f[u] = keep == 0 ? f : take * f + keep * s.f[u];
      next.g[u] = keep == 0 ? g : take * g + keep * s.g[u];
    }
  });
  internal::parallel_for(m.num_arcs(), cfg.threads,
                         [&](std::size_t lo, std::size_t hi) {
                           for (std::size_t e = lo; e < hi; ++e) {
                             // Everything u knows except what v told it.
                             const std::uint32_t u = m.arc_src_[e];
                             const double h =
                                 kernel.pmax(u) -
                                 kernel.arc_term(m.arc_rev_[e]);
                             next.h[e] = keep == 0 ? h : take * h + keep * s.h[e];
                           }
                         });
  if (ops) *ops += nc + m.num_arcs();
  return next;
}

std::vector<double> max_marginals(const BpModel& model, const BpState& s,
                                  const BpConfig& cfg) {
  const BpKernel kernel(model, s, cfg, nullptr);
  std::vector<double> out(model.num_candidates());
  internal::parallel_for(out.size(), cfg.threads,
                         [&](std::size_t lo, std::size_t hi) {
                           for (std::size_t u = lo; u < hi; ++u) out[u] = kernel.pmax(u);
                         });
  return out;
}

Mapping round_marginals(const NapProblem& p, const std::vector<double>& pmax) {
  std::vector<WeightedPair> positive;
  std::vector<char> row_used(p.n_a(), 0), col_used(p.n_b(), 0);
  bool feasible = true;
  for (std::size_t k = 0; k < pmax.size(); ++k) {
    if (!(pmax[k] > 0)) continue;
    const Candidate& c = p.candidate(k);
    positive.push_back({c.a, c.b, pmax[k]});
    if (row_used[c.a] || col_used[c.b]) feasible = false;
    row_used[c.a] = 1;
    col_used[c.b] = 1;
  }
  if (feasible) {
    // A conflict-free positive set is its own maximum-weight matching.
    std::vector<Pair> pairs;
    pairs.reserve(positive.size());
    for (const WeightedPair& w : positive) pairs.emplace_back(w.a, w.b);
    return Mapping(std::move(pairs));
  }
  return solve_mwm(p.n_a(), p.n_b(), positive);
}

Mapping estimate_mode(const BpModel& model, const BpState& s,
                      const BpConfig& cfg) {
  return round_marginals(model.problem(), max_marginals(model, s, cfg));
}

NapSolution solve_nap(const NapProblem& p, const BpConfig& cfg) {
  cfg.validate();
  NapSolution out;
  BpDiagnostics& diag = out.diagnostics;
  if (p.num_candidates() == 0) {
    diag.stop_reason = "empty";
    diag.converged = true;
    return out;
  }
  const BpModel model(p);
  BpState state = bp_init(model);
  state.best_objective = 0;  // the empty mapping is always feasible
  diag.message_bytes = state.message_bytes();

  Mapping last_mode;
  int stable = 0;
  diag.stop_reason = "max_iterations";
  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::uint64_t ops = 0;
    BpState next = bp_iterate(model, state, cfg, &ops);
    diag.ops_per_iteration.push_back(ops);

    double delta = 0;
    for (std::size_t k = 0; k < next.f.size(); ++k) {
      delta = std::max({delta, std::abs(next.f[k] - state.f[k]),
                        std::abs(next.g[k] - state.g[k])});
    }
    for (std::size_t e = 0; e < next.h.size(); ++e) {
      delta = std::max(delta, std::abs(next.h[e] - state.h[e]));
    }
    state = std::move(next);

    Mapping mode = estimate_mode(model, state, cfg);
    const double value = nap_objective(p, mode);
    if (value > state.best_objective) {
      state.best_objective = value;
      state.best_mapping = mode;
    }
    diag.mode_objective.push_back(value);
    diag.best_objective.push_back(state.best_objective);
    diag.iterations = it + 1;

    stable = (it > 0 && mode == last_mode) ? stable + 1 : 0;
    last_mode = std::move(mode);
    if (delta < 1e-9) {
      diag.converged = true;
      diag.stop_reason = "messages";
      break;
    }
    if (stable >= cfg.convergence_window) {
      diag.stop_reason = "stable_mode";
      break;
    }
  }
  out.mapping = state.best_mapping;
  out.objective = state.best_objective;
  return out;
}

}  // namespace cgdiff
