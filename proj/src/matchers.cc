#include "cgdiff/matchers.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "cgdiff/errors.h"

namespace cgdiff {
namespace {

constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  std::size_t col;
  double cost;
};

}  // namespace

Mapping solve_mwm(std::size_t n_a, std::size_t n_b,
                  std::span<const WeightedPair> weights) {
  for (const WeightedPair& w : weights) {
    if (!std::isfinite(w.weight)) throw ValidationError("MWM weights must be finite");
    if (w.a >= n_a || w.b >= n_b) throw ValidationError("MWM pair out of range");
  }
  // Columns [0, n_b) are real, column n_b + r is the dummy of row r.
  std::vector<std::vector<Arc>> adj(n_a);
  for (const WeightedPair& w : weights) {
    if (w.weight > 0) adj[w.a].push_back({w.b, -w.weight});
  }
  for (std::size_t r = 0; r < n_a; ++r) {
    std::sort(adj[r].begin(), adj[r].end(),
              [](const Arc& x, const Arc& y) { return x.col < y.col; });
    adj[r].push_back({n_b + r, 0.0});
  }
  const std::size_t n_cols = n_b + n_a;
  std::vector<double> u(n_a, 0), v(n_cols, 0);
  std::vector<std::size_t> row_match(n_a, kFree), col_match(n_cols, kFree);
  std::vector<double> dist_col(n_cols), dist_row(n_a);
  std::vector<std::size_t> prev_row(n_cols);
  std::vector<char> done_col(n_cols), done_row(n_a);
  std::vector<std::size_t> touched_cols, touched_rows;

  using Entry = std::pair<double, std::size_t>;
  for (std::size_t root = 0; root < n_a; ++root) {
    // Make every reduced cost of the new row non-negative.
    double best = kInf;
    for (const Arc& e : adj[root]) best = std::min(best, e.cost - v[e.col]);
    u[root] = best;

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    touched_cols.clear();
    touched_rows.clear();
    auto relax = [&](std::size_t row, double base) {
      for (const Arc& e : adj[row]) {
        const double rc = std::max(0.0, e.cost - u[row] - v[e.col]);
        const double nd = base + rc;
        if (done_col[e.col]) continue;
        if (dist_col[e.col] == kInf) touched_cols.push_back(e.col);
        if (nd < dist_col[e.col]) {
          dist_col[e.col] = nd;
          prev_row[e.col] = row;
          heap.push({nd, e.col});
        }
      }
    };
    for (std::size_t c = 0; c < n_cols; ++c) dist_col[c] = kInf;
    dist_row[root] = 0;
    done_row[root] = 1;
    touched_rows.push_back(root);
    relax(root, 0);

    std::size_t sink = kFree;
    double sink_dist = 0;
    while (!heap.empty()) {
      auto [d, c] = heap.top();
      heap.pop();
      if (done_col[c] || d > dist_col[c]) continue;
      done_col[c] = 1;
      if (col_match[c] == kFree) {
        sink = c;
        sink_dist = d;
        break;
      }
      const std::size_t y = col_match[c];
      dist_row[y] = d;
      done_row[y] = 1;
      touched_rows.push_back(y);
      relax(y, d);
    }
    // The root's dummy column is always free, so a sink exists.
    for (std::size_t c : touched_cols) {
      if (done_col[c]) v[c] += dist_col[c] - sink_dist;
    }
    for (std::size_t r : touched_rows) u[r] += sink_dist - dist_row[r];

    for (std::size_t c = sink;;) {
      const std::size_t r = prev_row[c];
      const std::size_t next = row_match[r];
      row_match[r] = c;
      col_match[c] = r;
      if (r == root) break;
      c = next;
    }
    for (std::size_t c : touched_cols) done_col[c] = 0;
    for (std::size_t r : touched_rows) done_row[r] = 0;
  }

  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < n_a; ++r) {
    if (row_match[r] < n_b) {
      pairs.emplace_back(static_cast<NodeId>(r), static_cast<NodeId>(row_match[r]));
    }
  }
  return Mapping(std::move(pairs));
}

Mapping solve_mwm(const NapProblem& p) {
  std::vector<WeightedPair> w;
  w.reserve(p.num_candidates());
  for (std::size_t k = 0; k < p.num_candidates(); ++k) {
    const Candidate& c = p.candidate(k);
    w.push_back({c.a, c.b, p.node_weight(k)});
  }
  return solve_mwm(p.n_a(), p.n_b(), w);
}

namespace {

// Nodes within `hops` undirected steps of every node (including itself),
// each list sorted.
std::vector<std::vector<NodeId>> hop_neighborhoods(const CallGraph& g,
                                                   int hops) {
  const std::size_t n = g.size();
  std::vector<std::vector<NodeId>> out(n);
  std::vector<int> depth(n, -1);
  for (NodeId s = 0; s < n; ++s) {
    std::vector<NodeId> seen{s};
    std::deque<NodeId> queue{s};
    depth[s] = 0;
    while (!queue.empty()) {
      const NodeId x = queue.front();
      queue.pop_front();
      if (depth[x] == hops) continue;
      auto visit = [&](NodeId y) {
        if (depth[y] >= 0) return;
        depth[y] = depth[x] + 1;
        seen.push_back(y);
        queue.push_back(y);
      };
      for (NodeId y : g.callees(x)) visit(y);
      for (NodeId y : g.callers(x)) visit(y);
    }
    for (NodeId y : seen) depth[y] = -1;
    std::sort(seen.begin(), seen.end());
    out[s] = std::move(seen);
  }
  return out;
}

}  // namespace

Mapping solve_mcs_greedy(const NapProblem& p, const CallGraph& a,
                         const CallGraph& b, int k) {
  if (k < 1) throw ValidationError("MCS neighborhood size k must be >= 1");
  if (a.size() != p.n_a() || b.size() != p.n_b()) {
    throw IncompatibleError("problem does not match the graphs");
  }
  const auto near_a = hop_neighborhoods(a, k);
  const auto near_b = hop_neighborhoods(b, k);
  auto has_calls = [](const CallGraph& g, NodeId x) {
    return !g.callees(x).empty() || !g.callers(x).empty();
  };

  // Best first: larger w, then smaller (i,i'), i.e. smaller candidate index.
  auto worse = [&](std::size_t x, std::size_t y) {
    const double wx = p.node_weight(x);
    const double wy = p.node_weight(y);
    if (wx != wy) return wx < wy;
    return x > y;
  };
  std::vector<std::size_t> seeds;
  for (std::size_t c = 0; c < p.num_candidates(); ++c) {
    const Candidate& cand = p.candidate(c);
    if (p.node_weight(c) > 0 && has_calls(a, cand.a) && has_calls(b, cand.b)) {
      seeds.push_back(c);
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [&](std::size_t x, std::size_t y) { return worse(y, x); });

  std::vector<char> used_a(p.n_a(), 0), used_b(p.n_b(), 0);
  std::vector<Pair> pairs;
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)>
      frontier(worse);
  auto match = [&](std::size_t c) {
    const Candidate& cand = p.candidate(c);
    used_a[cand.a] = 1;
    used_b[cand.b] = 1;
    pairs.emplace_back(cand.a, cand.b);
    for (NodeId j : near_a[cand.a]) {
      if (used_a[j]) continue;
      for (NodeId jp : near_b[cand.b]) {
        if (used_b[jp]) continue;
        auto idx = p.index_of(j, jp);
        if (idx && p.node_weight(*idx) > 0) frontier.push(*idx);
      }
    }
  };

  std::size_t next_seed = 0;
  while (true) {
    while (!frontier.empty()) {
      const std::size_t c = frontier.top();
      frontier.pop();
      const Candidate& cand = p.candidate(c);
      if (used_a[cand.a] || used_b[cand.b]) continue;
      match(c);
    }
    while (next_seed < seeds.size()) {
      const Candidate& cand = p.candidate(seeds[next_seed]);
      if (!used_a[cand.a] && !used_b[cand.b]) break;
      ++next_seed;
    }
    if (next_seed == seeds.size()) break;
    match(seeds[next_seed++]);
  }

  std::vector<WeightedPair> rest;
  for (std::size_t c = 0; c < p.num_candidates(); ++c) {
    const Candidate& cand = p.candidate(c);
    if (!used_a[cand.a] && !used_b[cand.b]) {
      rest.push_back({cand.a, cand.b, p.node_weight(c)});
    }
  }
  const Mapping tail = solve_mwm(p.n_a(), p.n_b(), rest);
  pairs.insert(pairs.end(), tail.pairs().begin(), tail.pairs().end());
  return Mapping(std::move(pairs));
}

double feasible_mapping_bound(std::size_t n_a, std::size_t n_b) {
  const std::size_t n = std::min(n_a, n_b);
  double total = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    // C(n_a,k) C(n_b,k) k! = n_a!/(n_a-k)! * C(n_b,k)
    double term = 1;
    for (std::size_t t = 0; t < k; ++t) {
      term *= static_cast<double>(n_a - t);
      term *= static_cast<double>(n_b - t) / static_cast<double>(t + 1);
    }
    total += term;
    if (!std::isfinite(total)) return std::numeric_limits<double>::max();
  }
  return total;
}

BruteForceResult brute_force_optimum(const NapProblem& p, double max_mappings) {
  const double bound = feasible_mapping_bound(p.n_a(), p.n_b());
  if (bound > max_mappings) {
    throw RefusalError("exhaustive search over up to " + std::to_string(bound) +
                       " mappings refused (limit " +
                       std::to_string(max_mappings) + ")");
  }
  const std::size_t nc = p.num_candidates();
  // Squares touching each candidate, in either direction.
  std::vector<std::vector<std::pair<std::size_t, double>>> touching(nc);
  for (const Square& s : p.squares()) {
    touching[s.from].push_back({s.to, s.weight});
    touching[s.to].push_back({s.from, s.weight});
  }
  const double alpha = p.alpha();
  std::vector<char> chosen(nc, 0), used_b(p.n_b(), 0);
  std::vector<Pair> current;
  BruteForceResult best;
  std::vector<Pair> best_pairs;
  bool have_best = false;

  std::function<void(NodeId, double, double)> recurse =
      [&](NodeId row, double node_sum, double square_sum) {
        if (row == p.n_a()) {
          const double value = alpha * node_sum + (1 - alpha) * square_sum;
          const double tol = 1e-12 * std::max(1.0, std::abs(value));
          bool take = !have_best || value > best.objective + tol;
          if (!take && std::abs(value - best.objective) <= tol) {
            take = current < best_pairs;
          }
          if (take) {
            best.objective = value;
            best_pairs = current;
            have_best = true;
          }
          return;
        }
        recurse(row + 1, node_sum, square_sum);
        const auto cands = p.similarity().row(row);
        const std::size_t base = cands.empty()
                                     ? 0
                                     : static_cast<std::size_t>(
                                           &cands.front() -
                                           p.similarity().entries().data());
        for (std::size_t t = 0; t < cands.size(); ++t) {
          const std::size_t c = base + t;
          if (used_b[cands[t].b]) continue;
          double gained = 0;
          for (const auto& [other, w] : touching[c]) {
            if (chosen[other]) gained += w;
          }
          chosen[c] = 1;
          used_b[cands[t].b] = 1;
          current.emplace_back(row, cands[t].b);
          recurse(row + 1, node_sum + p.node_weight(c), square_sum + gained);
          current.pop_back();
          used_b[cands[t].b] = 0;
          chosen[c] = 0;
        }
      };
  recurse(0, 0, 0);
  best.mapping = Mapping(best_pairs);
  // Report the objective through the shared evaluator so callers compare
  // like with like.
  best.objective = nap_objective(p, best.mapping);
  return best;
}

}  // namespace cgdiff
