#include <vector>

#include "cgdiff/bp_solver.h"
#include "cgdiff/errors.h"
#include "cgdiff/evaluation.h"
#include "cgdiff/similarity.h"
#include "cgdiff/synthetic.h"
#include "doctest.h"

using namespace cgdiff;

namespace {

void check_well_formed(const CallGraph& g) {
  std::vector<double> in(g.size(), 0), out(g.size(), 0);
  for (const Edge& e : g.edges()) {
    CHECK(e.caller != e.callee);
    out[e.caller] += 1;
    in[e.callee] += 1;
  }
  for (NodeId i = 0; i < g.size(); ++i) {
    const FeatureVector& f = g.node(i).features;
    CHECK(f.callers == in[i]);
    CHECK(f.callees == out[i]);
    double total = 0;
    for (double c : f.class_counts) {
      CHECK(c >= 0);
      total += c;
    }
    CHECK(f.total_instructions == total);
    CHECK(f.blocks >= 1);
  }
}

}  // namespace

TEST_CASE("degenerate generator inputs") {
  CHECK(generate_graph(0, 0.5, 1).size() == 0);
  const CallGraph g = generate_graph(30, 0.0, 1);
  CHECK(g.size() == 30);
  CHECK(g.edges().empty());
  CHECK(generate_graph(6, 1.0, 1).edges().size() == 30);
  CHECK_THROWS_AS(generate_graph(3, 1.5, 1), ValidationError);
}

TEST_CASE("generator is deterministic in its seed") {
  const CallGraph x = generate_graph(40, 0.1, 99);
  const CallGraph y = generate_graph(40, 0.1, 99);
  const CallGraph z = generate_graph(40, 0.1, 100);
  CHECK(serialize_call_graph(x) == serialize_call_graph(y));
  CHECK(serialize_call_graph(x) != serialize_call_graph(z));
  check_well_formed(x);
}

TEST_CASE("empty mutation returns the graph and the identity") {
  const CallGraph g = generate_graph(12, 0.2, 5);
  const Mutation m = mutate(g, {}, 6);
  CHECK(serialize_call_graph(m.graph) == serialize_call_graph(g));
  REQUIRE(m.truth.pairs.size() == 12);
  for (const auto& [x, y] : m.truth.pairs.pairs()) CHECK(x == y);
}

TEST_CASE("mutation bookkeeping") {
  const CallGraph g = generate_graph(20, 0.15, 8);
  SUBCASE("one deletion") {
    const Mutation m = mutate(g, {0, 1, 0, 0}, 1);
    CHECK(m.graph.size() == 19);
    CHECK(m.truth.pairs.size() == 19);
  }
  SUBCASE("mixed operations") {
    const MutationSpec spec{3, 2, 4, 5};
    const Mutation m = mutate(g, spec, 2);
    CHECK(m.graph.size() == 21);
    CHECK(m.truth.n_a == 20);
    CHECK(m.truth.n_b == 21);
    CHECK(m.truth.pairs.size() == 18);
    check_well_formed(m.graph);
    // Survivors keep their names.
    for (const auto& [x, y] : m.truth.pairs.pairs()) {
      CHECK(g.node(x).name == m.graph.node(y).name);
    }
    const Mutation again = mutate(g, spec, 2);
    CHECK(serialize_call_graph(again.graph) == serialize_call_graph(m.graph));
    CHECK(again.truth.pairs == m.truth.pairs);
  }
  SUBCASE("rewiring preserves the number of calls") {
    const Mutation m = mutate(g, {0, 0, 0, 6}, 3);
    CHECK(m.graph.edges().size() == g.edges().size());
    CHECK(m.graph.edges() != g.edges());
  }
  SUBCASE("infeasible specs") {
    CHECK_THROWS_AS(mutate(g, {0, 21, 0, 0}, 1), ValidationError);
    CHECK_THROWS_AS(mutate(g, {0, 10, 11, 0}, 1), ValidationError);
    CHECK_THROWS_AS(mutate(g, {0, 0, 0, 10000}, 1), ValidationError);
  }
}

TEST_CASE("BP recovers most of a lightly mutated program") {
  double recall = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CallGraph a = generate_graph(20, 0.1, 1000 + seed);
    const Mutation mut = mutate(a, {2, 0, 3, 0}, 2000 + seed);
    const NapProblem p = build_problem(
        build_similarity_matrix(a, mut.graph, SimilarityConfig{}), a, mut.graph,
        0.75, 0.5, 0.5);
    recall += score(solve_nap(p, BpConfig{}).mapping, mut.truth).recall;
  }
  recall /= 50;
  MESSAGE("mean recall " << recall);
  CHECK(recall >= 0.9);
}
