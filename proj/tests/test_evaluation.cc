#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "cgdiff/errors.h"
#include "cgdiff/evaluation.h"
#include "cgdiff/synthetic.h"
#include "doctest.h"
#include "test_util.h"

using namespace cgdiff;

namespace {

GroundTruth identity_truth(std::size_t n) {
  std::vector<Pair> pairs;
  for (NodeId i = 0; i < n; ++i) pairs.emplace_back(i, i);
  return {n, n, Mapping(std::move(pairs))};
}

GroundTruth random_link(std::size_t n, std::mt19937_64& rng) {
  return {n, n, testutil::random_mapping(n, n, rng)};
}

// Relational composition by joining pair sets on the middle element.
std::set<Pair> set_join(const std::vector<GroundTruth>& chain) {
  std::set<Pair> acc(chain[0].pairs.pairs().begin(), chain[0].pairs.pairs().end());
  for (std::size_t k = 1; k < chain.size(); ++k) {
    std::set<Pair> next;
    for (const Pair& x : acc) {
      for (const Pair& y : chain[k].pairs.pairs()) {
        if (x.second == y.first) next.insert({x.first, y.second});
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

TEST_CASE("composition of identities is the identity") {
  const std::vector<GroundTruth> chain(3, identity_truth(5));
  const GroundTruth g = extrapolate(chain);
  CHECK(g.pairs == identity_truth(5).pairs);
  CHECK(g.n_a == 5);
  CHECK(g.n_b == 5);
}

TEST_CASE("single-link composition") {
  const std::vector<GroundTruth> chain{{1, 2, Mapping({{0, 1}})},
                                       {2, 3, Mapping({{1, 2}})}};
  const GroundTruth g = extrapolate(chain);
  CHECK(g.pairs == Mapping({{0, 2}}));
  CHECK(g.n_a == 1);
  CHECK(g.n_b == 3);
}

TEST_CASE("composition matches a set-join oracle") {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 50; ++t) {
    std::vector<GroundTruth> chain;
    for (int k = 0; k < 4; ++k) chain.push_back(random_link(20, rng));
    const GroundTruth g = extrapolate(chain);
    const std::set<Pair> oracle = set_join(chain);
    CHECK(std::set<Pair>(g.pairs.pairs().begin(), g.pairs.pairs().end()) == oracle);
  }
}

TEST_CASE("mismatched links cannot be composed") {
  const std::vector<GroundTruth> chain{{2, 3, Mapping()}, {2, 2, Mapping()}};
  CHECK_THROWS_AS(extrapolate(chain), CompositionError);
  CHECK_THROWS_AS(extrapolate(std::span<const GroundTruth>()), CompositionError);
}

TEST_CASE("scores of a perfect mapping") {
  const GroundTruth g = identity_truth(4);
  const Scores s = score(g.pairs, g);
  CHECK(s.swapped_precision == 1);
  CHECK(s.swapped_recall == 1);
  CHECK(s.precision == 1);
  CHECK(s.recall == 1);
  CHECK(s.f1 == 1);
}

TEST_CASE("empty mapping against a non-empty truth") {
  const Scores s = score(Mapping(), identity_truth(3));
  CHECK(s.swapped_precision == 0);
  CHECK(s.recall == 0);
  CHECK(s.f1 == 0);
}

TEST_CASE("three correct out of six matched and four expected") {
  const GroundTruth g{10, 10, Mapping({{0, 0}, {1, 1}, {2, 2}, {3, 3}})};
  const Mapping m({{0, 0}, {1, 1}, {2, 2}, {4, 5}, {5, 4}, {6, 7}});
  const Scores s = score(m, g);
  CHECK(s.correct == 3);
  CHECK(s.truth == 4);
  CHECK(s.matched == 6);
  CHECK(s.swapped_precision == doctest::Approx(0.75));
  CHECK(s.swapped_recall == doctest::Approx(0.5));
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(0.75));
  CHECK(s.f1 == doctest::Approx(0.6));
}

TEST_CASE("the two conventions are transposes of each other") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const GroundTruth g = random_link(12, rng);
    const Scores s = score(testutil::random_mapping(12, 12, rng), g);
    CHECK(s.swapped_precision == s.recall);
    CHECK(s.swapped_recall == s.precision);
  }
}

TEST_CASE("ground-truth files resolve names and indices") {
  const CallGraph a = generate_graph(5, 0.3, 1);
  const Mutation mut = mutate(a, {1, 1, 0, 0}, 2);
  const std::string text = serialize_ground_truth(mut.truth, a, mut.graph);
  const GroundTruth back = parse_ground_truth(text, a, mut.graph);
  CHECK(back.pairs == mut.truth.pairs);
  CHECK(serialize_ground_truth(back, a, mut.graph) == text);

  const GroundTruth by_index = parse_ground_truth(
      R"({"format_version": 1, "pairs": [[0, "f1"], ["f2", 3]]})", a, a);
  CHECK(by_index.pairs == Mapping({{0, 1}, {2, 3}}));

  CHECK_THROWS_AS(parse_ground_truth(R"({"format_version": 1, "pairs": [["nope", "f1"]]})",
                                     a, a),
                  ValidationError);
  CHECK_THROWS_AS(parse_ground_truth(R"({"format_version": 1, "pairs": [[9, 0]]})", a, a),
                  ValidationError);
  CHECK_THROWS_AS(parse_ground_truth(R"({"pairs": 3})", a, a), ParseError);
  CHECK_THROWS_AS(
      parse_ground_truth(R"({"format_version": 1, "pairs": [["f0", "f1"], ["f2", "f1"]]})",
                         a, a),
      ConstraintError);
}
