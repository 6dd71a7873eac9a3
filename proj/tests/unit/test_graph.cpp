#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ecggin/error.hpp"
#include "ecggin/graph.hpp"
#include "support/oracles.hpp"

using namespace ecggin;

TEST_CASE("empty corpus serializes to nothing") {
  std::ostringstream out;
  serialize_corpus(GraphCorpus{}, out);
  CHECK(out.str().empty());
}

TEST_CASE("single graph line layout") {
  Graph g;
  g.num_nodes = 2;
  g.edges = {{0, 1, 1.0}};
  g.node_features = {{0.5}, {0.7}};
  g.label = 1;
  std::ostringstream out;
  serialize_corpus(make_corpus({g}), out);
  CHECK(out.str() == "{\"n\":2,\"directed\":false,\"edges\":[[0,1,1.0]],\"x\":[[0.5],[0.7]],\"y\":1}\n");
}

TEST_CASE("serialization round-trips random corpora exactly") {
  std::mt19937_64 rng(42);
  std::vector<Graph> graphs;
  for (int i = 0; i < 100; ++i) {
    const bool directed = i % 3 == 0;
    Graph g = testing::random_graph(rng, 1 + i % 17, 0.3, 3, directed);
    g.label = i % 2;
    graphs.push_back(std::move(g));
  }
  const GraphCorpus c = make_corpus(graphs);
  std::stringstream buf;
  serialize_corpus(c, buf);
  const GraphCorpus back = deserialize_corpus(buf);
  CHECK(back == c);
}

TEST_CASE("deserialize reports the offending line") {
  std::istringstream in("{\"n\":1,\"directed\":false,\"edges\":[],\"x\":[[1]],\"y\":0}\n{\"n\":2,\"directed\":false}\n");
  try {
    deserialize_corpus(in);
    FAIL("expected a parse error");
  } catch (const RowError& e) {
    CHECK(e.row() == 2);
    CHECK(e.code() == ErrorCode::ParseError);
  }

  std::istringstream bad_edge("{\"n\":2,\"directed\":false,\"edges\":[[1,0,1.0]],\"x\":[[1],[1]],\"y\":0}\n");
  CHECK_THROWS_AS(deserialize_corpus(bad_edge), RowError);
}

TEST_CASE("validate enforces graph invariants") {
  Graph g;
  g.num_nodes = 3;
  g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  CHECK_NOTHROW(validate(g));

  Graph dup = g;
  dup.edges.push_back({1, 2, 1.0});
  CHECK_THROWS_AS(validate(dup), Error);

  Graph out_of_range = g;
  out_of_range.edges.push_back({1, 3, 1.0});
  CHECK_THROWS_AS(validate(out_of_range), Error);

  Graph weighted = g;
  weighted.edges[0].w = 0.5;
  CHECK_THROWS_AS(validate(weighted), Error);

  Graph directed;
  directed.num_nodes = 2;
  directed.directed = true;
  directed.edges = {{0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 1.0}};
  CHECK_NOTHROW(validate(directed));
  directed.edges[1].w = 0.0;
  CHECK_THROWS_AS(validate(directed), Error);

  Graph ragged = g;
  ragged.node_features = {{1.0}, {1.0, 2.0}, {1.0}};
  CHECK_THROWS_AS(validate(ragged), Error);
}

TEST_CASE("relabel") {
  const Graph path = testing::path_graph(3);
  const std::vector<int> id{0, 1, 2};
  CHECK(relabel(path, id) == path);

  Graph p = path;
  p.node_features = {{0.0}, {1.0}, {2.0}};
  const Graph r = relabel(p, std::vector<int>{2, 1, 0});
  CHECK(r.edges == std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}});
  CHECK(r.node_features == std::vector<std::vector<double>>{{2.0}, {1.0}, {0.0}});

  CHECK_THROWS_AS(relabel(path, std::vector<int>{0, 0, 1}), Error);
  CHECK_THROWS_AS(relabel(path, std::vector<int>{0, 1}), Error);
  CHECK_THROWS_AS(relabel(path, std::vector<int>{0, 1, 3}), Error);
}

TEST_CASE("relabel preserves size, degree multiset and label") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g = testing::random_graph(rng, 1 + trial % 25, 0.2, 2, trial % 2 == 1);
    g.label = trial % 3;
    const Graph r = relabel(g, testing::random_permutation(rng, g.num_nodes));
    CHECK_NOTHROW(validate(r));
    CHECK(r.num_nodes == g.num_nodes);
    CHECK(r.edges.size() == g.edges.size());
    CHECK(r.label == g.label);
    auto d1 = degrees(g);
    auto d2 = degrees(r);
    std::sort(d1.begin(), d1.end());
    std::sort(d2.begin(), d2.end());
    CHECK(d1 == d2);
  }
}

TEST_CASE("degrees and connectivity") {
  CHECK(degrees(testing::path_graph(3)) == std::vector<int>{1, 2, 1});
  CHECK(degrees(testing::star_graph(4)) == std::vector<int>{3, 1, 1, 1});
  CHECK(is_connected(testing::path_graph(5)));
  Graph split = testing::path_graph(4);
  split.edges.erase(split.edges.begin() + 1);
  CHECK_FALSE(is_connected(split));
}
