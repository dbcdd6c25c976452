#include "doctest.h"
#include "fixtures.hpp"
#include "nbd/instance.hpp"

using namespace nbd;

TEST_CASE("load builds a single-edge instance") {
  Instance inst = load(R"({"nodes": 2, "edges": [{"u": 0, "v": 1, "w": 1.0}]})");
  CHECK(inst.node_count() == 2);
  CHECK(inst.edge_count() == 1);
  CHECK(inst.edge(0).w == 1.0);
}

TEST_CASE("load rejects invalid documents") {
  CHECK_THROWS_WITH_AS(load(R"({"nodes": 2, "edges": [{"u": 0, "v": 1, "w": 0}]})"),
                       doctest::Contains("non-positive weight"), Error);
  CHECK_THROWS_AS(load(R"({"nodes": 2, "edges": [{"u": 0, "v": 2, "w": 1}]})"), Error);
  CHECK_THROWS_AS(load(R"({"nodes": 2, "edges": [{"u": 1, "v": 1, "w": 1}]})"), Error);
  CHECK_THROWS_AS(load(R"({"nodes": 2, "edges": [{"u": 0, "v": 1, "w": 1}, {"u": 1, "v": 0, "w": 2}]})"), Error);
  CHECK_THROWS_AS(load("[1,2]"), Error);
  CHECK_THROWS_AS(load("{not json"), Error);
}

TEST_CASE("save and load round-trip exactly") {
  GeneratorSpec g;
  g.topology = Topology::erdos_renyi;
  g.size = 7;
  g.weights = UniformWeights{1, 10};
  g.seed = 11;
  Instance inst = generate(g);
  Instance back = load(save(inst));
  REQUIRE(back.edge_count() == inst.edge_count());
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    CHECK(back.edge(e).u == inst.edge(e).u);
    CHECK(back.edge(e).v == inst.edge(e).v);
    CHECK(back.edge(e).w == inst.edge(e).w);
  }
  CHECK(save(back) == save(inst));
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 6.569724727334196, 1e-300, 12345.678}) CHECK(parse_double(format_double(x)) == x);
}

TEST_CASE("explicit path generation reproduces E2") {
  GeneratorSpec g;
  g.topology = Topology::path;
  g.size = 3;
  g.weights = ExplicitWeights{{2.0, 1.0}};
  CHECK(save(generate(g)) == save(fixtures::e2()));
}

TEST_CASE("explicit odd cycle of three is the unit triangle") {
  GeneratorSpec g;
  g.topology = Topology::odd_cycle;
  g.size = 3;
  g.weights = ExplicitWeights{{1.0, 1.0, 1.0}};
  Instance inst = generate(g);
  CHECK(inst.edge_count() == 3);
  CHECK(cyclomatic_number(inst) == 1);
  CHECK(save(inst) == save(fixtures::t1()));
}

TEST_CASE("generation is deterministic in the seed") {
  GeneratorSpec g;
  g.topology = Topology::blossom;
  g.stem = 2;
  g.cycle = 5;
  g.seed = 7;
  std::string first = save(generate(g));
  CHECK(save(generate(g)) == first);
  g.seed = 8;
  CHECK(save(generate(g)) != first);
}

TEST_CASE("topologies have the expected shape") {
  GeneratorSpec g;
  g.topology = Topology::blossom;
  g.stem = 3;
  g.cycle = 5;
  Instance blossom = generate(g);
  CHECK(blossom.node_count() == 8);
  CHECK(cyclomatic_number(blossom) == 1);

  g.topology = Topology::bicycle;
  g.stem = 2;
  g.cycle = 3;
  g.cycle2 = 5;
  Instance bicycle = generate(g);
  CHECK(cyclomatic_number(bicycle) == 2);

  g.topology = Topology::even_cycle;
  g.size = 6;
  CHECK(generate(g).edge_count() == 6);

  g.topology = Topology::blossom;
  g.cycle = 4;
  CHECK_THROWS_AS(generate(g), Error);
  g.topology = Topology::even_cycle;
  g.size = 5;
  CHECK_THROWS_AS(generate(g), Error);
}

TEST_CASE("max_weight") {
  CHECK(max_weight(fixtures::e2()) == 2.0);
  CHECK(max_weight(fixtures::t1()) == 1.0);
  CHECK(max_weight(fixtures::single_edge(0.5)) == 0.5);
}

TEST_CASE("directed indexing") {
  Instance inst = fixtures::e2();
  CHECK(inst.directed(0, 1) == 0);
  CHECK(inst.directed(1, 0) == 1);
  CHECK(inst.directed(2, 1) == 3);
  CHECK(inst.from(3) == 2);
  CHECK(inst.to(3) == 1);
  CHECK_THROWS_AS(inst.directed(0, 2), Error);
}

TEST_CASE("parse_topology rejects unknown names") {
  CHECK(parse_topology("bicycle") == Topology::bicycle);
  CHECK_THROWS_AS(parse_topology("star"), Error);
}
