#include "doctest.h"
#include "fixtures.hpp"
#include "nbd/kt_structure.hpp"

using namespace nbd;
using doctest::Approx;

namespace {
struct Solved {
  NBSolution sol;
  MessageState fp;
};

Solved solved(const Instance& inst, std::vector<EdgeId> matching, std::vector<double> gamma) {
  NBSolution s;
  s.matching = std::move(matching);
  s.gamma = std::move(gamma);
  s = certify(s, inst);
  return {s, fp_from_nb(s, inst)};
}
}  // namespace

TEST_CASE("E2 has one path structure") {
  Instance inst = fixtures::e2();
  auto [sol, fp] = solved(inst, {0}, {0.5, 1.5, 0.0});
  auto d = decompose(fp, sol, inst);
  CHECK(d.unmatched == std::vector<NodeId>{2});
  REQUIRE(d.structures.size() == 1);
  const auto& c = d.structures[0];
  CHECK(c.nodes == std::vector<NodeId>{0, 1});
  CHECK(c.matched_edges == std::vector<EdgeId>{0});
  CHECK(c.alternative_edges == std::vector<EdgeId>{1});
  CHECK(c.extended_nodes == std::vector<NodeId>{0, 1, 2});
  CHECK(c.shape == StructureShape::path);
  CHECK(c.sigma == Approx(0.5));
  REQUIRE(d.gap);
  CHECK(*d.gap == Approx(0.5));
  CHECK(d.structure_of == std::vector<int>{0, 0, -1});
}

TEST_CASE("single edge") {
  Instance inst = fixtures::single_edge();
  auto [sol, fp] = solved(inst, {0}, {0.5, 0.5});
  auto d = decompose(fp, sol, inst);
  CHECK(d.unmatched.empty());
  REQUIRE(d.structures.size() == 1);
  CHECK(d.structures[0].alternative_edges.empty());
  CHECK(d.structures[0].sigma == Approx(0.5));
}

TEST_CASE("E4 has two levels") {
  Instance inst = fixtures::e4();
  auto [sol, fp] = solved(inst, {0, 2}, {0.45, 1.55, 0.4, 0.4});
  REQUIRE(sol.stable);
  REQUIRE(sol.balanced);
  auto d = decompose(fp, sol, inst);
  REQUIRE(d.levels.size() == 2);
  CHECK(d.levels[0] == Approx(0.4));
  CHECK(d.levels[1] == Approx(0.45));
  REQUIRE(d.structures.size() == 2);
  CHECK(d.structures[0].matched_edges == std::vector<EdgeId>{2});
  CHECK(d.structures[0].alternative_edges.empty());
  CHECK(d.structures[1].matched_edges == std::vector<EdgeId>{0});
  CHECK(d.structures[1].alternative_edges == std::vector<EdgeId>{1});
  REQUIRE(d.gap);
  CHECK(*d.gap == Approx(0.05));
  CHECK(*compute_gap(d, sol, inst) == Approx(0.05));
}

TEST_CASE("equal slacks share a level") {
  Instance inst = fixtures::e3();
  auto [sol, fp] = solved(inst, {0, 2}, {1.5, 1.5, 1.5, 1.5});
  auto d = decompose(fp, sol, inst);
  CHECK(d.structures.size() == 2);
  CHECK(d.levels.size() == 1);
  REQUIRE(d.gap);
  CHECK(*d.gap == Approx(1.5));
}

TEST_CASE("an alternating cycle leaves the gap undefined") {
  Instance inst = fixtures::b1();
  auto [sol, fp] = solved(inst, {0, 2}, {5, 5, 5, 5});
  auto d = decompose(fp, sol, inst);
  REQUIRE(d.structures.size() == 1);
  CHECK(d.structures[0].shape == StructureShape::cycle);
  CHECK(d.structures[0].sigma == Approx(1.0));
  CHECK_FALSE(d.gap);
}

TEST_CASE("blossom and bicycle shapes") {
  GeneratorSpec g;
  g.weights = UniformWeights{1, 10};
  for (auto [topo, shape] : {std::pair{Topology::blossom, StructureShape::blossom},
                             std::pair{Topology::bicycle, StructureShape::bicycle}}) {
    g.topology = topo;
    g.stem = topo == Topology::bicycle ? 3 : 2;
    g.cycle = 3;
    g.cycle2 = 3;
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 200 && !seen; ++seed) {
      g.seed = seed;
      Instance inst = generate(g);
      auto r = run(inst, {.kappa = 0.5, .eps_conv = 1e-13, .max_iters = 2'000'000}, quiet_trace());
      if (!r.converged) continue;
      auto sol = solution_from_state(r.state, inst);
      if (!sol.stable || !sol.balanced) continue;
      auto cls = classify(inst);
      if (cls.kind != LPKind::tight || cls.optimum.support() != sol.matching) continue;
      KTDecomposition d;
      try {
        d = decompose(fp_from_nb(sol, inst), sol, inst);
      } catch (const Error&) {
        continue;
      }
      for (const auto& c : d.structures) seen = seen || c.shape == shape;
    }
    CHECK_MESSAGE(seen, to_string(shape));
  }
}

TEST_CASE("ambiguous slack clustering is an error") {
  Instance inst(4, {{0, 1, 1.0}, {2, 3, 1.0 + 1e-5}});
  auto [sol, fp] = solved(inst, {0, 1}, {0.5, 0.5, 0.5 + 5e-6, 0.5 + 5e-6});
  CHECK_THROWS_AS(decompose(fp, sol, inst), Error);
}

TEST_CASE("uncertified input is rejected") {
  Instance inst = fixtures::e2();
  NBSolution s;
  s.matching = {0};
  s.gamma = {1.0, 1.0, 0.0};
  s = certify(s, inst);
  CHECK_THROWS_AS(decompose(derive(Messages(4, 0.0), inst), s, inst), Error);
}

TEST_CASE("decomposition is invariant under relabelling") {
  Instance inst = fixtures::e4();
  auto [sol, fp] = solved(inst, {0, 2}, {0.45, 1.55, 0.4, 0.4});
  auto d = decompose(fp, sol, inst);
  // nodes 0,1,2,3 -> 3,1,0,2; edges listed in a different order
  Instance relabelled(4, {{0, 2, 0.8}, {3, 1, 2.0}, {1, 0, 1.5}});
  auto [sol2, fp2] = solved(relabelled, {0, 1}, {0.4, 1.55, 0.4, 0.45});
  auto d2 = decompose(fp2, sol2, relabelled);
  REQUIRE(d2.levels.size() == d.levels.size());
  for (std::size_t k = 0; k < d.levels.size(); ++k) CHECK(d2.levels[k] == Approx(d.levels[k]));
  CHECK(*d2.gap == Approx(*d.gap));
  std::vector<int> perm{3, 1, 0, 2};
  for (NodeId i = 0; i < 4; ++i) CHECK(d2.node_slack[perm[i]] == Approx(d.node_slack[i]));
}

TEST_CASE("identities on E2 and the single edge") {
  Instance inst = fixtures::e2();
  auto [sol, fp] = solved(inst, {0}, {0.5, 1.5, 0.0});
  auto rep = check_fp_identities(decompose(fp, sol, inst), fp, inst);
  CHECK(rep.passed);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].kind == IdentityKind::matched);
  CHECK(rep.rows[0].message_surplus == Approx(-1.0));
  CHECK(rep.rows[1].kind == IdentityKind::alternative);
  CHECK(rep.rows[1].message_surplus == Approx(0.5));

  Instance one = fixtures::single_edge();
  auto [s1, f1] = solved(one, {0}, {0.5, 0.5});
  auto r1 = check_fp_identities(decompose(f1, s1, one), f1, one);
  CHECK(r1.passed);
  CHECK(r1.rows[0].message_surplus == Approx(-1.0));
}

TEST_CASE("identities and dual objective on E4") {
  Instance inst = fixtures::e4();
  auto [sol, fp] = solved(inst, {0, 2}, {0.45, 1.55, 0.4, 0.4});
  auto d = decompose(fp, sol, inst);
  CHECK(check_fp_identities(d, fp, inst).passed);
  double total = 0.0;
  for (double g : sol.gamma) total += g;
  CHECK(total == Approx(classify(inst).optimum.weight));
}
