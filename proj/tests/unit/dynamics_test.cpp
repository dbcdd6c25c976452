#include "doctest.h"
#include "fixtures.hpp"
#include "nbd/dynamics.hpp"

using namespace nbd;
using doctest::Approx;

TEST_CASE("offer formula") {
  CHECK(compute_offer(1.0, 0.2, 0.3) == Approx(0.55));
  CHECK(compute_offer(1.0, 1.2, 0.0) == 0.0);
  CHECK(compute_offer(2.0, 0.0, 1.0) == Approx(1.5));
}

TEST_CASE("derive on E2 from zero messages") {
  Instance inst = fixtures::e2();
  MessageState s = derive(Messages(4, 0.0), inst);
  CHECK(s.offers[0] == Approx(1.0));
  CHECK(s.offers[1] == Approx(1.0));
  CHECK(s.offers[2] == Approx(0.5));
  CHECK(s.offers[3] == Approx(0.5));
  CHECK(s.earnings[0] == Approx(1.0));
  CHECK(s.earnings[1] == Approx(1.0));
  CHECK(s.earnings[2] == Approx(0.5));
}

TEST_CASE("derive on the single edge and at the E2 fixed point") {
  MessageState one = derive(Messages(2, 0.0), fixtures::single_edge());
  CHECK(one.earnings[0] == Approx(0.5));
  CHECK(one.earnings[1] == Approx(0.5));

  MessageState fp = derive(fixtures::e2_alpha(), fixtures::e2());
  CHECK(fp.earnings[0] == Approx(0.5));
  CHECK(fp.earnings[1] == Approx(1.5));
  CHECK(fp.earnings[2] == Approx(0.0));
  CHECK_THROWS_AS(derive(Messages(3, 0.0), fixtures::e2()), Error);
}

TEST_CASE("one damped step on E2") {
  Instance inst = fixtures::e2();
  MessageState s1 = step(derive(Messages(4, 0.0), inst), inst, 0.5);
  CHECK(s1.alpha[1] == Approx(0.25));
  CHECK(s1.time == 1);
  MessageState again = step(derive(Messages(4, 0.0), inst), inst, 0.5);
  CHECK(again.alpha == s1.alpha);
}

TEST_CASE("a fixed point does not move") {
  Instance inst = fixtures::e2();
  MessageState fp = derive(fixtures::e2_alpha(), inst);
  CHECK(fixed_point_residual(fp, inst) == 0.0);
  MessageState next = step(fp, inst, 0.3);
  CHECK(fixtures::max_abs_diff(next.alpha, fp.alpha) < 1e-15);
}

TEST_CASE("run converges on small instances") {
  DynamicsConfig cfg;
  auto one = run(fixtures::single_edge(), cfg, quiet_trace());
  CHECK(one.converged);
  CHECK(one.state.earnings[0] == Approx(0.5).epsilon(1e-6));

  auto e2 = run(fixtures::e2(), cfg, quiet_trace());
  REQUIRE(e2.converged);
  CHECK(fixtures::max_abs_diff(e2.state.earnings, std::vector<double>{0.5, 1.5, 0.0}) < 1e-6);

  auto t1 = run(fixtures::t1(), cfg, quiet_trace());
  REQUIRE(t1.converged);
  CHECK(fixtures::max_abs_diff(t1.state.earnings, std::vector<double>{0.5, 0.5, 0.5}) < 1e-6);
}

TEST_CASE("config validation") {
  DynamicsConfig cfg;
  cfg.kappa = 1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.kappa = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.kappa = 0.5;
  cfg.eps_conv = -1.0;
  CHECK_THROWS_AS(validate(cfg), Error);
}

TEST_CASE("trace records the distances to a reference") {
  Instance inst = fixtures::e2();
  TraceOptions opts;
  opts.reference = fixtures::e2_alpha();
  opts.subgraph = {0, 1};
  DynamicsConfig cfg;
  cfg.max_iters = 5;
  auto r = run(inst, cfg, opts);
  REQUIRE(r.trace.records.size() == 5);
  CHECK(r.trace.records[0].t == 1);
  REQUIRE(r.trace.records[0].u_g);
  CHECK(*r.trace.records[0].u_g >= *r.trace.records[0].u_gf);
  std::string csv = r.trace.to_csv();
  CHECK(csv.rfind("t,", 0) == 0);
}

TEST_CASE("pairing") {
  auto e2 = run(fixtures::e2(), {}, quiet_trace());
  Pairing p = extract_pairing(e2.state, fixtures::e2(), 0.5 / 3);
  CHECK(p.pairs == std::vector<EdgeId>{0});
  CHECK(p.unpaired == std::vector<NodeId>{2});
  CHECK(p.ambiguous.empty());

  auto one = run(fixtures::single_edge(), {}, quiet_trace());
  CHECK(extract_pairing(one.state, fixtures::single_edge(), 0.1).pairs == std::vector<EdgeId>{0});

  auto t1 = run(fixtures::t1(), {}, quiet_trace());
  Pairing tp = extract_pairing(t1.state, fixtures::t1(), 0.01);
  CHECK(tp.pairs.empty());
  CHECK(tp.ambiguous == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("sup_distance") {
  std::vector<double> a = fixtures::e2_alpha();
  CHECK(sup_distance(a, a) == 0.0);
  CHECK(sup_distance(std::vector<double>(4, 0.0), a) == 1.5);
  std::vector<double> b = a;
  b[2] += 0.1;
  CHECK(sup_distance(a, b) == Approx(0.1));
  CHECK_THROWS_AS(sup_distance(a, std::vector<double>(3, 0.0)), Error);
}

TEST_CASE("non-expansion on random pairs") {
  GeneratorSpec g;
  g.topology = Topology::erdos_renyi;
  g.size = 6;
  g.weights = UniformWeights{1, 5};
  g.seed = 3;
  Instance inst = generate(g);
  for (std::uint64_t s = 0; s < 50; ++s) {
    MessageState a = derive(initial_messages(inst, InitUniform{2 * s}), inst);
    MessageState b = derive(initial_messages(inst, InitUniform{2 * s + 1}), inst);
    CHECK(sup_distance(step(a, inst, 0.5).alpha, step(b, inst, 0.5).alpha) <= sup_distance(a.alpha, b.alpha) + 1e-12);
  }
}

TEST_CASE("snapshot documents round-trip") {
  Instance inst = fixtures::e2();
  MessageState s = derive(fixtures::e2_alpha(), inst);
  CHECK(alpha_from_snapshot(snapshot_document(inst, s), inst) == s.alpha);
}
