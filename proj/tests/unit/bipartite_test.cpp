#include "doctest.h"
#include "fixtures.hpp"
#include "nbd/bipartite.hpp"

using namespace nbd;
using doctest::Approx;

TEST_CASE("bipartition") {
  auto e2 = check_bipartite(fixtures::e2());
  REQUIRE(e2.partition);
  CHECK(e2.partition->buyers == std::vector<NodeId>{0, 2});
  CHECK(e2.partition->sellers == std::vector<NodeId>{1});

  auto t1 = check_bipartite(fixtures::t1());
  CHECK_FALSE(t1.partition);
  CHECK(t1.odd_cycle == std::vector<NodeId>{0, 1, 2});

  auto b1 = check_bipartite(fixtures::b1());
  REQUIRE(b1.partition);
  CHECK(b1.partition->buyers == std::vector<NodeId>{0, 2});
  CHECK(b1.partition->sellers == std::vector<NodeId>{1, 3});
}

TEST_CASE("partial order") {
  Instance inst = fixtures::e2();
  auto part = *check_bipartite(inst).partition;
  Messages a = fixtures::e2_alpha();
  CHECK(order_leq(a, a, inst, part));
  Messages alpha = a, beta = a;
  alpha[0] = 0.5;
  beta[0] = 0.4;
  CHECK(order_leq(beta, alpha, inst, part));
  CHECK_FALSE(order_leq(alpha, beta, inst, part));

  Messages top = extremal_init(inst, part, Side::buyer);
  Messages bot = extremal_init(inst, part, Side::seller);
  for (std::uint64_t s = 0; s < 20; ++s) {
    Messages x = initial_messages(inst, InitUniform{s});
    CHECK(order_leq(x, top, inst, part));
    CHECK(order_leq(bot, x, inst, part));
  }
}

TEST_CASE("extremal initial conditions") {
  Instance e2 = fixtures::e2();
  auto part = *check_bipartite(e2).partition;
  CHECK(extremal_init(e2, part, Side::buyer) == Messages{2, 0, 0, 2});

  Instance one = fixtures::single_edge();
  CHECK(extremal_init(one, *check_bipartite(one).partition, Side::seller) == Messages{0, 1});

  Instance b1 = fixtures::b1();
  auto bp = *check_bipartite(b1).partition;
  Messages top = extremal_init(b1, bp, Side::buyer);
  for (DirectedId d = 0; d < b1.directed_count(); ++d) CHECK(top[d] == (bp.is_buyer[b1.from(d)] ? 10.0 : 0.0));
}

TEST_CASE("extremal runs on B1") {
  Instance b1 = fixtures::b1();
  auto part = *check_bipartite(b1).partition;
  DynamicsConfig cfg;
  cfg.eps_conv = 1e-12;
  auto top = run_extremal(b1, part, Side::buyer, cfg);
  auto bot = run_extremal(b1, part, Side::seller, cfg);
  CHECK(fixtures::max_abs_diff(top.solution.gamma, std::vector<double>{9, 1, 9, 1}) < 1e-4);
  CHECK(fixtures::max_abs_diff(bot.solution.gamma, std::vector<double>{1, 9, 1, 9}) < 1e-4);
  CHECK_FALSE(top.monotonicity_violation);
  CHECK_FALSE(bot.monotonicity_violation);
  CHECK(order_leq(bot.state.alpha, top.state.alpha, b1, part, 1e-9));
}

TEST_CASE("extremal runs coincide on E2") {
  Instance e2 = fixtures::e2();
  auto part = *check_bipartite(e2).partition;
  for (Side side : {Side::buyer, Side::seller}) {
    auto r = run_extremal(e2, part, side, {});
    CHECK(fixtures::max_abs_diff(r.solution.gamma, std::vector<double>{0.5, 1.5, 0.0}) < 1e-6);
  }
}

TEST_CASE("order preservation on random ordered pairs") {
  Instance b1 = fixtures::b1();
  auto part = *check_bipartite(b1).partition;
  Rng rng(4);
  for (int pair = 0; pair < 20; ++pair) {
    Messages lo = initial_messages(b1, InitUniform{rng.next()});
    Messages hi = lo;
    for (DirectedId d = 0; d < hi.size(); ++d) {
      double w = b1.max_weight();
      hi[d] = part.is_buyer[b1.from(d)] ? rng.uniform(hi[d], w) : rng.uniform(0.0, hi[d]);
    }
    MessageState a = derive(hi, b1), b = derive(lo, b1);
    for (int t = 0; t < 200; ++t) {
      a = step(a, b1, 0.5);
      b = step(b, b1, 0.5);
      REQUIRE(order_leq(b.alpha, a.alpha, b1, part, 1e-12));
    }
  }
}
