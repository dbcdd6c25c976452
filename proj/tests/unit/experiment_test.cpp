#include "doctest.h"
#include "experiment.hpp"
#include "fixtures.hpp"

using namespace nbd;
using doctest::Approx;

TEST_CASE("preparation accepts E2 and rejects the triangle") {
  auto e2 = prepare_instance(fixtures::e2(), {.min_gap = 0.0});
  REQUIRE(e2.prepared);
  CHECK(e2.prepared->oracle_checked);
  CHECK(e2.prepared->gap == Approx(0.5));
  auto t1 = prepare_instance(fixtures::t1());
  CHECK_FALSE(t1.prepared);
  CHECK_FALSE(t1.rejection.empty());
  CHECK_FALSE(prepare_instance(fixtures::e4(), {.min_gap = 0.1}).prepared);
}

TEST_CASE("certificate route above the enumeration cap") {
  GeneratorSpec g;
  g.topology = Topology::path;
  g.size = 16;
  g.weights = UniformWeights{1, 10};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    g.seed = seed;
    auto out = prepare_instance(generate(g), {.min_gap = 0.01});
    if (!out.prepared) continue;
    CHECK(out.prepared->classification.epsilon_is_lower_bound);
    CHECK_FALSE(out.prepared->oracle_checked);
    return;
  }
  FAIL("no admissible 16-node path in 50 seeds");
}

TEST_CASE("iterations grow as the accuracy tightens") {
  Instance inst = fixtures::e2();
  std::vector<double> ref{0.5, 1.5, 0.0};
  std::int64_t last = 0;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    auto it = iterations_to_eps(inst, ref, eps, 0.5, 100'000);
    REQUIRE(it);
    CHECK(*it >= last);
    last = *it;
  }
}

TEST_CASE("sized specs") {
  GeneratorSpec g;
  g.topology = Topology::blossom;
  g.cycle = 5;
  CHECK(sized_spec(g, 9).stem == 4);
  g.topology = Topology::bicycle;
  g.cycle = 3;
  g.cycle2 = 5;
  CHECK(generate(sized_spec(g, 12)).node_count() == 12);
  g.topology = Topology::path;
  CHECK(sized_spec(g, 7).size == 7);
}

TEST_CASE("log-log fit") {
  std::vector<ExperimentRow> rows;
  for (int n : {2, 4, 8, 16}) {
    ExperimentRow r;
    r.n = n;
    r.iterations = 3 * n * n;
    rows.push_back(r);
  }
  rows.push_back(ExperimentRow{});  // unconverged rows are ignored
  auto fit = fit_loglog(rows);
  CHECK(fit.points == 4);
  CHECK(fit.slope == Approx(2.0));
}

TEST_CASE("path sweep converges and is reproducible") {
  ExperimentSpec spec;
  spec.family.topology = Topology::path;
  spec.family.weights = UniformWeights{1, 10};
  spec.sizes = {5, 10, 20};
  auto a = run_experiment(spec);
  REQUIRE(a.rows.size() == 3);
  for (const auto& r : a.rows) {
    CHECK(r.iterations);
    CHECK(r.sigma >= 0.05);
  }
  CHECK(a.csv().rfind("n,W,sigma,eps,iterations_to_eps,t_star_reference,seed,regenerated,converged\n", 0) == 0);
  CHECK(run_experiment(spec).csv() == a.csv());
  spec.sizes = {10, 5};
  CHECK_THROWS_AS(run_experiment(spec), Error);
}
