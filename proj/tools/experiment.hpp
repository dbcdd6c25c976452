#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbd/dynamics.hpp"
#include "nbd/instance.hpp"
#include "nbd/kt_structure.hpp"
#include "nbd/matching.hpp"
#include "nbd/nb_solution.hpp"

namespace nbd {

// An instance together with its certified reference solution.
struct PreparedInstance {
  Instance instance{1, {}};
  LPClassification classification;
  NBSolution solution;
  MessageState fixed_point;  // exact, built from the solution
  KTDecomposition decomposition;
  double gap = 0.0;
  bool oracle_checked = false;  // reference confirmed by the brute-force oracle
};

struct PrepareOptions {
  double kappa = 0.5;
  double min_gap = 0.05;
  double eps_conv = 1e-13;
  std::int64_t max_iters = 2'000'000;
  int enumeration_cap = 12;
  int oracle_cap = 10;
};

// Runs the dynamics to a tight tolerance and certifies the limit: stable and
// balanced, the unique integral LP optimum (by enumeration or by the
// complementary-slackness certificate), a gap of at least min_gap, and
// agreement with the oracle on small instances. Returns the reason on failure.
struct PrepareOutcome {
  std::optional<PreparedInstance> prepared;
  std::string rejection;
};
PrepareOutcome prepare_instance(const Instance& instance, const PrepareOptions& options = {});

// First t with |gamma^t - reference|_inf <= eps, starting from zero messages.
std::optional<std::int64_t> iterations_to_eps(const Instance& instance, std::span<const double> reference,
                                              double eps, double kappa, std::int64_t max_iters);

struct ExperimentSpec {
  GeneratorSpec family;              // template; the swept size is applied per topology
  std::vector<int> sizes;            // node counts, strictly increasing
  int repetitions = 1;
  double eps = 1e-4;
  double kappa = 0.5;
  double c_ref = 1.0;
  double min_gap = 0.05;
  std::int64_t max_iters = 1'000'000;
  int max_regenerations = 200;
};

struct ExperimentRow {
  int n = 0;
  double W = 0.0;
  double sigma = 0.0;
  double eps = 0.0;
  std::optional<std::int64_t> iterations;
  double t_star_reference = 0.0;
  std::uint64_t seed = 0;
  int regenerated = 0;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  LogLogFit fit;  // log(iterations) against log(n), converged rows only
  std::string csv() const;
};

// Applies the swept node count to a generator template.
GeneratorSpec sized_spec(GeneratorSpec spec, int n);

ExperimentResult run_experiment(const ExperimentSpec& spec);
LogLogFit fit_loglog(const std::vector<ExperimentRow>& rows);

}  // namespace nbd
