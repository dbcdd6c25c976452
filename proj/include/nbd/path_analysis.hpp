#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbd/dynamics.hpp"
#include "nbd/instance.hpp"
#include "nbd/kt_structure.hpp"

namespace nbd {

// A path 0..l with edge k joining k and k+1. Directed messages are indexed
// 2k for k->k+1 and 2k+1 for k+1->k.
struct PathSpec {
  std::vector<double> weights;
  std::vector<bool> matched;  // per edge; no two consecutive edges matched

  std::size_t length() const { return weights.size(); }
  std::size_t directed_count() const { return 2 * weights.size(); }
};

void validate(const PathSpec& path);
// Path whose matched edges alternate, starting with edge 0 when first_matched.
PathSpec alternating_path(std::vector<double> weights, bool first_matched = true);

inline std::size_t forward(std::size_t k) { return 2 * k; }
inline std::size_t backward(std::size_t k) { return 2 * k + 1; }

struct Boundary {
  double left = 0.0;   // input for the message 0 -> 1
  double right = 0.0;  // input for the message l -> l-1
};

struct SimplifiedPathState {
  std::vector<double> alpha_hat;
  std::int64_t time = 0;
};

// Unclamped offers: half surplus on matched edges, w - alpha_hat otherwise.
std::vector<double> simplified_offers(const PathSpec& path, std::span<const double> alpha_hat);

SimplifiedPathState simplified_step(const SimplifiedPathState& state, const PathSpec& path, double kappa,
                                    const Boundary& boundary);

// Exact fixed point for constant boundaries, from the linear system.
std::vector<double> simplified_fixed_point(const PathSpec& path, const Boundary& boundary);

struct SimplifiedRun {
  SimplifiedPathState state;
  std::vector<double> fixed_point;
  std::vector<double> error;  // |alpha_hat^t - fixed point|_inf for t = 0, 1, ...
  bool converged = false;     // error reached the tolerance within the horizon
  double decay_slope = 0.0;   // least-squares slope of log(error) against t
};

SimplifiedRun run_simplified(const PathSpec& path, double kappa, const Boundary& boundary,
                             std::vector<double> initial, std::int64_t horizon, double tol = 1e-12);

// CSV with columns t,value.
std::string series_csv(std::span<const double> values);

// alpha dominates beta on a path: for even i, alpha_{i->i+1} >= beta and
// alpha_{i+1->i} <= beta; reversed for odd i.
bool path_dominates(std::span<const double> alpha, std::span<const double> beta, double slack = 0.0);

struct BoundingConfig {
  int sign = +1;
  double Delta = 0.0;
  double delta = 0.0;
  std::vector<double> reference;  // fixed point restricted to the path
};

void validate(const BoundingConfig& config, const PathSpec& path);
std::vector<double> bounding_initial(const BoundingConfig& config);
Boundary bounding_boundary(const BoundingConfig& config, const PathSpec& path);
// reference shifted by sign * (-1)^i * (Delta - delta) in the checkerboard pattern.
std::vector<double> bounding_closed_form(const BoundingConfig& config);

// Matched edges must keep A_ij + A_ji - w <= 0 and the others >= 0.
std::optional<std::size_t> sign_violation(const PathSpec& path, std::span<const double> messages, double slack = 1e-12);

struct BoundingResult {
  std::vector<std::vector<double>> states;  // A^0 .. A^horizon
  bool signs_held = true;
  std::optional<std::int64_t> first_violation;
  std::vector<double> closed_form;
  double closed_form_residual = 0.0;  // |A^horizon - closed form|_inf
};

BoundingResult bounding_process(const PathSpec& path, const BoundingConfig& config, double kappa,
                                std::int64_t horizon);

// A path structure laid out as a path: nodes in order, one edge per step.
struct StructurePath {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  std::vector<DirectedId> directed;  // instance ids in path order (forward, backward per edge)
  PathSpec spec;
};

// Orients structure q from its endpoint with the smaller id. Throws when the
// structure is not a simple path in the instance.
StructurePath structure_path(const KTDecomposition& decomp, std::size_t q, const Instance& instance);
std::vector<double> restrict_to_path(std::span<const double> alpha, const StructurePath& path);

struct SandwichConfig {
  double Delta = 0.4;
  double delta = 0.2;
  std::int64_t horizon = 10'000;
  double kappa = 0.5;
  double slack = 1e-12;
  // Starting messages; by default the fixed point plus a checkerboard of
  // magnitude Delta, or Delta - delta on messages sent from earlier
  // structures and unmatched nodes, clamped to [0, W].
  std::optional<Messages> initial;
};

struct SandwichResult {
  bool held = true;
  std::optional<std::int64_t> first_violation;
  bool signs_held = true;  // sign conditions of both bounding processes
  std::int64_t steps = 0;
};

Messages sandwich_initial(const Instance& instance, const KTDecomposition& decomp, const MessageState& fp,
                          std::size_t q, double Delta, double delta);

// Runs the natural dynamics and both bounding processes in lockstep and
// checks A(-) <= alpha restricted to the path <= A(+) at every step.
SandwichResult sandwich_test(const Instance& instance, const KTDecomposition& decomp, const MessageState& fp,
                             std::size_t q, const SandwichConfig& config);

enum class Injection { none, left, right, both };
Injection parse_injection(const std::string& name);

struct MassState {
  std::vector<double> rho;
  std::int64_t time = 0;
};

MassState mass_step(const MassState& mass, const PathSpec& path, double kappa, Injection injection);

struct DominationResult {
  bool held = true;
  std::optional<std::int64_t> first_violation;
  // max |difference| / rho per step over coordinates whose difference exceeds slack
  std::vector<double> worst_ratio;
};

// Evolves two simplified runs with equal boundaries whose initial states
// differ by `difference`, alongside the mass process started at its sup norm.
DominationResult domination_test(const PathSpec& path, double kappa, const Boundary& boundary,
                                 std::span<const double> difference, std::int64_t horizon,
                                 std::span<const double> base = {}, double slack = 1e-12);

}  // namespace nbd
