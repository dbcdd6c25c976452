#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nbd/dynamics.hpp"
#include "nbd/instance.hpp"
#include "nbd/nb_solution.hpp"

namespace nbd {

// Buyers are the side holding the lowest-numbered node of each connected
// component.
struct Bipartition {
  std::vector<NodeId> buyers;
  std::vector<NodeId> sellers;
  std::vector<bool> is_buyer;  // indexed by node
};

struct BipartiteCheck {
  std::optional<Bipartition> partition;
  std::vector<NodeId> odd_cycle;  // witness when not bipartite
};

BipartiteCheck check_bipartite(const Instance& instance);

enum class Side { buyer, seller };

// True iff alpha dominates beta: buyer->seller messages of alpha are >= and
// seller->buyer messages are <=, up to `slack`.
bool order_leq(const Messages& beta, const Messages& alpha, const Instance& instance, const Bipartition& part,
               double slack = 0.0);

// alpha^top (buyer side) or alpha^bot (seller side).
Messages extremal_init(const Instance& instance, const Bipartition& part, Side side);

struct ExtremalResult {
  Side side;
  NBSolution solution;
  MessageState state;
  std::int64_t iterations = 0;
  bool converged = false;
  // Step at which the monotone self-check first failed, if it did.
  std::optional<std::int64_t> monotonicity_violation;
};

// Runs the dynamics from the extremal initial condition. config.init is
// ignored. Throws if the run does not converge within config.max_iters.
ExtremalResult run_extremal(const Instance& instance, const Bipartition& part, Side side, DynamicsConfig config);

std::string to_string(Side side);

}  // namespace nbd
