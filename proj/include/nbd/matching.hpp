#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbd/instance.hpp"

namespace nbd {

// Corner of the fractional matching polytope: every edge carries 0, 1/2 or 1.
struct HalfIntegralSolution {
  std::vector<std::uint8_t> twice;  // 2 * x_e per edge
  double weight = 0.0;

  double value(EdgeId e) const { return 0.5 * twice[e]; }
  bool integral() const;
  std::vector<EdgeId> support() const;  // edges with x_e > 0
};

enum class LPKind { tight, pointed_not_tight, degenerate };
std::string to_string(LPKind kind);

struct LPClassification {
  LPKind kind = LPKind::degenerate;
  double epsilon = 0.0;  // best minus second-best corner weight
  // Set when epsilon is only a certified lower bound (no enumeration).
  bool epsilon_is_lower_bound = false;
  HalfIntegralSolution optimum;
  std::size_t corner_count = 0;
};

struct MatchingOptions {
  int size_cap = 12;
  double tol = 1e-9;
};

// Calls `visit` once for every half-integral corner: a matching plus
// vertex-disjoint odd cycles at 1/2. Throws CapExceeded above the size cap.
void for_each_corner(const Instance& instance, const std::function<void(const HalfIntegralSolution&)>& visit,
                     int size_cap = 12);
std::vector<HalfIntegralSolution> enumerate_corners(const Instance& instance, int size_cap = 12);

LPClassification classify(const Instance& instance, const MatchingOptions& options = {});

// Certificate route for instances above the enumeration cap. If `matching`
// and `gamma` satisfy complementary slackness and every non-matching edge has
// slack above tol, the matching is the unique LP optimum and integral; the
// returned epsilon is a lower bound on the margin to any other corner.
std::optional<LPClassification> certify_tight(const Instance& instance, std::span<const double> gamma,
                                              std::span<const EdgeId> matching, double tol = 1e-9);

struct DualViolation {
  std::optional<EdgeId> edge;  // edge constraint, or
  NodeId node = -1;            // non-negativity of a node
  double amount = 0.0;         // how far below the bound
};

struct DualReport {
  bool feasible = false;
  std::vector<DualViolation> violations;
  double objective = 0.0;
  std::optional<double> primal;
  bool optimal = false;
};

DualReport dual_check(std::span<const double> gamma, const Instance& instance, std::optional<double> primal_optimum,
                      double tol = 1e-9);
// Computes the primal optimum by enumeration (subject to the size cap).
DualReport dual_check(std::span<const double> gamma, const Instance& instance, double tol = 1e-9);

enum class Solid { one_solid, half_solid, non_solid };
std::string to_string(Solid s);

std::vector<Solid> solid_labels(const LPClassification& classification);

}  // namespace nbd
