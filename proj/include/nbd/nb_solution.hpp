#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nbd/dynamics.hpp"
#include "nbd/instance.hpp"
#include "nbd/matching.hpp"

namespace nbd {

// A matching with a node allocation. The flags record the outcome of the
// last certification (see certify()).
struct NBSolution {
  std::vector<EdgeId> matching;  // sorted edge ids
  std::vector<double> gamma;
  bool stable = false;
  bool balanced = false;
};

enum class StabilityIssue {
  blocking_edge,       // (i,j) not matched with gamma_i + gamma_j < w_ij
  negative_share,      // gamma_i < 0
  split_mismatch,      // matched (i,j) with gamma_i + gamma_j != w_ij
  unmatched_earning,   // unmatched i with gamma_i > 0
  overlapping_matching // two matched edges share a node
};
std::string to_string(StabilityIssue issue);

struct StabilityViolation {
  StabilityIssue issue;
  EdgeId edge = 0;   // meaningful for edge issues
  NodeId node = -1;  // meaningful for node issues
  double amount = 0.0;
};

std::vector<StabilityViolation> check_stability(const NBSolution& sol, const Instance& instance, double tol = 1e-6);

// Surplus of each endpoint of an edge over its best alternative elsewhere,
// with alternatives (w_ik - gamma_k)_+.
struct BalanceResidual {
  EdgeId edge = 0;
  double lhs = 0.0;  // gamma_u - best alternative of u excluding v
  double rhs = 0.0;  // gamma_v - best alternative of v excluding u
  double residual = 0.0;
  bool sides_nonnegative = true;
};

// Residuals on the matched edges of sol.
std::vector<BalanceResidual> check_balance(const NBSolution& sol, const Instance& instance, double tol = 1e-6);
BalanceResidual balance_at(EdgeId e, std::span<const double> gamma, const Instance& instance, double tol = 1e-6);

// Recomputes the stable/balanced flags.
NBSolution certify(NBSolution sol, const Instance& instance, double tol = 1e-6);

enum class EdgeLabel { strong_dotted, weak_dotted, non_dotted };
std::string to_string(EdgeLabel label);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::vector<EdgeId> edges;  // witnesses
  std::vector<NodeId> nodes;
  std::string detail;
};

struct FixedPointReport {
  std::vector<EdgeLabel> labels;
  std::vector<PropertyCheck> checks;
  std::vector<std::string> notes;
  double residual = 0.0;  // fixed-point residual of the input state
  double tol = 0.0;

  bool all_passed() const;
  const PropertyCheck& check(std::string_view name) const;
  std::vector<EdgeId> with_label(EdgeLabel label) const;
};

// Names of the checks, in report order.
inline constexpr std::string_view kPartnerEquivalence = "partner_equivalence";
inline constexpr std::string_view kUniquePartner = "unique_partner";
inline constexpr std::string_view kUndottedZero = "undotted_zero_earning";
inline constexpr std::string_view kOfferFormula = "offer_formula";
inline constexpr std::string_view kEdgeBalance = "edge_balance";
inline constexpr std::string_view kSolidDotted = "solid_dotted";
inline constexpr std::string_view kDualOptimal = "dual_optimal";

struct SuiteOptions {
  double tol = 1e-6;
  double fixed_point_tol = 1e-8;
  // When false, a state that is not a fixed point is evaluated anyway so
  // individual property failures can be inspected.
  bool require_fixed_point = true;
};

// Evaluates the fixed-point properties. Throws on a degenerate LP, and on a
// state that is not a fixed point unless require_fixed_point is false.
FixedPointReport fp_property_suite(const MessageState& state, const Instance& instance,
                                   const LPClassification& classification, const SuiteOptions& options = {});

EdgeLabel dotted_label(double w, double a_ij, double a_ji, double tol);

// Fixed point built from a stable, balanced solution: offers (w_ij - gamma_i)_+
// and alpha_{i->j} = max over the other neighbours' offers into i.
MessageState fp_from_nb(const NBSolution& sol, const Instance& instance);

// Reads a solution off a (numerical) fixed point: strong-dotted edges as the
// matching, earnings as the allocation, flags certified at tol.
NBSolution solution_from_state(const MessageState& state, const Instance& instance, double tol = 1e-6);

struct OracleOptions {
  int size_cap = 10;
  int seeds = 8;                 // starting allocations per matching
  int max_sweeps = 100'000;
  double damping = 0.5;
  double sweep_tol = 1e-13;
  double certify_tol = 1e-6;
  double distinct_tol = 1e-4;    // sup-norm distance separating solutions
  std::uint64_t seed = 1;
};

struct OracleResult {
  std::vector<NBSolution> solutions;  // distinct, ordered by matching then gamma
  bool family = false;                // some matching admits a segment of solutions
  std::vector<std::vector<EdgeId>> nonconverged;  // matchings whose solve hit the sweep cap
};

std::vector<std::vector<EdgeId>> maximal_matchings(const Instance& instance);

// Independent brute-force search: every maximal matching, damped balance
// solve from several starting splits, filtered by stability and balance.
OracleResult nb_oracle(const Instance& instance, const OracleOptions& options = {});

}  // namespace nbd
