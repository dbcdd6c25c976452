#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nbd/dynamics.hpp"
#include "nbd/instance.hpp"
#include "nbd/nb_solution.hpp"

namespace nbd {

enum class StructureShape { path, blossom, bicycle, cycle };
std::string to_string(StructureShape shape);

struct KTStructure {
  std::vector<NodeId> nodes;               // matched nodes of the structure
  std::vector<EdgeId> matched_edges;       // E1
  std::vector<EdgeId> alternative_edges;   // E2: edges carrying a second-best positive offer
  std::vector<NodeId> extended_nodes;      // every endpoint of E1 and E2
  StructureShape shape = StructureShape::path;
  double sigma = 0.0;
  int level = 0;                           // index into KTDecomposition::levels
};

struct KTDecomposition {
  std::vector<NodeId> unmatched;        // C_0
  std::vector<KTStructure> structures;  // ordered by sigma, then smallest node
  std::vector<double> levels;           // distinct slack values, ascending
  std::vector<double> node_slack;       // per node; 0 for unmatched nodes
  std::vector<int> structure_of;        // per node; -1 for unmatched nodes
  std::optional<double> gap;            // absent when a cycle structure is present
};

struct KTOptions {
  double tol_cluster = 1e-6;
  double tol = 1e-6;
};

// Recovers the structures from a certified fixed point and its solution.
// Structures sharing a slack value form one level and contribute no zero
// difference to the gap. Throws on uncertified input, an ambiguous slack
// clustering, or an unrecognized component shape.
KTDecomposition decompose(const MessageState& fp, const NBSolution& sol, const Instance& instance,
                          const KTOptions& options = {});

// Minimum of the smallest slack level, the differences between consecutive
// levels, and the surplus minus sigma of every non-structure edge joining two
// extended nodes of one structure. Empty when a cycle structure is present.
std::optional<double> compute_gap(const KTDecomposition& decomp, const NBSolution& sol, const Instance& instance);

enum class IdentityKind { matched, alternative, cross };
std::string to_string(IdentityKind kind);

struct IdentityRow {
  EdgeId edge = 0;
  IdentityKind kind = IdentityKind::cross;
  double message_surplus = 0.0;  // alpha_ij + alpha_ji - w_ij
  double earning_surplus = 0.0;  // gamma_i + gamma_j - w_ij
  double expected = 0.0;         // exact value, or lower bound for cross edges
  bool passed = true;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  bool passed = true;
};

IdentityReport check_fp_identities(const KTDecomposition& decomp, const MessageState& fp, const Instance& instance,
                                   double tol = 1e-6);

}  // namespace nbd
