#pragma once

#include "json.hpp"
#include "nbd/dynamics.hpp"
#include "nbd/kt_structure.hpp"
#include "nbd/matching.hpp"
#include "nbd/nb_solution.hpp"

namespace nbd {

using Json = nlohmann::ordered_json;

// Edges are reported as [u, v] pairs so reports do not depend on edge ids.
Json edge_json(const Instance& instance, EdgeId e);
Json edges_json(const Instance& instance, std::span<const EdgeId> edges);

Json to_json(const LPClassification& c, const Instance& instance);
Json to_json(const DualReport& r, const Instance& instance);
Json to_json(const NBSolution& sol, const Instance& instance);
Json to_json(const FixedPointReport& r, const Instance& instance);
Json to_json(const KTDecomposition& d, const Instance& instance);
Json to_json(const IdentityReport& r, const Instance& instance);
Json to_json(const Pairing& p, const Instance& instance);

}  // namespace nbd
