#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nbd/error.hpp"

namespace nbd {

using NodeId = int;
using EdgeId = std::size_t;
// Directed edge 2e is u->v of edge e, 2e+1 is v->u.
using DirectedId = std::size_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;
};

struct Incidence {
  NodeId neighbor;
  EdgeId edge;
  DirectedId out;  // this node -> neighbor
  DirectedId in;   // neighbor -> this node
};

// A weighted exchange network: undirected simple graph with positive weights.
// Immutable once constructed.
class Instance {
 public:
  Instance(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t directed_count() const { return 2 * edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Incidence> neighbors(NodeId i) const { return adjacency_.at(i); }
  int degree(NodeId i) const { return static_cast<int>(adjacency_.at(i).size()); }

  NodeId from(DirectedId d) const { return d % 2 == 0 ? edges_[d / 2].u : edges_[d / 2].v; }
  NodeId to(DirectedId d) const { return d % 2 == 0 ? edges_[d / 2].v : edges_[d / 2].u; }
  double weight(DirectedId d) const { return edges_[d / 2].w; }
  static EdgeId edge_of(DirectedId d) { return d / 2; }
  static DirectedId reverse(DirectedId d) { return d ^ 1U; }

  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;
  // Throws Error when (from, to) is not an edge.
  DirectedId directed(NodeId from, NodeId to) const;

  // W, the largest edge weight (0 for an edgeless instance).
  double max_weight() const { return max_weight_; }

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  double max_weight_ = 0.0;
};

double max_weight(const Instance& instance);

// --- serialization -------------------------------------------------------

Instance load(const std::string& text);
Instance load_file(const std::string& path);  // "-" reads standard input
// `extra_fields` is spliced in verbatim as further members of the object.
std::string save(const Instance& instance, const std::string& extra_fields = "");

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

// --- generators ----------------------------------------------------------

enum class Topology { path, even_cycle, odd_cycle, blossom, bicycle, bipartite_random, erdos_renyi };

Topology parse_topology(const std::string& name);
std::string to_string(Topology t);

struct ExplicitWeights {
  std::vector<double> values;  // one per generated edge, in generation order
};

// Base weights cycled over the edges plus uniform jitter in [-jitter, jitter].
// A missing jitter means 0.05 * min(base).
struct JitteredWeights {
  std::vector<double> base = {1.0};
  std::optional<double> jitter;
};

// Independent uniform weights in [lo, hi].
struct UniformWeights {
  double lo = 1.0;
  double hi = 10.0;
};

using WeightScheme = std::variant<ExplicitWeights, JitteredWeights, UniformWeights>;

struct GeneratorSpec {
  Topology topology = Topology::path;
  // path: nodes; even_cycle / odd_cycle: nodes; erdos_renyi: nodes.
  int size = 2;
  // blossom: stem edges; bicycle: edges on the connecting path.
  int stem = 1;
  // blossom: cycle length; bicycle: first cycle length.
  int cycle = 3;
  // bicycle: second cycle length.
  int cycle2 = 3;
  // bipartite_random: side sizes.
  int buyers = 2;
  int sellers = 2;
  // bipartite_random / erdos_renyi edge probability.
  double edge_probability = 0.5;
  WeightScheme weights = JitteredWeights{};
  std::uint64_t seed = 0;
};

Instance generate(const GeneratorSpec& spec);

// Number of independent cycles, |E| - |V| + (#components).
int cyclomatic_number(const Instance& instance);

// Seeded generator used across the library. The engine is fully specified by
// the standard and the conversions below avoid the implementation-defined
// distributions, so a seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nbd
