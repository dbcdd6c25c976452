#include "nbd/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nbd {

using json = nlohmann::json;

Instance::Instance(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ <= 0) throw Error("node count must be positive");
  std::set<std::pair<NodeId, NodeId>> seen;
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= node_count_ || e.v < 0 || e.v >= node_count_) {
      throw Error("dangling node id in edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    if (e.u == e.v) throw Error("self-loop at node " + std::to_string(e.u));
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw Error("non-positive weight on edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.emplace(e.u, e.v).second) {
      throw Error("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    max_weight_ = std::max(max_weight_, e.w);
  }
  adjacency_.resize(node_count_);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    adjacency_[ed.u].push_back({ed.v, e, 2 * e, 2 * e + 1});
    adjacency_[ed.v].push_back({ed.u, e, 2 * e + 1, 2 * e});
  }
}

std::optional<EdgeId> Instance::find_edge(NodeId a, NodeId b) const {
  if (a < 0 || a >= node_count_) return std::nullopt;
  for (const auto& inc : adjacency_[a]) {
    if (inc.neighbor == b) return inc.edge;
  }
  return std::nullopt;
}

DirectedId Instance::directed(NodeId from, NodeId to) const {
  auto e = find_edge(from, to);
  if (!e) throw Error("no edge (" + std::to_string(from) + "," + std::to_string(to) + ")");
  return edges_[*e].u == from ? 2 * *e : 2 * *e + 1;
}

double max_weight(const Instance& instance) { return instance.max_weight(); }

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) throw Error("parse error: bad number '" + text + "'");
  return value;
}

namespace {

NodeId node_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw Error(std::string("parse error: edge field '") + key + "' must be an integer");
  }
  auto v = obj[key].get<long long>();
  if (v < 0 || v > std::numeric_limits<int>::max()) {
    throw Error("dangling node id " + std::to_string(v));
  }
  return static_cast<NodeId>(v);
}

}  // namespace

Instance load(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw Error("parse error: instance document must be an object");
  if (!doc.contains("nodes") || !doc["nodes"].is_number_integer()) {
    throw Error("parse error: 'nodes' must be an integer");
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw Error("parse error: 'edges' must be an array");
  }
  auto n = doc["nodes"].get<long long>();
  if (n <= 0 || n > std::numeric_limits<int>::max()) throw Error("parse error: 'nodes' must be positive");
  std::vector<Edge> edges;
  for (const auto& item : doc["edges"]) {
    if (!item.is_object()) throw Error("parse error: edge entries must be objects");
    Edge e;
    e.u = node_field(item, "u");
    e.v = node_field(item, "v");
    if (!item.contains("w")) throw Error("parse error: edge without weight");
    const auto& w = item["w"];
    if (w.is_string()) {
      e.w = parse_double(w.get<std::string>());
    } else if (w.is_number()) {
      e.w = w.get<double>();
    } else {
      throw Error("parse error: weight must be a number or decimal string");
    }
    edges.push_back(e);
  }
  return Instance(static_cast<int>(n), std::move(edges));
}

Instance load_file(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    buf << in.rdbuf();
  }
  return load(buf.str());
}

std::string save(const Instance& instance, const std::string& extra_fields) {
  // Hand-written so the layout stays one edge per line and weights keep the
  // shortest round-trip decimal form.
  std::ostringstream out;
  out << "{\n  \"nodes\": " << instance.node_count() << ",\n  \"edges\": [";
  bool first = true;
  for (const auto& e : instance.edges()) {
    out << (first ? "\n" : ",\n") << "    {\"u\": " << e.u << ", \"v\": " << e.v << ", \"w\": \""
        << format_double(e.w) << "\"}";
    first = false;
  }
  out << (first ? "]" : "\n  ]");
  if (!extra_fields.empty()) out << ",\n" << extra_fields;
  out << "\n}\n";
  return out.str();
}

// --- generators ----------------------------------------------------------

Topology parse_topology(const std::string& name) {
  if (name == "path") return Topology::path;
  if (name == "even_cycle") return Topology::even_cycle;
  if (name == "odd_cycle") return Topology::odd_cycle;
  if (name == "blossom") return Topology::blossom;
  if (name == "bicycle") return Topology::bicycle;
  if (name == "bipartite_random") return Topology::bipartite_random;
  if (name == "erdos_renyi") return Topology::erdos_renyi;
  throw Error("unknown topology '" + name + "'");
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::path: return "path";
    case Topology::even_cycle: return "even_cycle";
    case Topology::odd_cycle: return "odd_cycle";
    case Topology::blossom: return "blossom";
    case Topology::bicycle: return "bicycle";
    case Topology::bipartite_random: return "bipartite_random";
    case Topology::erdos_renyi: return "erdos_renyi";
  }
  return "?";
}

namespace {

using Pairs = std::vector<std::pair<NodeId, NodeId>>;

void add_cycle(Pairs& out, NodeId first, int length) {
  for (int i = 0; i < length; ++i) out.emplace_back(first + i, first + (i + 1) % length);
}

// Path hanging off `anchor` through `edges` new nodes starting at `next`.
NodeId add_stem(Pairs& out, NodeId anchor, NodeId next, int edges) {
  NodeId prev = anchor;
  for (int i = 0; i < edges; ++i) {
    out.emplace_back(prev, next);
    prev = next++;
  }
  return next;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error("invalid topology parameters: " + msg);
}

std::vector<double> assign_weights(const WeightScheme& scheme, std::size_t count, Rng& rng) {
  std::vector<double> w(count);
  if (const auto* ex = std::get_if<ExplicitWeights>(&scheme)) {
    if (ex->values.size() != count) {
      throw Error("explicit weight list has " + std::to_string(ex->values.size()) + " entries, topology has " +
                  std::to_string(count) + " edges");
    }
    w = ex->values;
  } else if (const auto* jit = std::get_if<JitteredWeights>(&scheme)) {
    require(!jit->base.empty(), "empty base weight list");
    double min_base = *std::min_element(jit->base.begin(), jit->base.end());
    require(min_base > 0.0, "base weights must be positive");
    double p = jit->jitter.value_or(0.05 * min_base);
    require(p >= 0.0 && p < min_base, "jitter must lie in [0, min base weight)");
    for (std::size_t e = 0; e < count; ++e) w[e] = jit->base[e % jit->base.size()] + rng.uniform(-p, p);
  } else {
    const auto& uni = std::get<UniformWeights>(scheme);
    require(uni.lo > 0.0 && uni.hi >= uni.lo, "uniform weights need 0 < lo <= hi");
    for (auto& x : w) x = rng.uniform(uni.lo, uni.hi);
  }
  return w;
}

}  // namespace

Instance generate(const GeneratorSpec& spec) {
  Rng rng(spec.seed);
  Pairs pairs;
  int n = 0;
  switch (spec.topology) {
    case Topology::path:
      require(spec.size >= 2, "path needs at least 2 nodes");
      n = spec.size;
      for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
      break;
    case Topology::even_cycle:
      require(spec.size >= 4 && spec.size % 2 == 0, "even cycle length must be even and >= 4");
      n = spec.size;
      add_cycle(pairs, 0, n);
      break;
    case Topology::odd_cycle:
      require(spec.size >= 3 && spec.size % 2 == 1, "odd cycle length must be odd and >= 3");
      n = spec.size;
      add_cycle(pairs, 0, n);
      break;
    case Topology::blossom:
      require(spec.cycle >= 3 && spec.cycle % 2 == 1, "blossom cycle length must be odd and >= 3");
      require(spec.stem >= 0, "stem length must be non-negative");
      add_cycle(pairs, 0, spec.cycle);
      n = add_stem(pairs, 0, spec.cycle, spec.stem);
      break;
    case Topology::bicycle: {
      require(spec.cycle >= 3 && spec.cycle % 2 == 1, "first cycle length must be odd and >= 3");
      require(spec.cycle2 >= 3 && spec.cycle2 % 2 == 1, "second cycle length must be odd and >= 3");
      require(spec.stem >= 1, "bicycle needs a connecting path of at least one edge");
      add_cycle(pairs, 0, spec.cycle);
      NodeId second = spec.cycle;
      add_cycle(pairs, second, spec.cycle2);
      NodeId next = spec.cycle + spec.cycle2;
      NodeId prev = 0;
      for (int i = 0; i + 1 < spec.stem; ++i) {
        pairs.emplace_back(prev, next);
        prev = next++;
      }
      pairs.emplace_back(prev, second);
      n = next;
      break;
    }
    case Topology::bipartite_random:
      require(spec.buyers >= 1 && spec.sellers >= 1, "both sides need at least one node");
      require(spec.edge_probability >= 0.0 && spec.edge_probability <= 1.0, "edge probability outside [0,1]");
      n = spec.buyers + spec.sellers;
      for (int b = 0; b < spec.buyers; ++b) {
        for (int s = 0; s < spec.sellers; ++s) {
          if (rng.uniform() < spec.edge_probability) pairs.emplace_back(b, spec.buyers + s);
        }
      }
      break;
    case Topology::erdos_renyi:
      require(spec.size >= 1, "need at least one node");
      require(spec.edge_probability >= 0.0 && spec.edge_probability <= 1.0, "edge probability outside [0,1]");
      n = spec.size;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (rng.uniform() < spec.edge_probability) pairs.emplace_back(i, j);
        }
      }
      break;
  }
  auto weights = assign_weights(spec.weights, pairs.size(), rng);
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) edges.push_back({pairs[e].first, pairs[e].second, weights[e]});
  return Instance(n, std::move(edges));
}

int cyclomatic_number(const Instance& instance) {
  std::vector<int> parent(instance.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = instance.node_count();
  for (const auto& e : instance.edges()) {
    int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return static_cast<int>(instance.edge_count()) - instance.node_count() + components;
}

}  // namespace nbd
