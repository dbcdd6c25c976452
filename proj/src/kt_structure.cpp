#include "nbd/kt_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace nbd {

std::string to_string(StructureShape shape) {
  switch (shape) {
    case StructureShape::path: return "path";
    case StructureShape::blossom: return "blossom";
    case StructureShape::bicycle: return "bicycle";
    case StructureShape::cycle: return "cycle";
  }
  return "?";
}

std::string to_string(IdentityKind kind) {
  switch (kind) {
    case IdentityKind::matched: return "matched";
    case IdentityKind::alternative: return "alternative";
    case IdentityKind::cross: return "cross";
  }
  return "?";
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Shape of a connected structure graph given as an edge list over local ids.
StructureShape classify_shape(int vertex_count, const std::vector<std::pair<int, int>>& edges) {
  int cyclomatic = static_cast<int>(edges.size()) - vertex_count + 1;
  std::vector<int> degree(vertex_count, 0);
  for (auto [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  if (cyclomatic == 0) {
    if (*std::max_element(degree.begin(), degree.end()) > 2) throw Error("structure is a tree but not a path");
    return StructureShape::path;
  }
  if (cyclomatic == 2) return StructureShape::bicycle;
  if (cyclomatic != 1) throw Error("structure has " + std::to_string(cyclomatic) + " independent cycles");
  // Strip pendant vertices until only the cycle remains.
  std::vector<bool> removed(vertex_count, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < vertex_count; ++v) {
      if (removed[v] || degree[v] > 1) continue;
      removed[v] = true;
      changed = true;
      for (auto [a, b] : edges) {
        if (a == v && !removed[b]) --degree[b];
        if (b == v && !removed[a]) --degree[a];
      }
    }
  }
  auto cycle_length = std::count(removed.begin(), removed.end(), false);
  return cycle_length % 2 == 1 ? StructureShape::blossom : StructureShape::cycle;
}

}  // namespace

KTDecomposition decompose(const MessageState& fp, const NBSolution& sol, const Instance& instance,
                          const KTOptions& options) {
  if (!sol.stable || !sol.balanced) throw Error("decomposition needs a stable, balanced solution");
  const int n = instance.node_count();
  if (fp.earnings.size() != static_cast<std::size_t>(n) || fp.offers.size() != instance.directed_count()) {
    throw Error("fixed point does not match the instance");
  }
  for (NodeId i = 0; i < n; ++i) {
    if (std::abs(fp.earnings[i] - sol.gamma[i]) > options.tol) {
      throw Error("fixed point earnings disagree with the solution at node " + std::to_string(i));
    }
  }

  std::vector<NodeId> partner(n, -1);
  std::vector<EdgeId> partner_edge(n, 0);
  for (auto e : sol.matching) {
    const auto& ed = instance.edge(e);
    partner[ed.u] = ed.v;
    partner[ed.v] = ed.u;
    partner_edge[ed.u] = partner_edge[ed.v] = e;
  }

  KTDecomposition out;
  out.node_slack.assign(n, 0.0);
  out.structure_of.assign(n, -1);
  std::vector<double> second(n, 0.0);
  std::vector<NodeId> matched;
  for (NodeId i = 0; i < n; ++i) {
    if (partner[i] < 0) {
      out.unmatched.push_back(i);
      continue;
    }
    matched.push_back(i);
    for (const auto& inc : instance.neighbors(i)) {
      if (inc.neighbor != partner[i]) second[i] = std::max(second[i], fp.offers[inc.in]);
    }
    out.node_slack[i] = sol.gamma[i] - second[i];
  }

  // Cluster slack values into levels.
  std::vector<NodeId> by_slack = matched;
  std::stable_sort(by_slack.begin(), by_slack.end(),
                   [&](NodeId a, NodeId b) { return out.node_slack[a] < out.node_slack[b]; });
  std::vector<int> level_of(n, -1);
  std::vector<std::vector<NodeId>> level_nodes;
  for (std::size_t k = 0; k < by_slack.size(); ++k) {
    NodeId i = by_slack[k];
    if (k > 0) {
      double diff = out.node_slack[i] - out.node_slack[by_slack[k - 1]];
      if (diff > options.tol_cluster && diff < 10 * options.tol_cluster) {
        throw Error("unstable slack clustering: values " + format_double(out.node_slack[by_slack[k - 1]]) + " and " +
                    format_double(out.node_slack[i]) + " are neither equal nor clearly apart");
      }
      if (diff > options.tol_cluster) level_nodes.emplace_back();
    } else {
      level_nodes.emplace_back();
    }
    level_nodes.back().push_back(i);
    level_of[i] = static_cast<int>(level_nodes.size()) - 1;
  }
  for (const auto& nodes : level_nodes) {
    double sum = 0.0;
    for (auto i : nodes) sum += out.node_slack[i];
    out.levels.push_back(sum / static_cast<double>(nodes.size()));
  }

  // Second-best edges, keyed by the node that receives the offer.
  std::vector<std::vector<EdgeId>> alt_edges(n);
  for (auto i : matched) {
    if (second[i] <= options.tol) continue;
    for (const auto& inc : instance.neighbors(i)) {
      if (inc.neighbor != partner[i] && fp.offers[inc.in] >= second[i] - options.tol) alt_edges[i].push_back(inc.edge);
    }
  }

  UnionFind uf(n);
  for (auto i : matched) {
    uf.unite(i, partner[i]);
    for (auto e : alt_edges[i]) {
      NodeId k = instance.edge(e).u == i ? instance.edge(e).v : instance.edge(e).u;
      if (level_of[k] == level_of[i]) uf.unite(i, k);
    }
  }
  std::map<int, std::vector<NodeId>> components;
  for (auto i : matched) components[uf.find(i)].push_back(i);

  for (auto& [root, nodes] : components) {
    KTStructure s;
    s.nodes = nodes;
    s.level = level_of[nodes.front()];
    s.sigma = out.levels[s.level];
    std::set<EdgeId> e1, e2;
    for (auto i : nodes) {
      e1.insert(partner_edge[i]);
      e2.insert(alt_edges[i].begin(), alt_edges[i].end());
    }
    s.matched_edges.assign(e1.begin(), e1.end());
    s.alternative_edges.assign(e2.begin(), e2.end());
    std::set<NodeId> ext;
    std::map<NodeId, int> local;
    for (auto i : nodes) local.emplace(i, static_cast<int>(local.size()));
    std::vector<std::pair<int, int>> graph;
    int vertex_count = static_cast<int>(local.size());
    auto endpoint = [&](NodeId v) {
      auto it = local.find(v);
      return it != local.end() ? it->second : vertex_count++;  // outside nodes become distinct leaves
    };
    for (auto set : {&e1, &e2}) {
      for (auto e : *set) {
        const auto& ed = instance.edge(e);
        ext.insert(ed.u);
        ext.insert(ed.v);
        int a = endpoint(ed.u);
        int b = endpoint(ed.v);
        graph.emplace_back(a, b);
      }
    }
    s.extended_nodes.assign(ext.begin(), ext.end());
    s.shape = classify_shape(vertex_count, graph);
    out.structures.push_back(std::move(s));
  }
  std::stable_sort(out.structures.begin(), out.structures.end(), [](const KTStructure& a, const KTStructure& b) {
    return a.sigma != b.sigma ? a.sigma < b.sigma : a.nodes.front() < b.nodes.front();
  });
  for (std::size_t q = 0; q < out.structures.size(); ++q) {
    for (auto i : out.structures[q].nodes) out.structure_of[i] = static_cast<int>(q);
  }
  out.gap = compute_gap(out, sol, instance);
  return out;
}

std::optional<double> compute_gap(const KTDecomposition& decomp, const NBSolution& sol, const Instance& instance) {
  for (const auto& s : decomp.structures) {
    if (s.shape == StructureShape::cycle) return std::nullopt;
  }
  if (decomp.levels.empty()) return std::nullopt;
  double gap = decomp.levels.front();
  for (std::size_t k = 1; k < decomp.levels.size(); ++k) gap = std::min(gap, decomp.levels[k] - decomp.levels[k - 1]);
  for (const auto& s : decomp.structures) {
    std::set<EdgeId> own(s.matched_edges.begin(), s.matched_edges.end());
    own.insert(s.alternative_edges.begin(), s.alternative_edges.end());
    for (EdgeId e = 0; e < instance.edge_count(); ++e) {
      if (own.count(e)) continue;
      const auto& ed = instance.edge(e);
      if (!std::binary_search(s.extended_nodes.begin(), s.extended_nodes.end(), ed.u) ||
          !std::binary_search(s.extended_nodes.begin(), s.extended_nodes.end(), ed.v)) {
        continue;
      }
      gap = std::min(gap, sol.gamma[ed.u] + sol.gamma[ed.v] - ed.w - s.sigma);
    }
  }
  return gap;
}

IdentityReport check_fp_identities(const KTDecomposition& decomp, const MessageState& fp, const Instance& instance,
                                   double tol) {
  IdentityReport report;
  std::vector<int> owner(instance.edge_count(), -1);
  std::vector<IdentityKind> kind(instance.edge_count(), IdentityKind::cross);
  for (std::size_t q = 0; q < decomp.structures.size(); ++q) {
    for (auto e : decomp.structures[q].alternative_edges) {
      owner[e] = static_cast<int>(q);
      kind[e] = IdentityKind::alternative;
    }
    for (auto e : decomp.structures[q].matched_edges) {
      owner[e] = static_cast<int>(q);
      kind[e] = IdentityKind::matched;
    }
  }
  auto node_sigma = [&](NodeId i) {
    int q = decomp.structure_of[i];
    return q < 0 ? 0.0 : decomp.structures[q].sigma;
  };
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    const auto& ed = instance.edge(e);
    IdentityRow row;
    row.edge = e;
    row.kind = kind[e];
    row.message_surplus = fp.alpha[2 * e] + fp.alpha[2 * e + 1] - ed.w;
    row.earning_surplus = fp.earnings[ed.u] + fp.earnings[ed.v] - ed.w;
    switch (row.kind) {
      case IdentityKind::matched: {
        double sigma = decomp.structures[owner[e]].sigma;
        row.expected = -2 * sigma;
        row.passed = std::abs(row.message_surplus - row.expected) <= tol && std::abs(row.earning_surplus) <= tol;
        break;
      }
      case IdentityKind::alternative: {
        double sigma = decomp.structures[owner[e]].sigma;
        row.expected = sigma;
        row.passed = std::abs(row.message_surplus - sigma) <= tol && std::abs(row.earning_surplus - sigma) <= tol;
        break;
      }
      case IdentityKind::cross:
        row.expected = std::max(node_sigma(ed.u), node_sigma(ed.v));
        row.passed = row.message_surplus >= row.expected - tol;
        break;
    }
    report.passed = report.passed && row.passed;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace nbd
