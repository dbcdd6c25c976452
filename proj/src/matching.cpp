#include "nbd/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nbd {

bool HalfIntegralSolution::integral() const {
  return std::none_of(twice.begin(), twice.end(), [](auto v) { return v == 1; });
}

std::vector<EdgeId> HalfIntegralSolution::support() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < twice.size(); ++e) {
    if (twice[e] > 0) out.push_back(e);
  }
  return out;
}

std::string to_string(LPKind kind) {
  switch (kind) {
    case LPKind::tight: return "tight";
    case LPKind::pointed_not_tight: return "pointed_not_tight";
    case LPKind::degenerate: return "degenerate";
  }
  return "?";
}

std::string to_string(Solid s) {
  switch (s) {
    case Solid::one_solid: return "one_solid";
    case Solid::half_solid: return "half_solid";
    case Solid::non_solid: return "non_solid";
  }
  return "?";
}

namespace {

struct OddCycle {
  std::uint64_t mask = 0;
  std::vector<EdgeId> edges;
};

// Simple odd cycles grouped by their smallest node. Orientation is fixed by
// requiring the second node to be smaller than the last one.
std::vector<std::vector<OddCycle>> odd_cycles(const Instance& instance) {
  const int n = instance.node_count();
  std::vector<std::vector<OddCycle>> by_min(n);
  std::vector<NodeId> path;
  std::vector<EdgeId> path_edges;
  std::uint64_t on_path = 0;
  std::function<void(NodeId, NodeId)> extend = [&](NodeId start, NodeId last) {
    for (const auto& inc : instance.neighbors(last)) {
      NodeId next = inc.neighbor;
      if (next == start) {
        if (path.size() >= 3 && path.size() % 2 == 1 && path[1] < path.back()) {
          OddCycle c{on_path, path_edges};
          c.edges.push_back(inc.edge);
          by_min[start].push_back(std::move(c));
        }
        continue;
      }
      if (next < start || (on_path >> next) & 1U) continue;
      path.push_back(next);
      path_edges.push_back(inc.edge);
      on_path |= std::uint64_t{1} << next;
      extend(start, next);
      on_path &= ~(std::uint64_t{1} << next);
      path_edges.pop_back();
      path.pop_back();
    }
  };
  for (NodeId s = 0; s < n; ++s) {
    path = {s};
    path_edges.clear();
    on_path = std::uint64_t{1} << s;
    extend(s, s);
  }
  return by_min;
}

}  // namespace

void for_each_corner(const Instance& instance, const std::function<void(const HalfIntegralSolution&)>& visit,
                     int size_cap) {
  const int n = instance.node_count();
  if (n > size_cap || n > 63) {
    throw CapExceeded("corner enumeration capped at " + std::to_string(std::min(size_cap, 63)) + " nodes, instance has " +
                      std::to_string(n));
  }
  const auto cycles = odd_cycles(instance);
  HalfIntegralSolution current;
  current.twice.assign(instance.edge_count(), 0);
  std::uint64_t used = 0;

  // Each corner is produced once: the lowest free node is either exposed,
  // matched to a higher free neighbor, or the smallest node of a 1/2 cycle.
  std::function<void(NodeId)> recurse = [&](NodeId from) {
    NodeId v = from;
    while (v < n && ((used >> v) & 1U)) ++v;
    if (v >= n) {
      visit(current);
      return;
    }
    recurse(v + 1);
    used |= std::uint64_t{1} << v;
    for (const auto& inc : instance.neighbors(v)) {
      NodeId u = inc.neighbor;
      if (u < v || ((used >> u) & 1U)) continue;
      used |= std::uint64_t{1} << u;
      current.twice[inc.edge] = 2;
      current.weight += instance.edge(inc.edge).w;
      recurse(v + 1);
      current.weight -= instance.edge(inc.edge).w;
      current.twice[inc.edge] = 0;
      used &= ~(std::uint64_t{1} << u);
    }
    for (const auto& c : cycles[v]) {
      std::uint64_t others = c.mask & ~(std::uint64_t{1} << v);
      if (used & others) continue;
      used |= others;
      double saved = current.weight;
      for (auto e : c.edges) {
        current.twice[e] = 1;
        current.weight += 0.5 * instance.edge(e).w;
      }
      recurse(v + 1);
      for (auto e : c.edges) current.twice[e] = 0;
      current.weight = saved;
      used &= ~others;
    }
    used &= ~(std::uint64_t{1} << v);
  };
  recurse(0);
}

std::vector<HalfIntegralSolution> enumerate_corners(const Instance& instance, int size_cap) {
  std::vector<HalfIntegralSolution> out;
  for_each_corner(instance, [&](const HalfIntegralSolution& s) { out.push_back(s); }, size_cap);
  return out;
}

LPClassification classify(const Instance& instance, const MatchingOptions& options) {
  LPClassification out;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for_each_corner(
      instance,
      [&](const HalfIntegralSolution& s) {
        ++out.corner_count;
        if (s.weight > best) {
          second = best;
          best = s.weight;
          out.optimum = s;
        } else if (s.weight > second) {
          second = s.weight;
        }
      },
      options.size_cap);
  if (out.corner_count < 2) {
    // Only the empty corner exists (edgeless instance): nothing to compete.
    out.kind = LPKind::tight;
    out.epsilon = std::numeric_limits<double>::infinity();
    return out;
  }
  out.epsilon = best - second;
  if (out.epsilon <= options.tol) {
    out.kind = LPKind::degenerate;
  } else {
    out.kind = out.optimum.integral() ? LPKind::tight : LPKind::pointed_not_tight;
  }
  return out;
}

std::optional<LPClassification> certify_tight(const Instance& instance, std::span<const double> gamma,
                                              std::span<const EdgeId> matching, double tol) {
  if (gamma.size() != static_cast<std::size_t>(instance.node_count())) throw Error("gamma has the wrong size");
  std::vector<bool> matched(instance.node_count(), false);
  std::vector<bool> in_matching(instance.edge_count(), false);
  double weight = 0.0;
  double min_matched_weight = std::numeric_limits<double>::infinity();
  for (auto e : matching) {
    const auto& ed = instance.edge(e);
    if (matched[ed.u] || matched[ed.v]) return std::nullopt;
    matched[ed.u] = matched[ed.v] = true;
    in_matching[e] = true;
    weight += ed.w;
    min_matched_weight = std::min(min_matched_weight, ed.w);
    if (std::abs(gamma[ed.u] + gamma[ed.v] - ed.w) > tol) return std::nullopt;
  }
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    if (gamma[i] < -tol) return std::nullopt;
    if (!matched[i] && gamma[i] > tol) return std::nullopt;
  }
  double min_slack = std::numeric_limits<double>::infinity();
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    if (in_matching[e]) continue;
    const auto& ed = instance.edge(e);
    double slack = gamma[ed.u] + gamma[ed.v] - ed.w;
    if (slack <= tol) return std::nullopt;
    min_slack = std::min(min_slack, slack);
  }
  LPClassification out;
  out.kind = LPKind::tight;
  out.epsilon_is_lower_bound = true;
  out.epsilon = std::min(0.5 * min_slack, min_matched_weight);
  out.optimum.twice.assign(instance.edge_count(), 0);
  for (auto e : matching) out.optimum.twice[e] = 2;
  out.optimum.weight = weight;
  return out;
}

DualReport dual_check(std::span<const double> gamma, const Instance& instance, std::optional<double> primal_optimum,
                      double tol) {
  if (gamma.size() != static_cast<std::size_t>(instance.node_count())) throw Error("gamma has the wrong size");
  DualReport r;
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    r.objective += gamma[i];
    if (gamma[i] < -tol) r.violations.push_back({std::nullopt, i, -gamma[i]});
  }
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    const auto& ed = instance.edge(e);
    double gap = ed.w - gamma[ed.u] - gamma[ed.v];
    if (gap > tol) r.violations.push_back({e, -1, gap});
  }
  r.feasible = r.violations.empty();
  r.primal = primal_optimum;
  r.optimal = r.feasible && primal_optimum && std::abs(r.objective - *primal_optimum) <= tol;
  return r;
}

DualReport dual_check(std::span<const double> gamma, const Instance& instance, double tol) {
  auto cls = classify(instance, {.size_cap = 12, .tol = tol});
  return dual_check(gamma, instance, cls.optimum.weight, tol);
}

std::vector<Solid> solid_labels(const LPClassification& classification) {
  if (classification.kind == LPKind::degenerate) throw Error("solid labels need a non-degenerate LP");
  std::vector<Solid> out(classification.optimum.twice.size());
  for (EdgeId e = 0; e < out.size(); ++e) {
    switch (classification.optimum.twice[e]) {
      case 2: out[e] = Solid::one_solid; break;
      case 1: out[e] = Solid::half_solid; break;
      default: out[e] = Solid::non_solid; break;
    }
  }
  return out;
}

}  // namespace nbd
