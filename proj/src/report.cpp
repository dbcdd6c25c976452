#include "nbd/report.hpp"

#include <cmath>

namespace nbd {

namespace {

Json number(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

Json edge_json(const Instance& instance, EdgeId e) {
  const auto& ed = instance.edge(e);
  return Json::array({ed.u, ed.v});
}

Json edges_json(const Instance& instance, std::span<const EdgeId> edges) {
  Json out = Json::array();
  for (auto e : edges) out.push_back(edge_json(instance, e));
  return out;
}

Json to_json(const LPClassification& c, const Instance& instance) {
  Json optimum = Json::array();
  for (auto e : c.optimum.support()) optimum.push_back({{"edge", edge_json(instance, e)}, {"x", c.optimum.value(e)}});
  Json out{{"kind", to_string(c.kind)}, {"epsilon", number(c.epsilon)}};
  if (c.epsilon_is_lower_bound) out["epsilon_is_lower_bound"] = true;
  out["optimum_weight"] = c.optimum.weight;
  out["optimum"] = std::move(optimum);
  if (c.corner_count > 0) out["corners"] = c.corner_count;
  return out;
}

Json to_json(const DualReport& r, const Instance& instance) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    if (v.edge) violations.push_back({{"edge", edge_json(instance, *v.edge)}, {"shortfall", v.amount}});
    else violations.push_back({{"node", v.node}, {"shortfall", v.amount}});
  }
  Json out{{"feasible", r.feasible}, {"objective", r.objective}};
  if (r.primal) out["primal"] = *r.primal;
  out["optimal"] = r.optimal;
  out["violations"] = std::move(violations);
  return out;
}

Json to_json(const NBSolution& sol, const Instance& instance) {
  return {{"matching", edges_json(instance, sol.matching)},
          {"gamma", sol.gamma},
          {"stable", sol.stable},
          {"balanced", sol.balanced}};
}

Json to_json(const FixedPointReport& r, const Instance& instance) {
  Json labels = Json::array();
  for (EdgeId e = 0; e < r.labels.size(); ++e) {
    labels.push_back({{"edge", edge_json(instance, e)}, {"label", to_string(r.labels[e])}});
  }
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json row{{"name", c.name}, {"passed", c.passed}};
    if (!c.edges.empty()) row["edges"] = edges_json(instance, c.edges);
    if (!c.nodes.empty()) row["nodes"] = c.nodes;
    if (!c.detail.empty()) row["detail"] = c.detail;
    checks.push_back(std::move(row));
  }
  return {{"tolerance", r.tol},
          {"residual", r.residual},
          {"passed", r.all_passed()},
          {"checks", std::move(checks)},
          {"labels", std::move(labels)},
          {"notes", r.notes}};
}

Json to_json(const KTDecomposition& d, const Instance& instance) {
  Json structures = Json::array();
  for (const auto& s : d.structures) {
    structures.push_back({{"nodes", s.nodes},
                          {"matched_edges", edges_json(instance, s.matched_edges)},
                          {"alternative_edges", edges_json(instance, s.alternative_edges)},
                          {"extended_nodes", s.extended_nodes},
                          {"shape", to_string(s.shape)},
                          {"sigma", s.sigma},
                          {"level", s.level}});
  }
  Json out{{"unmatched", d.unmatched}, {"levels", d.levels}, {"structures", std::move(structures)}};
  out["gap"] = d.gap ? Json(*d.gap) : Json(nullptr);
  out["convention"] = "structures sharing a slack value form one level; no zero difference enters the gap";
  if (!d.gap) out["note"] = "cycle structure present: solution not unique, no gap reported";
  return out;
}

Json to_json(const IdentityReport& r, const Instance& instance) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"edge", edge_json(instance, row.edge)},
                    {"kind", to_string(row.kind)},
                    {"message_surplus", row.message_surplus},
                    {"earning_surplus", row.earning_surplus},
                    {row.kind == IdentityKind::cross ? "lower_bound" : "expected", row.expected},
                    {"passed", row.passed}});
  }
  return {{"passed", r.passed}, {"rows", std::move(rows)}};
}

Json to_json(const Pairing& p, const Instance& instance) {
  return {{"pairs", edges_json(instance, p.pairs)}, {"ambiguous", p.ambiguous}, {"unpaired", p.unpaired}};
}

}  // namespace nbd
