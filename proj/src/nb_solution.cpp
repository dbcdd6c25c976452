#include "nbd/nb_solution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace nbd {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// max_{k in di \ j} (w_ik - gamma_k)_+, or 0 without other neighbours.
double best_alternative(NodeId i, NodeId excluded, std::span<const double> gamma, const Instance& instance) {
  double best = 0.0;
  for (const auto& inc : instance.neighbors(i)) {
    if (inc.neighbor == excluded) continue;
    best = std::max(best, positive_part(instance.edge(inc.edge).w - gamma[inc.neighbor]));
  }
  return best;
}

std::string edge_text(const Instance& instance, EdgeId e) {
  const auto& ed = instance.edge(e);
  return "(" + std::to_string(ed.u) + "," + std::to_string(ed.v) + ")";
}

void fail(PropertyCheck& check, const Instance& instance, EdgeId e, const std::string& what) {
  check.passed = false;
  check.edges.push_back(e);
  if (!check.detail.empty()) check.detail += "; ";
  check.detail += edge_text(instance, e) + ": " + what;
}

void fail_node(PropertyCheck& check, NodeId i, const std::string& what) {
  check.passed = false;
  check.nodes.push_back(i);
  if (!check.detail.empty()) check.detail += "; ";
  check.detail += "node " + std::to_string(i) + ": " + what;
}

PropertyCheck named_check(std::string_view name) {
  PropertyCheck c;
  c.name = name;
  return c;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string to_string(StabilityIssue issue) {
  switch (issue) {
    case StabilityIssue::blocking_edge: return "blocking_edge";
    case StabilityIssue::negative_share: return "negative_share";
    case StabilityIssue::split_mismatch: return "split_mismatch";
    case StabilityIssue::unmatched_earning: return "unmatched_earning";
    case StabilityIssue::overlapping_matching: return "overlapping_matching";
  }
  return "?";
}

std::string to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::strong_dotted: return "strong_dotted";
    case EdgeLabel::weak_dotted: return "weak_dotted";
    case EdgeLabel::non_dotted: return "non_dotted";
  }
  return "?";
}

std::vector<StabilityViolation> check_stability(const NBSolution& sol, const Instance& instance, double tol) {
  if (sol.gamma.size() != static_cast<std::size_t>(instance.node_count())) throw Error("gamma has the wrong size");
  std::vector<StabilityViolation> out;
  std::vector<bool> matched(instance.node_count(), false);
  std::vector<bool> in_matching(instance.edge_count(), false);
  for (auto e : sol.matching) {
    const auto& ed = instance.edge(e);
    if (matched[ed.u] || matched[ed.v]) {
      out.push_back({StabilityIssue::overlapping_matching, e, -1, 0.0});
    }
    matched[ed.u] = matched[ed.v] = true;
    in_matching[e] = true;
    double diff = sol.gamma[ed.u] + sol.gamma[ed.v] - ed.w;
    if (std::abs(diff) > tol) out.push_back({StabilityIssue::split_mismatch, e, -1, diff});
  }
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    if (sol.gamma[i] < -tol) out.push_back({StabilityIssue::negative_share, 0, i, -sol.gamma[i]});
    if (!matched[i] && sol.gamma[i] > tol) out.push_back({StabilityIssue::unmatched_earning, 0, i, sol.gamma[i]});
  }
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    if (in_matching[e]) continue;
    const auto& ed = instance.edge(e);
    double shortfall = ed.w - sol.gamma[ed.u] - sol.gamma[ed.v];
    if (shortfall > tol) out.push_back({StabilityIssue::blocking_edge, e, -1, shortfall});
  }
  return out;
}

BalanceResidual balance_at(EdgeId e, std::span<const double> gamma, const Instance& instance, double tol) {
  const auto& ed = instance.edge(e);
  BalanceResidual r;
  r.edge = e;
  r.lhs = gamma[ed.u] - best_alternative(ed.u, ed.v, gamma, instance);
  r.rhs = gamma[ed.v] - best_alternative(ed.v, ed.u, gamma, instance);
  r.residual = std::abs(r.lhs - r.rhs);
  r.sides_nonnegative = r.lhs >= -tol && r.rhs >= -tol;
  return r;
}

std::vector<BalanceResidual> check_balance(const NBSolution& sol, const Instance& instance, double tol) {
  if (sol.gamma.size() != static_cast<std::size_t>(instance.node_count())) throw Error("gamma has the wrong size");
  std::vector<BalanceResidual> out;
  out.reserve(sol.matching.size());
  for (auto e : sol.matching) out.push_back(balance_at(e, sol.gamma, instance, tol));
  return out;
}

NBSolution certify(NBSolution sol, const Instance& instance, double tol) {
  std::sort(sol.matching.begin(), sol.matching.end());
  sol.stable = check_stability(sol, instance, tol).empty();
  auto residuals = check_balance(sol, instance, tol);
  sol.balanced = std::all_of(residuals.begin(), residuals.end(),
                             [&](const BalanceResidual& r) { return r.residual <= tol && r.sides_nonnegative; });
  return sol;
}

bool FixedPointReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck& FixedPointReport::check(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error("no check named " + std::string(name));
}

std::vector<EdgeId> FixedPointReport::with_label(EdgeLabel label) const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < labels.size(); ++e) {
    if (labels[e] == label) out.push_back(e);
  }
  return out;
}

EdgeLabel dotted_label(double w, double a_ij, double a_ji, double tol) {
  double s = w - a_ij - a_ji;
  if (s > tol) return EdgeLabel::strong_dotted;
  if (s >= -tol) return EdgeLabel::weak_dotted;
  return EdgeLabel::non_dotted;
}

FixedPointReport fp_property_suite(const MessageState& state, const Instance& instance,
                                   const LPClassification& classification, const SuiteOptions& options) {
  if (state.alpha.size() != instance.directed_count()) throw Error("state does not match the instance");
  if (classification.kind == LPKind::degenerate) {
    throw Error("degenerate LP: the fixed-point properties are only claimed for pointed instances");
  }
  const double tol = options.tol;
  FixedPointReport report;
  report.tol = tol;
  report.residual = fixed_point_residual(state, instance);
  if (report.residual > options.fixed_point_tol) {
    if (options.require_fixed_point) {
      throw Error("state is not a fixed point: residual " + format_double(report.residual));
    }
    report.notes.push_back("input is not a fixed point (residual " + format_double(report.residual) + ")");
  }
  if (classification.kind == LPKind::pointed_not_tight) {
    report.notes.push_back("pointed, not tight: no NB solution exists; dual optimum certified instead");
  }

  const auto& gamma = state.earnings;
  const int n = instance.node_count();
  report.labels.resize(instance.edge_count());
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    report.labels[e] = dotted_label(instance.edge(e).w, state.alpha[2 * e], state.alpha[2 * e + 1], tol);
  }
  auto is_partner = [&](EdgeId e) {
    const auto& ed = instance.edge(e);
    return std::abs(gamma[ed.u] + gamma[ed.v] - ed.w) <= tol;
  };
  std::vector<std::vector<NodeId>> partners(n);
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    if (!is_partner(e)) continue;
    partners[instance.edge(e).u].push_back(instance.edge(e).v);
    partners[instance.edge(e).v].push_back(instance.edge(e).u);
  }

  auto partner = named_check(kPartnerEquivalence);
  auto unique = named_check(kUniquePartner);
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    const auto& ed = instance.edge(e);
    DirectedId uv = 2 * e, vu = 2 * e + 1;
    bool a = is_partner(e);
    bool b = ed.w - state.alpha[uv] - state.alpha[vu] >= -tol;
    bool c = std::abs(gamma[ed.u] - state.offers[vu]) <= tol && std::abs(gamma[ed.v] - state.offers[uv]) <= tol;
    if (!(a == b && b == c)) {
      fail(partner, instance, e, "partners=" + yes_no(a) + " nonneg_surplus=" + yes_no(b) + " offers_match=" + yes_no(c));
    }
    bool only_v = partners[ed.u] == std::vector<NodeId>{ed.v};
    bool only_u = partners[ed.v] == std::vector<NodeId>{ed.u};
    bool strong = report.labels[e] == EdgeLabel::strong_dotted;
    if (!(only_v == only_u && only_u == strong)) {
      fail(unique, instance, e, "sole_partner_u=" + yes_no(only_v) + " sole_partner_v=" + yes_no(only_u) +
                                    " strong=" + yes_no(strong));
    }
  }

  auto undotted = named_check(kUndottedZero);
  for (NodeId i = 0; i < n; ++i) {
    bool dotted = std::any_of(instance.neighbors(i).begin(), instance.neighbors(i).end(),
                              [&](const Incidence& inc) { return report.labels[inc.edge] != EdgeLabel::non_dotted; });
    if (!dotted && gamma[i] > tol) fail_node(undotted, i, "no dotted edge but earning " + format_double(gamma[i]));
  }

  auto offer = named_check(kOfferFormula);
  for (DirectedId d = 0; d < instance.directed_count(); ++d) {
    double expected = positive_part(instance.weight(d) - gamma[instance.from(d)]);
    if (std::abs(state.offers[d] - expected) > tol) {
      if (offer.edges.empty() || offer.edges.back() != Instance::edge_of(d)) {
        fail(offer, instance, Instance::edge_of(d),
             "offer " + format_double(state.offers[d]) + " vs " + format_double(expected) + " from node " +
                 std::to_string(instance.from(d)));
      }
    }
  }

  auto balance = named_check(kEdgeBalance);
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    auto r = balance_at(e, gamma, instance, tol);
    if (r.residual > tol || !r.sides_nonnegative) {
      fail(balance, instance, e, "surpluses " + format_double(r.lhs) + " vs " + format_double(r.rhs));
    }
  }

  auto solid = named_check(kSolidDotted);
  auto solids = solid_labels(classification);
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    bool strong = report.labels[e] == EdgeLabel::strong_dotted;
    bool weak = report.labels[e] == EdgeLabel::weak_dotted;
    if (strong != (solids[e] == Solid::one_solid) || weak != (solids[e] == Solid::half_solid)) {
      fail(solid, instance, e, to_string(report.labels[e]) + " but " + to_string(solids[e]));
    }
  }

  auto dual = named_check(kDualOptimal);
  auto dr = dual_check(gamma, instance, classification.optimum.weight, tol);
  if (!dr.optimal) {
    dual.passed = false;
    for (const auto& v : dr.violations) {
      if (v.edge) dual.edges.push_back(*v.edge);
      else dual.nodes.push_back(v.node);
    }
    dual.detail = "objective " + format_double(dr.objective) + " vs primal " + format_double(classification.optimum.weight) +
                  (dr.feasible ? "" : ", infeasible");
  }

  report.checks = {partner, unique, undotted, offer, balance, solid, dual};
  return report;
}

MessageState fp_from_nb(const NBSolution& sol, const Instance& instance) {
  if (!sol.stable || !sol.balanced) throw Error("fixed point construction needs a stable, balanced solution");
  if (sol.gamma.size() != static_cast<std::size_t>(instance.node_count())) throw Error("gamma has the wrong size");
  Messages offers(instance.directed_count());
  for (DirectedId d = 0; d < offers.size(); ++d) {
    offers[d] = positive_part(instance.weight(d) - sol.gamma[instance.from(d)]);
  }
  Messages alpha(instance.directed_count(), 0.0);
  for (DirectedId d = 0; d < alpha.size(); ++d) {
    NodeId i = instance.from(d), j = instance.to(d);
    for (const auto& inc : instance.neighbors(i)) {
      if (inc.neighbor != j) alpha[d] = std::max(alpha[d], offers[inc.in]);
    }
  }
  return derive(std::move(alpha), instance);
}

NBSolution solution_from_state(const MessageState& state, const Instance& instance, double tol) {
  NBSolution sol;
  sol.gamma = state.earnings;
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    if (dotted_label(instance.edge(e).w, state.alpha[2 * e], state.alpha[2 * e + 1], tol) == EdgeLabel::strong_dotted) {
      sol.matching.push_back(e);
    }
  }
  return certify(std::move(sol), instance, tol);
}

std::vector<std::vector<EdgeId>> maximal_matchings(const Instance& instance) {
  std::vector<std::vector<EdgeId>> out;
  std::vector<bool> used(instance.node_count(), false);
  std::vector<EdgeId> current;
  std::function<void(EdgeId)> recurse = [&](EdgeId next) {
    if (next == instance.edge_count()) {
      for (const auto& ed : instance.edges()) {
        if (!used[ed.u] && !used[ed.v]) return;
      }
      out.push_back(current);
      return;
    }
    const auto& ed = instance.edge(next);
    if (!used[ed.u] && !used[ed.v]) {
      used[ed.u] = used[ed.v] = true;
      current.push_back(next);
      recurse(next + 1);
      current.pop_back();
      used[ed.u] = used[ed.v] = false;
    }
    recurse(next + 1);
  };
  recurse(0);
  return out;
}

namespace {

// Damped Gauss-Seidel on the matched edges: each pair moves its split toward
// equal surplus over the current best alternatives.
bool solve_balance(const Instance& instance, std::span<const EdgeId> matching, std::vector<double>& gamma,
                   const OracleOptions& options) {
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double change = 0.0;
    for (auto e : matching) {
      const auto& ed = instance.edge(e);
      double a_u = best_alternative(ed.u, ed.v, gamma, instance);
      double a_v = best_alternative(ed.v, ed.u, gamma, instance);
      double target = std::clamp(0.5 * (ed.w + a_u - a_v), 0.0, ed.w);
      double next = (1.0 - options.damping) * gamma[ed.u] + options.damping * target;
      change = std::max(change, std::abs(next - gamma[ed.u]));
      gamma[ed.u] = next;
      gamma[ed.v] = ed.w - next;
    }
    if (change <= options.sweep_tol) return true;
  }
  return false;
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

OracleResult nb_oracle(const Instance& instance, const OracleOptions& options) {
  if (instance.node_count() > options.size_cap) {
    throw CapExceeded("NB oracle capped at " + std::to_string(options.size_cap) + " nodes, instance has " +
                      std::to_string(instance.node_count()));
  }
  OracleResult result;
  Rng rng(options.seed);
  for (const auto& matching : maximal_matchings(instance)) {
    std::vector<NBSolution> found;
    bool any_failed = false;
    for (int s = 0; s < options.seeds; ++s) {
      std::vector<double> gamma(instance.node_count(), 0.0);
      for (auto e : matching) {
        const auto& ed = instance.edge(e);
        double share = s == 0 ? 0.5 : rng.uniform();
        gamma[ed.u] = share * ed.w;
        gamma[ed.v] = ed.w - gamma[ed.u];
      }
      if (!solve_balance(instance, matching, gamma, options)) {
        any_failed = true;
        continue;
      }
      auto sol = certify(NBSolution{matching, gamma}, instance, options.certify_tol);
      if (!sol.stable || !sol.balanced) continue;
      bool seen = std::any_of(found.begin(), found.end(), [&](const NBSolution& f) {
        return sup_gap(f.gamma, sol.gamma) <= options.distinct_tol;
      });
      if (!seen) found.push_back(std::move(sol));
    }
    if (any_failed) result.nonconverged.push_back(matching);
    // Two distinct solutions on one matching whose midpoint also certifies
    // indicate a segment of solutions.
    for (std::size_t a = 0; a < found.size() && !result.family; ++a) {
      for (std::size_t b = a + 1; b < found.size(); ++b) {
        std::vector<double> mid(found[a].gamma.size());
        for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (found[a].gamma[i] + found[b].gamma[i]);
        auto sol = certify(NBSolution{matching, mid}, instance, options.certify_tol);
        if (sol.stable && sol.balanced) {
          result.family = true;
          break;
        }
      }
    }
    std::sort(found.begin(), found.end(),
              [](const NBSolution& x, const NBSolution& y) { return x.gamma < y.gamma; });
    for (auto& f : found) result.solutions.push_back(std::move(f));
  }
  return result;
}

}  // namespace nbd
