#include "nbd/path_analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace nbd {

void validate(const PathSpec& path) {
  if (path.weights.empty()) throw Error("path needs at least one edge");
  if (path.matched.size() != path.weights.size()) throw Error("path matching flags do not match the edge count");
  for (std::size_t k = 0; k < path.length(); ++k) {
    if (!(path.weights[k] > 0.0) || !std::isfinite(path.weights[k])) throw Error("path weights must be positive");
    if (k > 0 && path.matched[k] && path.matched[k - 1]) throw Error("path matching has two consecutive edges");
  }
}

PathSpec alternating_path(std::vector<double> weights, bool first_matched) {
  PathSpec p;
  p.matched.resize(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) p.matched[k] = (k % 2 == 0) == first_matched;
  p.weights = std::move(weights);
  validate(p);
  return p;
}

std::vector<double> simplified_offers(const PathSpec& path, std::span<const double> alpha_hat) {
  std::vector<double> m(path.directed_count());
  for (std::size_t k = 0; k < path.length(); ++k) {
    double w = path.weights[k], f = alpha_hat[forward(k)], b = alpha_hat[backward(k)];
    if (path.matched[k]) {
      m[forward(k)] = 0.5 * (w - f + b);
      m[backward(k)] = 0.5 * (w - b + f);
    } else {
      m[forward(k)] = w - f;
      m[backward(k)] = w - b;
    }
  }
  return m;
}

SimplifiedPathState simplified_step(const SimplifiedPathState& state, const PathSpec& path, double kappa,
                                    const Boundary& boundary) {
  const std::size_t l = path.length();
  if (state.alpha_hat.size() != path.directed_count()) throw Error("path state has the wrong size");
  auto m = simplified_offers(path, state.alpha_hat);
  const auto& a = state.alpha_hat;
  SimplifiedPathState next{std::vector<double>(a.size()), state.time + 1};
  next.alpha_hat[forward(0)] = kappa * boundary.left + (1 - kappa) * a[forward(0)];
  next.alpha_hat[backward(l - 1)] = kappa * boundary.right + (1 - kappa) * a[backward(l - 1)];
  for (std::size_t i = 1; i < l; ++i) {
    next.alpha_hat[forward(i)] = kappa * m[forward(i - 1)] + (1 - kappa) * a[forward(i)];
    next.alpha_hat[backward(i - 1)] = kappa * m[backward(i)] + (1 - kappa) * a[backward(i - 1)];
  }
  return next;
}

std::vector<double> simplified_fixed_point(const PathSpec& path, const Boundary& boundary) {
  validate(path);
  const std::size_t l = path.length();
  const auto size = static_cast<Eigen::Index>(path.directed_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  auto idx = [](std::size_t d) { return static_cast<Eigen::Index>(d); };
  // Row for message `row` equal to the offer travelling along `offer` on edge k.
  auto offer_row = [&](std::size_t row, std::size_t k, bool forward_offer) {
    std::size_t own = forward_offer ? forward(k) : backward(k);
    std::size_t other = forward_offer ? backward(k) : forward(k);
    a(idx(row), idx(row)) += 1.0;
    if (path.matched[k]) {
      a(idx(row), idx(own)) += 0.5;
      a(idx(row), idx(other)) -= 0.5;
      rhs(idx(row)) = 0.5 * path.weights[k];
    } else {
      a(idx(row), idx(own)) += 1.0;
      rhs(idx(row)) = path.weights[k];
    }
  };
  a(idx(forward(0)), idx(forward(0))) = 1.0;
  rhs(idx(forward(0))) = boundary.left;
  a(idx(backward(l - 1)), idx(backward(l - 1))) = 1.0;
  rhs(idx(backward(l - 1))) = boundary.right;
  for (std::size_t i = 1; i < l; ++i) {
    offer_row(forward(i), i - 1, true);
    offer_row(backward(i - 1), i, false);
  }
  Eigen::VectorXd x = a.fullPivLu().solve(rhs);
  return {x.data(), x.data() + x.size()};
}

SimplifiedRun run_simplified(const PathSpec& path, double kappa, const Boundary& boundary,
                             std::vector<double> initial, std::int64_t horizon, double tol) {
  validate(path);
  if (initial.size() != path.directed_count()) throw Error("initial path state has the wrong size");
  SimplifiedRun run;
  run.fixed_point = simplified_fixed_point(path, boundary);
  run.state = {std::move(initial), 0};
  auto error = [&] { return sup_distance(run.state.alpha_hat, run.fixed_point); };
  run.error.push_back(error());
  while (run.error.back() > tol && run.state.time < horizon) {
    run.state = simplified_step(run.state, path, kappa, boundary);
    run.error.push_back(error());
  }
  run.converged = run.error.back() <= tol;

  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t t = 0; t < run.error.size(); ++t) {
    if (run.error[t] <= 0.0) continue;
    double y = std::log(run.error[t]), x = static_cast<double>(t);
    n += 1;
    st += x;
    sy += y;
    stt += x * x;
    sty += x * y;
  }
  double denom = n * stt - st * st;
  run.decay_slope = (n >= 2 && denom > 0) ? (n * sty - st * sy) / denom : 0.0;
  return run;
}

std::string series_csv(std::span<const double> values) {
  std::ostringstream out;
  out << "t,value\n";
  for (std::size_t t = 0; t < values.size(); ++t) out << t << ',' << format_double(values[t]) << '\n';
  return out.str();
}

bool path_dominates(std::span<const double> alpha, std::span<const double> beta, double slack) {
  if (alpha.size() != beta.size()) throw Error("path message vectors differ in size");
  for (std::size_t k = 0; 2 * k < alpha.size(); ++k) {
    double f = alpha[forward(k)] - beta[forward(k)];
    double b = alpha[backward(k)] - beta[backward(k)];
    if (k % 2 == 1) {
      f = -f;
      b = -b;
    }
    if (f < -slack || b > slack) return false;
  }
  return true;
}

void validate(const BoundingConfig& config, const PathSpec& path) {
  validate(path);
  if (config.sign != 1 && config.sign != -1) throw Error("bounding sign must be +1 or -1");
  if (!(config.Delta > 0.0)) throw Error("Delta must be positive");
  if (!(config.delta > 0.0 && config.delta <= config.Delta)) throw Error("delta must lie in (0, Delta]");
  if (config.reference.size() != path.directed_count()) throw Error("reference has the wrong size");
}

namespace {

double parity(std::size_t i) { return i % 2 == 0 ? 1.0 : -1.0; }

std::vector<double> checkerboard(const BoundingConfig& config, double magnitude) {
  std::vector<double> a = config.reference;
  for (std::size_t k = 0; 2 * k < a.size(); ++k) {
    a[forward(k)] += config.sign * parity(k) * magnitude;
    a[backward(k)] -= config.sign * parity(k) * magnitude;
  }
  return a;
}

}  // namespace

std::vector<double> bounding_initial(const BoundingConfig& config) { return checkerboard(config, config.Delta); }

std::vector<double> bounding_closed_form(const BoundingConfig& config) {
  return checkerboard(config, config.Delta - config.delta);
}

Boundary bounding_boundary(const BoundingConfig& config, const PathSpec& path) {
  const std::size_t l = path.length();
  double shift = config.Delta - config.delta;
  return {config.reference[forward(0)] + config.sign * shift,
          config.reference[backward(l - 1)] + config.sign * parity(l) * shift};
}

std::optional<std::size_t> sign_violation(const PathSpec& path, std::span<const double> messages, double slack) {
  for (std::size_t k = 0; k < path.length(); ++k) {
    double surplus = messages[forward(k)] + messages[backward(k)] - path.weights[k];
    if (path.matched[k] ? surplus > slack : surplus < -slack) return k;
  }
  return std::nullopt;
}

BoundingResult bounding_process(const PathSpec& path, const BoundingConfig& config, double kappa,
                                std::int64_t horizon) {
  validate(config, path);
  BoundingResult out;
  auto boundary = bounding_boundary(config, path);
  SimplifiedPathState state{bounding_initial(config), 0};
  out.states.push_back(state.alpha_hat);
  auto check = [&] {
    if (out.signs_held && sign_violation(path, state.alpha_hat)) {
      out.signs_held = false;
      out.first_violation = state.time;
    }
  };
  check();
  for (std::int64_t t = 0; t < horizon; ++t) {
    state = simplified_step(state, path, kappa, boundary);
    out.states.push_back(state.alpha_hat);
    check();
  }
  out.closed_form = bounding_closed_form(config);
  out.closed_form_residual = sup_distance(state.alpha_hat, out.closed_form);
  return out;
}

StructurePath structure_path(const KTDecomposition& decomp, std::size_t q, const Instance& instance) {
  if (q >= decomp.structures.size()) throw Error("no structure with index " + std::to_string(q));
  const auto& s = decomp.structures[q];
  if (s.shape != StructureShape::path) throw Error("structure " + std::to_string(q) + " is not a path");
  std::vector<EdgeId> edges = s.matched_edges;
  edges.insert(edges.end(), s.alternative_edges.begin(), s.alternative_edges.end());
  std::map<NodeId, std::vector<EdgeId>> adj;
  for (auto e : edges) {
    adj[instance.edge(e).u].push_back(e);
    adj[instance.edge(e).v].push_back(e);
  }
  if (adj.size() != edges.size() + 1) throw Error("structure " + std::to_string(q) + " is not a simple path");
  NodeId start = -1;
  for (const auto& [node, list] : adj) {
    if (list.size() > 2) throw Error("structure " + std::to_string(q) + " is not a simple path");
    if (list.size() == 1 && start < 0) start = node;
  }
  if (start < 0) throw Error("structure " + std::to_string(q) + " has no endpoint");
  StructurePath p;
  p.nodes.push_back(start);
  EdgeId previous = static_cast<EdgeId>(-1);
  while (p.edges.size() < edges.size()) {
    NodeId here = p.nodes.back();
    auto it = std::find_if(adj[here].begin(), adj[here].end(), [&](EdgeId e) { return e != previous; });
    if (it == adj[here].end()) throw Error("structure " + std::to_string(q) + " is not connected");
    const auto& ed = instance.edge(*it);
    NodeId next = ed.u == here ? ed.v : ed.u;
    p.edges.push_back(*it);
    p.nodes.push_back(next);
    p.directed.push_back(instance.directed(here, next));
    p.directed.push_back(instance.directed(next, here));
    p.spec.weights.push_back(ed.w);
    p.spec.matched.push_back(std::binary_search(s.matched_edges.begin(), s.matched_edges.end(), *it));
    previous = *it;
  }
  validate(p.spec);
  return p;
}

std::vector<double> restrict_to_path(std::span<const double> alpha, const StructurePath& path) {
  std::vector<double> out(path.directed.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = alpha[path.directed[k]];
  return out;
}

Messages sandwich_initial(const Instance& instance, const KTDecomposition& decomp, const MessageState& fp,
                          std::size_t q, double Delta, double delta) {
  Messages a = fp.alpha;
  const double w = instance.max_weight();
  for (DirectedId d = 0; d < a.size(); ++d) {
    int owner = decomp.structure_of[instance.from(d)];
    bool earlier = owner < static_cast<int>(q);  // unmatched nodes carry -1
    double magnitude = earlier ? Delta - delta : Delta;
    double sign = (Instance::edge_of(d) + (d & 1U)) % 2 == 0 ? 1.0 : -1.0;
    a[d] = std::clamp(a[d] + sign * magnitude, 0.0, w);
  }
  return a;
}

SandwichResult sandwich_test(const Instance& instance, const KTDecomposition& decomp, const MessageState& fp,
                             std::size_t q, const SandwichConfig& config) {
  if (config.Delta > instance.max_weight()) throw Error("Delta exceeds the largest weight");
  if (!decomp.gap) throw Error("sandwich test needs a decomposition with a gap");
  if (!(config.delta > 0.0 && config.delta <= std::min(*decomp.gap, config.Delta))) {
    throw Error("delta must lie in (0, min(gap, Delta)]");
  }
  auto path = structure_path(decomp, q, instance);
  auto reference = restrict_to_path(fp.alpha, path);
  BoundingConfig plus{+1, config.Delta, config.delta, reference};
  BoundingConfig minus{-1, config.Delta, config.delta, reference};
  validate(plus, path.spec);
  auto b_plus = bounding_boundary(plus, path.spec);
  auto b_minus = bounding_boundary(minus, path.spec);
  SimplifiedPathState upper{bounding_initial(plus), 0};
  SimplifiedPathState lower{bounding_initial(minus), 0};

  Messages start = config.initial ? *config.initial : sandwich_initial(instance, decomp, fp, q, config.Delta, config.delta);
  MessageState real = derive(std::move(start), instance);

  SandwichResult out;
  auto check = [&](std::int64_t t) {
    auto on_path = restrict_to_path(real.alpha, path);
    bool ok = path_dominates(upper.alpha_hat, on_path, config.slack) &&
              path_dominates(on_path, lower.alpha_hat, config.slack);
    if (!ok && out.held) {
      out.held = false;
      out.first_violation = t;
    }
    if (sign_violation(path.spec, upper.alpha_hat) || sign_violation(path.spec, lower.alpha_hat)) out.signs_held = false;
  };
  check(0);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    real = step(real, instance, config.kappa);
    upper = simplified_step(upper, path.spec, config.kappa, b_plus);
    lower = simplified_step(lower, path.spec, config.kappa, b_minus);
    check(t);
    out.steps = t;
  }
  return out;
}

Injection parse_injection(const std::string& name) {
  if (name == "none") return Injection::none;
  if (name == "left") return Injection::left;
  if (name == "right") return Injection::right;
  if (name == "both") return Injection::both;
  throw Error("unknown injection '" + name + "' (none, left, right, both)");
}

MassState mass_step(const MassState& mass, const PathSpec& path, double kappa, Injection injection) {
  const std::size_t l = path.length();
  if (mass.rho.size() != path.directed_count()) throw Error("mass state has the wrong size");
  const auto& r = mass.rho;
  MassState next{std::vector<double>(r.size()), mass.time + 1};
  bool left = injection == Injection::left || injection == Injection::both;
  bool right = injection == Injection::right || injection == Injection::both;
  next.rho[forward(0)] = (1 - kappa) * r[forward(0)] + kappa * (left ? 1.0 : 0.0);
  next.rho[backward(l - 1)] = (1 - kappa) * r[backward(l - 1)] + kappa * (right ? 1.0 : 0.0);
  for (std::size_t i = 1; i < l; ++i) {
    // The message leaving i forward carries what arrived over edge i-1: split
    // evenly between both directions of a matched edge, passed on otherwise.
    double in_fwd = path.matched[i - 1] ? 0.5 * (r[forward(i - 1)] + r[backward(i - 1)]) : r[forward(i - 1)];
    double in_bwd = path.matched[i] ? 0.5 * (r[backward(i)] + r[forward(i)]) : r[backward(i)];
    next.rho[forward(i)] = kappa * in_fwd + (1 - kappa) * r[forward(i)];
    next.rho[backward(i - 1)] = kappa * in_bwd + (1 - kappa) * r[backward(i - 1)];
  }
  return next;
}

DominationResult domination_test(const PathSpec& path, double kappa, const Boundary& boundary,
                                 std::span<const double> difference, std::int64_t horizon,
                                 std::span<const double> base, double slack) {
  validate(path);
  if (difference.size() != path.directed_count()) throw Error("difference has the wrong size");
  std::vector<double> start(path.directed_count(), 0.0);
  if (!base.empty()) {
    if (base.size() != start.size()) throw Error("base state has the wrong size");
    start.assign(base.begin(), base.end());
  }
  SimplifiedPathState a{start, 0};
  SimplifiedPathState b{start, 0};
  for (std::size_t k = 0; k < start.size(); ++k) b.alpha_hat[k] += difference[k];
  double sup = 0.0;
  for (double x : difference) sup = std::max(sup, std::abs(x));
  MassState mass{std::vector<double>(start.size(), sup), 0};

  DominationResult out;
  auto check = [&](std::int64_t t) {
    double worst = 0.0;
    for (std::size_t k = 0; k < start.size(); ++k) {
      double gap = std::abs(b.alpha_hat[k] - a.alpha_hat[k]);
      if (gap > mass.rho[k] + slack && out.held) {
        out.held = false;
        out.first_violation = t;
      }
      if (gap > slack && mass.rho[k] > 0.0) worst = std::max(worst, gap / mass.rho[k]);
    }
    out.worst_ratio.push_back(worst);
  };
  check(0);
  for (std::int64_t t = 1; t <= horizon; ++t) {
    a = simplified_step(a, path, kappa, boundary);
    b = simplified_step(b, path, kappa, boundary);
    mass = mass_step(mass, path, kappa, Injection::none);
    check(t);
  }
  return out;
}

}  // namespace nbd
