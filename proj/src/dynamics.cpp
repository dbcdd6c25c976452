#include "nbd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "nbd/bipartite.hpp"

namespace nbd {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Best and second-best incoming offer per node, with the argmax incidence.
struct TopTwo {
  double best = 0.0;
  double second = 0.0;
  DirectedId best_in = static_cast<DirectedId>(-1);
};

std::vector<TopTwo> top_two(const Messages& offers, const Instance& instance) {
  std::vector<TopTwo> out(instance.node_count());
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    auto& t = out[i];
    bool have = false;
    for (const auto& inc : instance.neighbors(i)) {
      double m = offers[inc.in];
      if (!have || m > t.best) {
        if (have) t.second = t.best;
        t.best = m;
        t.best_in = inc.in;
        have = true;
      } else if (m > t.second) {
        t.second = m;
      }
    }
  }
  return out;
}

// max_{k in di \ j} m_{k->i} for the directed edge out = i->j.
double best_excluding(const TopTwo& t, DirectedId out) {
  return Instance::reverse(out) == t.best_in ? t.second : t.best;
}

}  // namespace

double compute_offer(double w, double a_ij, double a_ji) {
  return positive_part(w - a_ij) - 0.5 * positive_part(w - a_ij - a_ji);
}

MessageState derive(Messages alpha, const Instance& instance, std::int64_t time) {
  if (alpha.size() != instance.directed_count()) {
    throw Error("message vector has " + std::to_string(alpha.size()) + " entries, expected " +
                std::to_string(instance.directed_count()) + " (missing directed edge entry)");
  }
  MessageState s;
  s.time = time;
  s.offers.resize(alpha.size());
  for (DirectedId d = 0; d < alpha.size(); ++d) {
    s.offers[d] = compute_offer(instance.weight(d), alpha[d], alpha[Instance::reverse(d)]);
  }
  s.earnings.assign(instance.node_count(), 0.0);
  for (NodeId i = 0; i < instance.node_count(); ++i) {
    for (const auto& inc : instance.neighbors(i)) s.earnings[i] = std::max(s.earnings[i], s.offers[inc.in]);
  }
  s.alpha = std::move(alpha);
  return s;
}

void validate(const DynamicsConfig& config) {
  if (!(config.kappa > 0.0 && config.kappa < 1.0)) throw Error("kappa must lie in (0,1)");
  if (!(config.eps_conv >= 0.0)) throw Error("eps_conv must be non-negative");
  if (config.max_iters <= 0) throw Error("max_iters must be positive");
}

Messages initial_messages(const Instance& instance, const InitialCondition& init) {
  const std::size_t size = instance.directed_count();
  if (std::holds_alternative<InitZeros>(init)) return Messages(size, 0.0);
  if (const auto* u = std::get_if<InitUniform>(&init)) {
    Rng rng(u->seed);
    Messages a(size);
    for (auto& x : a) x = rng.uniform(0.0, instance.max_weight());
    return a;
  }
  if (const auto* ex = std::get_if<InitExplicit>(&init)) {
    if (ex->alpha.size() != size) throw Error("explicit initial condition has the wrong size");
    return ex->alpha;
  }
  auto part = check_bipartite(instance);
  if (!part.partition) throw Error("extremal initial condition needs a bipartite instance");
  auto side = std::holds_alternative<InitTop>(init) ? Side::buyer : Side::seller;
  return extremal_init(instance, *part.partition, side);
}

MessageState step(const MessageState& state, const Instance& instance, double kappa) {
  auto best = top_two(state.offers, instance);
  Messages next(state.alpha.size());
  for (DirectedId d = 0; d < next.size(); ++d) {
    double target = best_excluding(best[instance.from(d)], d);
    next[d] = kappa * target + (1.0 - kappa) * state.alpha[d];
  }
  return derive(std::move(next), instance, state.time + 1);
}

MessageState step(const MessageState& state, const Instance& instance, const DynamicsConfig& config) {
  return step(state, instance, config.kappa);
}

double fixed_point_residual(const MessageState& state, const Instance& instance) {
  auto best = top_two(state.offers, instance);
  double r = 0.0;
  for (DirectedId d = 0; d < state.alpha.size(); ++d) {
    r = std::max(r, std::abs(best_excluding(best[instance.from(d)], d) - state.alpha[d]));
  }
  return r;
}

std::string Trace::to_csv() const {
  std::ostringstream out;
  out << "t,step_change,u_g,u_gf\n";
  for (const auto& r : records) {
    out << r.t << ',' << format_double(r.step_change) << ',';
    if (r.u_g) out << format_double(*r.u_g);
    out << ',';
    if (r.u_gf) out << format_double(*r.u_gf);
    out << '\n';
  }
  return out.str();
}

RunResult run(const Instance& instance, const DynamicsConfig& config, const TraceOptions& options) {
  validate(config);
  if (options.reference && options.reference->size() != instance.directed_count()) {
    throw Error("reference fixed point has the wrong size");
  }
  RunResult result;
  result.state = derive(initial_messages(instance, config.init), instance);
  const double threshold = config.kappa * config.eps_conv;
  for (std::int64_t it = 0; it < config.max_iters; ++it) {
    MessageState next = step(result.state, instance, config.kappa);
    double change = sup_distance(next.alpha, result.state.alpha);
    result.state = std::move(next);
    result.iterations = it + 1;
    const auto t = result.state.time;
    bool record = options.record_every > 0 && t % options.record_every == 0;
    bool snap = options.snapshot_every > 0 && t % options.snapshot_every == 0;
    if (record || snap) {
      TraceRecord rec;
      rec.t = t;
      rec.step_change = change;
      if (options.reference) {
        rec.u_g = sup_distance(result.state.alpha, *options.reference);
        if (!options.subgraph.empty()) {
          rec.u_gf = sup_distance(result.state.alpha, *options.reference, options.subgraph);
        }
      }
      if (snap) rec.snapshot = result.state.alpha;
      result.trace.records.push_back(std::move(rec));
    }
    if (change <= threshold) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Pairing extract_pairing(const MessageState& state, const Instance& instance, double margin) {
  const int n = instance.node_count();
  std::vector<NodeId> partner(n, -1);
  Pairing out;
  for (NodeId i = 0; i < n; ++i) {
    double best = 0.0, second = 0.0;
    NodeId arg = -1;
    for (const auto& inc : instance.neighbors(i)) {
      double m = state.offers[inc.in];
      if (arg < 0 || m > best) {
        if (arg >= 0) second = best;
        best = m;
        arg = inc.neighbor;
      } else if (m > second) {
        second = m;
      }
    }
    if (arg < 0 || best <= margin) {
      out.unpaired.push_back(i);
    } else if (best - second > margin) {
      partner[i] = arg;
    } else {
      out.ambiguous.push_back(i);
    }
  }
  for (EdgeId e = 0; e < instance.edge_count(); ++e) {
    const auto& ed = instance.edge(e);
    if (partner[ed.u] == ed.v && partner[ed.v] == ed.u) out.pairs.push_back(e);
  }
  return out;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("message vectors have different domains");
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

double sup_distance(std::span<const double> a, std::span<const double> b, std::span<const DirectedId> subset) {
  if (a.size() != b.size()) throw Error("message vectors have different domains");
  double d = 0.0;
  for (auto k : subset) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

std::string snapshot_document(const Instance& instance, const MessageState& state) {
  std::ostringstream out;
  out << "  \"alpha\": [";
  for (DirectedId d = 0; d < state.alpha.size(); ++d) {
    out << (d == 0 ? "\n" : ",\n") << "    {\"from\": " << instance.from(d) << ", \"to\": " << instance.to(d)
        << ", \"value\": \"" << format_double(state.alpha[d]) << "\"}";
  }
  out << (state.alpha.empty() ? "]" : "\n  ]");
  return save(instance, out.str());
}

Messages alpha_from_snapshot(const std::string& text, const Instance& instance) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.contains("alpha") || !doc["alpha"].is_array()) {
    throw Error("parse error: snapshot needs an 'alpha' array");
  }
  Messages alpha(instance.directed_count(), 0.0);
  std::vector<bool> seen(alpha.size(), false);
  for (const auto& item : doc["alpha"]) {
    auto d = instance.directed(item.at("from").get<int>(), item.at("to").get<int>());
    const auto& v = item.at("value");
    alpha[d] = v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>();
    seen[d] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw Error("missing directed edge entry in snapshot");
  return alpha;
}

}  // namespace nbd
