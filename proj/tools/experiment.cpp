#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nbd {

PrepareOutcome prepare_instance(const Instance& instance, const PrepareOptions& options) {
  PrepareOutcome out;
  auto reject = [&](std::string why) {
    out.rejection = std::move(why);
    return out;
  };
  DynamicsConfig config;
  config.kappa = options.kappa;
  config.eps_conv = options.eps_conv;
  config.max_iters = options.max_iters;
  auto run_result = run(instance, config, quiet_trace());
  if (!run_result.converged) return reject("dynamics did not converge");

  auto sol = solution_from_state(run_result.state, instance, 1e-6);
  if (!sol.stable || !sol.balanced) return reject("limit is not a stable, balanced outcome");

  LPClassification cls;
  if (instance.node_count() <= options.enumeration_cap) {
    cls = classify(instance, {.size_cap = options.enumeration_cap});
    if (cls.kind != LPKind::tight) return reject("LP is " + to_string(cls.kind));
    std::vector<EdgeId> support = cls.optimum.support();
    if (support != sol.matching) return reject("limit matching differs from the LP optimum");
  } else {
    auto cert = certify_tight(instance, sol.gamma, sol.matching, 1e-8);
    if (!cert) return reject("no complementary-slackness certificate for a unique integral optimum");
    cls = *cert;
  }

  PreparedInstance p{instance, cls, sol, fp_from_nb(sol, instance), {}, 0.0, false};
  if (fixed_point_residual(p.fixed_point, instance) > 1e-9) return reject("constructed state is not a fixed point");
  try {
    p.decomposition = decompose(p.fixed_point, sol, instance);
  } catch (const Error& e) {
    return reject(std::string("decomposition failed: ") + e.what());
  }
  if (!p.decomposition.gap) return reject("cycle structure: no gap");
  p.gap = *p.decomposition.gap;
  if (p.gap < options.min_gap) return reject("gap " + format_double(p.gap) + " below " + format_double(options.min_gap));

  if (instance.node_count() <= options.oracle_cap) {
    auto oracle = nb_oracle(instance, {.size_cap = options.oracle_cap});
    if (oracle.family || oracle.solutions.size() != 1) return reject("oracle does not find a unique solution");
    const auto& ref = oracle.solutions.front();
    if (ref.matching != sol.matching) return reject("oracle matching disagrees");
    double diff = 0.0;
    for (std::size_t i = 0; i < ref.gamma.size(); ++i) diff = std::max(diff, std::abs(ref.gamma[i] - sol.gamma[i]));
    if (diff > 1e-6) return reject("oracle allocation disagrees by " + format_double(diff));
    p.oracle_checked = true;
  }
  out.prepared = std::move(p);
  return out;
}

std::optional<std::int64_t> iterations_to_eps(const Instance& instance, std::span<const double> reference,
                                              double eps, double kappa, std::int64_t max_iters) {
  auto within = [&](const MessageState& s) { return sup_distance(s.earnings, reference) <= eps; };
  MessageState state = derive(Messages(instance.directed_count(), 0.0), instance);
  if (within(state)) return 0;
  for (std::int64_t t = 1; t <= max_iters; ++t) {
    state = step(state, instance, kappa);
    if (within(state)) return t;
  }
  return std::nullopt;
}

GeneratorSpec sized_spec(GeneratorSpec spec, int n) {
  switch (spec.topology) {
    case Topology::blossom:
      spec.stem = n - spec.cycle;
      break;
    case Topology::bicycle:
      spec.stem = n - spec.cycle - spec.cycle2 + 1;
      break;
    case Topology::bipartite_random:
      spec.buyers = (n + 1) / 2;
      spec.sellers = n / 2;
      break;
    default:
      spec.size = n;
      break;
  }
  return spec;
}

LogLogFit fit_loglog(const std::vector<ExperimentRow>& rows) {
  LogLogFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    if (!r.iterations || *r.iterations <= 0) continue;
    double x = std::log(static_cast<double>(r.n)), y = std::log(static_cast<double>(*r.iterations));
    ++fit.points;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(fit.points);
  double denom = n * sxx - sx * sx;
  if (fit.points >= 2 && denom > 0) {
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  return fit;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.sizes.empty()) throw Error("experiment needs at least one size");
  for (std::size_t k = 1; k < spec.sizes.size(); ++k) {
    if (spec.sizes[k] <= spec.sizes[k - 1]) throw Error("experiment sizes must be strictly increasing");
  }
  if (spec.repetitions < 1) throw Error("repetitions must be at least 1");
  ExperimentResult result;
  for (int n : spec.sizes) {
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      std::optional<PreparedInstance> prepared;
      std::uint64_t seed = 0;
      int attempts = 0;
      for (; attempts < spec.max_regenerations && !prepared; ++attempts) {
        GeneratorSpec g = sized_spec(spec.family, n);
        seed = spec.family.seed + 1'000'003ULL * static_cast<std::uint64_t>(n) +
               10'007ULL * static_cast<std::uint64_t>(rep) + static_cast<std::uint64_t>(attempts);
        g.seed = seed;
        prepared = prepare_instance(generate(g), {.kappa = spec.kappa, .min_gap = spec.min_gap}).prepared;
      }
      if (!prepared) {
        throw Error("no admissible instance of size " + std::to_string(n) + " after " +
                    std::to_string(spec.max_regenerations) + " seeds");
      }
      ExperimentRow row;
      row.n = n;
      row.W = prepared->instance.max_weight();
      row.sigma = prepared->gap;
      row.eps = spec.eps;
      row.iterations = iterations_to_eps(prepared->instance, prepared->solution.gamma, spec.eps, spec.kappa,
                                         spec.max_iters);
      row.t_star_reference = spec.c_ref * std::pow(static_cast<double>(n), 7) *
                             (row.W / row.sigma + std::log(1.0 + row.sigma / row.eps));
      row.seed = seed;
      row.regenerated = attempts - 1;
      result.rows.push_back(row);
    }
  }
  result.fit = fit_loglog(result.rows);
  return result;
}

std::string ExperimentResult::csv() const {
  std::ostringstream out;
  out << "n,W,sigma,eps,iterations_to_eps,t_star_reference,seed,regenerated,converged\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_double(r.W) << ',' << format_double(r.sigma) << ',' << format_double(r.eps) << ',';
    if (r.iterations) out << *r.iterations;
    out << ',' << format_double(r.t_star_reference) << ',' << r.seed << ',' << r.regenerated << ','
        << (r.iterations ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace nbd
