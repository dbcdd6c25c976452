#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "experiment.hpp"
#include "nbd/bipartite.hpp"
#include "nbd/path_analysis.hpp"
#include "nbd/report.hpp"

namespace {

using namespace nbd;

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct CommonFlags {
  std::string input = "-";
  std::string output = "-";
  double kappa = 0.5;
  double eps = 1e-9;
  std::int64_t max_iters = 1'000'000;
  std::uint64_t seed = 0;
  std::optional<double> margin;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--input", f.input, "instance file, - for standard input");
  cmd->add_option("--output", f.output, "output file, - for standard output");
  cmd->add_option("--kappa", f.kappa, "damping factor in (0,1)");
  cmd->add_option("--eps", f.eps, "convergence or accuracy target");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--margin", f.margin, "pairing margin");
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_double(item));
  }
  return out;
}

DynamicsConfig dynamics_config(const CommonFlags& f) {
  DynamicsConfig c;
  c.kappa = f.kappa;
  c.eps_conv = f.eps;
  c.max_iters = f.max_iters;
  return c;
}

// --- generate ---------------------------------------------------------------

struct GenerateFlags {
  std::string topology = "path";
  int size = 2;
  int stem = 1;
  int cycle = 3;
  int cycle2 = 3;
  int buyers = 2;
  int sellers = 2;
  double probability = 0.5;
  std::string weights;
  std::string base;
  std::optional<double> jitter;
  std::string uniform;
};

int cmd_generate(const CommonFlags& f, const GenerateFlags& g) {
  GeneratorSpec spec;
  spec.topology = parse_topology(g.topology);
  spec.size = g.size;
  spec.stem = g.stem;
  spec.cycle = g.cycle;
  spec.cycle2 = g.cycle2;
  spec.buyers = g.buyers;
  spec.sellers = g.sellers;
  spec.edge_probability = g.probability;
  spec.seed = f.seed;
  if (!g.weights.empty()) {
    spec.weights = ExplicitWeights{parse_list(g.weights)};
  } else if (!g.uniform.empty()) {
    auto range = parse_list(g.uniform);
    if (range.size() != 2) throw Error("--uniform expects lo,hi");
    spec.weights = UniformWeights{range[0], range[1]};
  } else {
    JitteredWeights j;
    if (!g.base.empty()) j.base = parse_list(g.base);
    j.jitter = g.jitter;
    spec.weights = j;
  }
  write_output(f.output, save(generate(spec)));
  return kPass;
}

// --- run --------------------------------------------------------------------

struct RunFlags {
  std::string init = "zeros";
  std::string trace;
  std::string snapshot;
};

int cmd_run(const CommonFlags& f, const RunFlags& r) {
  auto instance = load_file(f.input);
  auto config = dynamics_config(f);
  if (r.init == "zeros") config.init = InitZeros{};
  else if (r.init == "uniform") config.init = InitUniform{f.seed};
  else if (r.init == "top") config.init = InitTop{};
  else if (r.init == "bot") config.init = InitBot{};
  else throw Error("unknown --init '" + r.init + "' (zeros, uniform, top, bot)");
  auto result = run(instance, config, r.trace.empty() ? quiet_trace() : TraceOptions{});
  if (!r.trace.empty()) write_output(r.trace, result.trace.to_csv());
  if (!r.snapshot.empty()) write_output(r.snapshot, snapshot_document(instance, result.state));
  Json report{{"converged", result.converged},
              {"iterations", result.iterations},
              {"residual", fixed_point_residual(result.state, instance)},
              {"gamma", result.state.earnings},
              {"pairing", to_json(extract_pairing(result.state, instance, f.margin.value_or(1e-6)), instance)}};
  write_output(f.output, report.dump(2) + "\n");
  return result.converged ? kPass : kCheckFailed;
}

// --- verify / decompose -----------------------------------------------------

struct CheckList {
  Json rows = Json::array();
  bool passed = true;
  void add(const std::string& name, bool ok, Json detail = nullptr) {
    Json row{{"name", name}, {"passed", ok}};
    if (!detail.is_null()) row["detail"] = std::move(detail);
    rows.push_back(std::move(row));
    passed = passed && ok;
  }
};

LPClassification classify_or_certify(const Instance& instance, const MessageState& state, Json& report) {
  if (instance.node_count() <= 12) return classify(instance);
  auto sol = solution_from_state(state, instance, 1e-6);
  auto cert = certify_tight(instance, sol.gamma, sol.matching, 1e-8);
  report["classification_method"] = "complementary-slackness certificate";
  if (cert) return *cert;
  throw CapExceeded("instance above the enumeration cap and no optimality certificate found");
}

int cmd_verify(const CommonFlags& f) {
  auto instance = load_file(f.input);
  Json report{{"nodes", instance.node_count()}, {"edges", instance.edge_count()}, {"W", instance.max_weight()}};
  CheckList checks;
  auto result = run(instance, dynamics_config(f), quiet_trace());
  report["dynamics"] = {{"converged", result.converged},
                        {"iterations", result.iterations},
                        {"residual", fixed_point_residual(result.state, instance)},
                        {"gamma", result.state.earnings}};
  checks.add("dynamics_converged", result.converged);

  LPClassification cls;
  try {
    cls = classify_or_certify(instance, result.state, report);
  } catch (const CapExceeded& e) {
    auto dual = dual_check(result.state.earnings, instance, std::nullopt, 1e-6);
    checks.add("dual_feasible", dual.feasible, to_json(dual, instance));
    report["note"] = std::string(e.what()) + "; verification limited to dual feasibility";
    report["checks"] = checks.rows;
    report["passed"] = checks.passed;
    write_output(f.output, report.dump(2) + "\n");
    return checks.passed ? kPass : kCheckFailed;
  }
  report["classification"] = to_json(cls, instance);

  if (cls.kind == LPKind::degenerate) {
    auto dual = dual_check(result.state.earnings, instance, std::nullopt, 1e-6);
    checks.add("dual_feasible", dual.feasible, to_json(dual, instance));
    report["note"] = "degenerate LP: verification skipped beyond dual feasibility";
  } else if (result.converged) {
    auto suite = fp_property_suite(result.state, instance, cls);
    report["fixed_point"] = to_json(suite, instance);
    for (const auto& c : suite.checks) checks.add(c.name, c.passed);
    if (cls.kind == LPKind::pointed_not_tight) {
      report["note"] = "pointed, not tight: no NB solution exists; dual optimum certified";
    } else {
      auto sol = solution_from_state(result.state, instance, 1e-6);
      report["solution"] = to_json(sol, instance);
      checks.add("stable", sol.stable);
      checks.add("balanced", sol.balanced);
      if (sol.stable && sol.balanced) {
        try {
          auto fp = fp_from_nb(sol, instance);
          auto decomp = decompose(fp, sol, instance);
          report["decomposition"] = to_json(decomp, instance);
          auto identities = check_fp_identities(decomp, fp, instance);
          report["identities"] = to_json(identities, instance);
          checks.add("structure_identities", identities.passed);
          double margin = f.margin.value_or(decomp.gap ? *decomp.gap / 3 : 1e-6);
          auto pairing = extract_pairing(result.state, instance, margin);
          report["pairing"] = to_json(pairing, instance);
          report["pairing"]["margin"] = margin;
          checks.add("pairing_matches_optimum", pairing.pairs == sol.matching && pairing.ambiguous.empty());
        } catch (const Error& e) {
          checks.add("decomposition", false, e.what());
        }
      }
    }
  }
  report["checks"] = checks.rows;
  report["passed"] = checks.passed;
  write_output(f.output, report.dump(2) + "\n");
  return checks.passed ? kPass : kCheckFailed;
}

int cmd_decompose(const CommonFlags& f) {
  auto instance = load_file(f.input);
  DynamicsConfig config = dynamics_config(f);
  config.eps_conv = std::min(config.eps_conv, 1e-12);
  auto result = run(instance, config, quiet_trace());
  if (!result.converged) throw Error("dynamics did not converge; no solution to decompose");
  auto sol = solution_from_state(result.state, instance, 1e-6);
  if (!sol.stable || !sol.balanced) {
    Json report{{"solution", to_json(sol, instance)}, {"error", "limit is not a stable, balanced outcome"}};
    write_output(f.output, report.dump(2) + "\n");
    return kCheckFailed;
  }
  auto fp = fp_from_nb(sol, instance);
  auto decomp = decompose(fp, sol, instance);
  auto identities = check_fp_identities(decomp, fp, instance);
  Json report{{"solution", to_json(sol, instance)},
              {"decomposition", to_json(decomp, instance)},
              {"identities", to_json(identities, instance)}};
  write_output(f.output, report.dump(2) + "\n");
  return identities.passed ? kPass : kCheckFailed;
}

// --- experiment -------------------------------------------------------------

struct ExperimentFlags {
  std::string topology = "path";
  std::string sizes = "5,10,20";
  int repetitions = 1;
  int cycle = 3;
  int cycle2 = 3;
  std::string uniform = "1,10";
  double c_ref = 1.0;
  double min_gap = 0.05;
};

int cmd_experiment(const CommonFlags& f, const ExperimentFlags& x) {
  ExperimentSpec spec;
  spec.family.topology = parse_topology(x.topology);
  spec.family.cycle = x.cycle;
  spec.family.cycle2 = x.cycle2;
  spec.family.seed = f.seed;
  auto range = parse_list(x.uniform);
  if (range.size() != 2) throw Error("--uniform expects lo,hi");
  spec.family.weights = UniformWeights{range[0], range[1]};
  for (double s : parse_list(x.sizes)) spec.sizes.push_back(static_cast<int>(s));
  spec.repetitions = x.repetitions;
  spec.eps = f.eps;
  spec.kappa = f.kappa;
  spec.c_ref = x.c_ref;
  spec.min_gap = x.min_gap;
  spec.max_iters = f.max_iters;
  auto result = run_experiment(spec);
  write_output(f.output, result.csv());
  Json fit{{"fit", "log(iterations_to_eps) = slope * log(n) + intercept"},
           {"slope", result.fit.slope},
           {"intercept", result.fit.intercept},
           {"points", result.fit.points}};
  (f.output == "-" ? std::cerr : std::cout) << fit.dump(2) << "\n";
  bool all = std::all_of(result.rows.begin(), result.rows.end(), [](const ExperimentRow& r) { return r.iterations; });
  return all ? kPass : kCheckFailed;
}

// --- bipartite --------------------------------------------------------------

int cmd_bipartite(const CommonFlags& f) {
  auto instance = load_file(f.input);
  auto check = check_bipartite(instance);
  if (!check.partition) {
    Json report{{"bipartite", false}, {"odd_cycle", check.odd_cycle}};
    write_output(f.output, report.dump(2) + "\n");
    return kCheckFailed;
  }
  const auto& part = *check.partition;
  auto config = dynamics_config(f);
  Json report{{"bipartite", true}, {"buyers", part.buyers}, {"sellers", part.sellers}};
  bool ok = true;
  std::optional<OracleResult> oracle;
  if (instance.node_count() <= 10) oracle = nb_oracle(instance);
  Json sides = Json::array();
  for (Side side : {Side::buyer, Side::seller}) {
    auto ext = run_extremal(instance, part, side, config);
    Json row{{"side", to_string(side)},
             {"iterations", ext.iterations},
             {"solution", to_json(ext.solution, instance)},
             {"monotone", !ext.monotonicity_violation}};
    ok = ok && !ext.monotonicity_violation && ext.solution.stable && ext.solution.balanced;
    if (oracle) {
      std::size_t dominated = 0;
      for (const auto& sol : oracle->solutions) {
        auto alpha = fp_from_nb(sol, instance).alpha;
        bool dom = side == Side::buyer ? order_leq(alpha, ext.state.alpha, instance, part, 1e-6)
                                       : order_leq(ext.state.alpha, alpha, instance, part, 1e-6);
        dominated += dom ? 1 : 0;
      }
      row["dominance"] = {{"oracle_solutions", oracle->solutions.size()}, {"dominated", dominated}};
      ok = ok && dominated == oracle->solutions.size();
    }
    sides.push_back(std::move(row));
  }
  report["extremal"] = std::move(sides);
  if (oracle) report["oracle_family"] = oracle->family;
  report["passed"] = ok;
  write_output(f.output, report.dump(2) + "\n");
  return ok ? kPass : kCheckFailed;
}

// --- pathlab ----------------------------------------------------------------

struct PathFlags {
  std::string mode = "simplified";
  std::string weights = "1";
  bool second_matched = false;
  double left = 0.0;
  double right = 0.0;
  std::int64_t horizon = 10'000;
  double Delta = 0.4;
  double delta = 0.2;
  int sign = 1;
  std::string reference;
  std::string injection = "none";
};

int cmd_pathlab(const CommonFlags& f, const PathFlags& p) {
  auto path = alternating_path(parse_list(p.weights), !p.second_matched);
  Boundary boundary{p.left, p.right};
  Rng rng(f.seed);
  if (p.mode == "simplified") {
    std::vector<double> initial(path.directed_count());
    for (auto& x : initial) x = rng.uniform(-1.0, 1.0);
    auto run = run_simplified(path, f.kappa, boundary, initial, p.horizon);
    write_output(f.output, series_csv(run.error));
    return run.converged ? kPass : kCheckFailed;
  }
  if (p.mode == "bounding") {
    BoundingConfig config{p.sign, p.Delta, p.delta,
                          p.reference.empty() ? simplified_fixed_point(path, boundary) : parse_list(p.reference)};
    auto result = bounding_process(path, config, f.kappa, p.horizon);
    std::vector<double> distance;
    for (const auto& s : result.states) distance.push_back(sup_distance(s, result.closed_form));
    write_output(f.output, series_csv(distance));
    return result.signs_held ? kPass : kCheckFailed;
  }
  if (p.mode == "mass") {
    MassState mass{std::vector<double>(path.directed_count(), 1.0), 0};
    auto injection = parse_injection(p.injection);
    std::vector<double> total{std::accumulate(mass.rho.begin(), mass.rho.end(), 0.0)};
    for (std::int64_t t = 0; t < p.horizon; ++t) {
      mass = mass_step(mass, path, f.kappa, injection);
      total.push_back(std::accumulate(mass.rho.begin(), mass.rho.end(), 0.0));
    }
    write_output(f.output, series_csv(total));
    return kPass;
  }
  if (p.mode == "domination") {
    std::vector<double> difference(path.directed_count());
    for (auto& x : difference) x = rng.uniform(-1.0, 1.0);
    auto result = domination_test(path, f.kappa, boundary, difference, p.horizon);
    write_output(f.output, series_csv(result.worst_ratio));
    return result.held ? kPass : kCheckFailed;
  }
  throw Error("unknown --mode '" + p.mode + "' (simplified, bounding, mass, domination)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural bargaining dynamics: simulation and verification"};
  app.require_subcommand(1);
  CommonFlags common;

  auto* gen = app.add_subcommand("generate", "generate an instance");
  GenerateFlags gf;
  add_common(gen, common);
  gen->add_option("--topology", gf.topology, "path, even_cycle, odd_cycle, blossom, bicycle, bipartite_random, erdos_renyi");
  gen->add_option("--size,--len", gf.size, "node count for paths, cycles and random graphs");
  gen->add_option("--stem", gf.stem, "blossom stem / bicycle connecting path edges");
  gen->add_option("--cycle", gf.cycle, "blossom cycle / first bicycle cycle length");
  gen->add_option("--cycle2", gf.cycle2, "second bicycle cycle length");
  gen->add_option("--buyers", gf.buyers);
  gen->add_option("--sellers", gf.sellers);
  gen->add_option("--p", gf.probability, "edge probability");
  gen->add_option("--weights", gf.weights, "explicit weights, comma separated");
  gen->add_option("--base", gf.base, "base weights for jitter, comma separated");
  gen->add_option("--jitter", gf.jitter, "jitter magnitude");
  gen->add_option("--uniform", gf.uniform, "uniform weights lo,hi");

  auto* run_cmd = app.add_subcommand("run", "run the dynamics");
  RunFlags rf;
  add_common(run_cmd, common);
  run_cmd->add_option("--init", rf.init, "zeros, uniform, top, bot");
  run_cmd->add_option("--trace", rf.trace, "trace CSV path");
  run_cmd->add_option("--snapshot", rf.snapshot, "final state document path");

  auto* verify = app.add_subcommand("verify", "run and certify the fixed point");
  add_common(verify, common);

  auto* decomp = app.add_subcommand("decompose", "structure decomposition of the solution");
  add_common(decomp, common);

  auto* exp = app.add_subcommand("experiment", "convergence scaling sweep");
  ExperimentFlags xf;
  add_common(exp, common);
  exp->add_option("--topology", xf.topology);
  exp->add_option("--sizes", xf.sizes, "node counts, comma separated");
  exp->add_option("--reps", xf.repetitions);
  exp->add_option("--cycle", xf.cycle);
  exp->add_option("--cycle2", xf.cycle2);
  exp->add_option("--uniform", xf.uniform, "weight range lo,hi");
  exp->add_option("--c-ref", xf.c_ref, "reference constant for t_star_reference");
  exp->add_option("--min-gap", xf.min_gap);
  exp->footer("--eps defaults to 1e-4 here: the accuracy target on earnings.");

  auto* bip = app.add_subcommand("bipartite", "extremal runs on a bipartite instance");
  add_common(bip, common);

  auto* lab = app.add_subcommand("pathlab", "simplified path dynamics, bounding and mass processes");
  PathFlags pf;
  add_common(lab, common);
  lab->add_option("--mode", pf.mode, "simplified, bounding, mass, domination");
  lab->add_option("--weights", pf.weights, "path weights, comma separated");
  lab->add_flag("--second-matched", pf.second_matched, "match odd-indexed edges instead of even ones");
  lab->add_option("--bl", pf.left, "left boundary");
  lab->add_option("--br", pf.right, "right boundary");
  lab->add_option("--horizon", pf.horizon);
  lab->add_option("--Delta", pf.Delta);
  lab->add_option("--delta", pf.delta);
  lab->add_option("--sign", pf.sign);
  lab->add_option("--reference", pf.reference, "reference messages, comma separated");
  lab->add_option("--injection", pf.injection, "none, left, right, both");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*gen) return cmd_generate(common, gf);
    if (*run_cmd) return cmd_run(common, rf);
    if (*verify) return cmd_verify(common);
    if (*decomp) return cmd_decompose(common);
    if (*exp) {
      if (exp->get_option("--eps")->count() == 0) common.eps = 1e-4;
      return cmd_experiment(common, xf);
    }
    if (*bip) return cmd_bipartite(common);
    if (*lab) return cmd_pathlab(common, pf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
