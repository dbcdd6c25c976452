#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nbd/instance.hpp"

namespace nbd {

// One value per directed edge, indexed by DirectedId.
using Messages = std::vector<double>;

// Nash-split offer from i to j given the two best-alternative messages.
// (w - a_ij)_+ - (w - a_ij - a_ji)_+ / 2, always in [0, w] for a_ij, a_ji >= 0.
double compute_offer(double w, double a_ij, double a_ji);

struct MessageState {
  Messages alpha;                // alpha[i->j]: i's best alternative, told to j
  Messages offers;               // offers[i->j]
  std::vector<double> earnings;  // gamma_i = max incoming offer (0 if isolated)
  std::int64_t time = 0;
};

// Fills offers and earnings from alpha. Throws if alpha does not cover every
// directed edge.
MessageState derive(Messages alpha, const Instance& instance, std::int64_t time = 0);

struct InitZeros {};
struct InitUniform {
  std::uint64_t seed = 0;
};
struct InitExplicit {
  Messages alpha;
};
// Extremal initial conditions on bipartite instances (buyers hold W).
struct InitTop {};
struct InitBot {};
using InitialCondition = std::variant<InitZeros, InitUniform, InitExplicit, InitTop, InitBot>;

struct DynamicsConfig {
  double kappa = 0.5;
  double eps_conv = 1e-9;
  std::int64_t max_iters = 1'000'000;
  InitialCondition init = InitZeros{};
};

void validate(const DynamicsConfig& config);
Messages initial_messages(const Instance& instance, const InitialCondition& init);

// One synchronous damped update.
MessageState step(const MessageState& state, const Instance& instance, double kappa);
MessageState step(const MessageState& state, const Instance& instance, const DynamicsConfig& config);

// Residual of the undamped update map: max over directed edges of
// |max_{k in di \ j} m_{k->i} - alpha_{i->j}|. Zero exactly at fixed points.
double fixed_point_residual(const MessageState& state, const Instance& instance);

struct TraceRecord {
  std::int64_t t = 0;       // time of the state after the step
  double step_change = 0;   // |alpha^t - alpha^{t-1}|_inf
  std::optional<double> u_g;
  std::optional<double> u_gf;
  std::optional<Messages> snapshot;
};

struct TraceOptions {
  // Reference fixed point for U_G and U_{G,F}.
  std::optional<Messages> reference;
  // Directed edges of F for U_{G,F}; empty means the column stays blank.
  std::vector<DirectedId> subgraph;
  std::int64_t record_every = 1;    // 0 disables per-step records
  std::int64_t snapshot_every = 0;  // 0 disables snapshots
};

// Options recording nothing, for runs that only need the final state.
inline TraceOptions quiet_trace() {
  TraceOptions t;
  t.record_every = 0;
  return t;
}

struct Trace {
  std::vector<TraceRecord> records;
  std::string to_csv() const;
};

struct RunResult {
  MessageState state;
  std::int64_t iterations = 0;
  Trace trace;
  bool converged = false;
};

// Iterates until |alpha^{t+1} - alpha^t|_inf <= kappa * eps_conv or max_iters.
RunResult run(const Instance& instance, const DynamicsConfig& config, const TraceOptions& trace = {});

struct Pairing {
  std::vector<EdgeId> pairs;
  std::vector<NodeId> ambiguous;
  std::vector<NodeId> unpaired;
};

Pairing extract_pairing(const MessageState& state, const Instance& instance, double margin);

double sup_distance(std::span<const double> a, std::span<const double> b);
// Max over the listed coordinates only.
double sup_distance(std::span<const double> a, std::span<const double> b, std::span<const DirectedId> subset);

// Instance document extended with an "alpha" array of {from, to, value}.
std::string snapshot_document(const Instance& instance, const MessageState& state);
Messages alpha_from_snapshot(const std::string& text, const Instance& instance);

}  // namespace nbd
