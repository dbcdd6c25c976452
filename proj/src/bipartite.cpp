#include "nbd/bipartite.hpp"

#include <algorithm>
#include <deque>

namespace nbd {

BipartiteCheck check_bipartite(const Instance& instance) {
  const int n = instance.node_count();
  std::vector<int> color(n, -1);
  std::vector<NodeId> parent(n, -1);
  std::vector<int> depth(n, 0);
  BipartiteCheck out;
  for (NodeId root = 0; root < n; ++root) {
    if (color[root] >= 0) continue;
    color[root] = 0;
    std::deque<NodeId> queue{root};
    while (!queue.empty()) {
      NodeId i = queue.front();
      queue.pop_front();
      for (const auto& inc : instance.neighbors(i)) {
        NodeId j = inc.neighbor;
        if (color[j] < 0) {
          color[j] = 1 - color[i];
          parent[j] = i;
          depth[j] = depth[i] + 1;
          queue.push_back(j);
        } else if (color[j] == color[i]) {
          // Odd cycle: walk both BFS-tree branches up to their meeting point.
          std::vector<NodeId> left{i}, right{j};
          NodeId a = i, b = j;
          while (a != b) {
            if (depth[a] >= depth[b]) {
              a = parent[a];
              left.push_back(a);
            } else {
              b = parent[b];
              right.push_back(b);
            }
          }
          right.pop_back();
          std::reverse(right.begin(), right.end());
          left.insert(left.end(), right.begin(), right.end());
          // Start the witness at its smallest node for a stable report.
          auto lo = std::min_element(left.begin(), left.end());
          std::rotate(left.begin(), lo, left.end());
          if (left.size() > 2 && left[1] > left.back()) std::reverse(left.begin() + 1, left.end());
          out.odd_cycle = std::move(left);
          return out;
        }
      }
    }
  }
  Bipartition part;
  part.is_buyer.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    part.is_buyer[i] = color[i] == 0;
    (color[i] == 0 ? part.buyers : part.sellers).push_back(i);
  }
  out.partition = std::move(part);
  return out;
}

bool order_leq(const Messages& beta, const Messages& alpha, const Instance& instance, const Bipartition& part,
               double slack) {
  if (alpha.size() != instance.directed_count() || beta.size() != instance.directed_count()) {
    throw Error("message vectors do not match the instance");
  }
  for (DirectedId d = 0; d < alpha.size(); ++d) {
    if (part.is_buyer[instance.from(d)]) {
      if (alpha[d] < beta[d] - slack) return false;
    } else if (alpha[d] > beta[d] + slack) {
      return false;
    }
  }
  return true;
}

Messages extremal_init(const Instance& instance, const Bipartition& part, Side side) {
  const double w = instance.max_weight();
  Messages alpha(instance.directed_count());
  for (DirectedId d = 0; d < alpha.size(); ++d) {
    bool buyer_sends = part.is_buyer[instance.from(d)];
    alpha[d] = (buyer_sends == (side == Side::buyer)) ? w : 0.0;
  }
  return alpha;
}

ExtremalResult run_extremal(const Instance& instance, const Bipartition& part, Side side, DynamicsConfig config) {
  validate(config);
  ExtremalResult out{side, {}, derive(extremal_init(instance, part, side), instance), 0, false, std::nullopt};
  const double threshold = config.kappa * config.eps_conv;
  for (std::int64_t it = 0; it < config.max_iters; ++it) {
    MessageState next = step(out.state, instance, config.kappa);
    // From alpha^top the trajectory only descends in the order; from
    // alpha^bot it only ascends.
    bool monotone = side == Side::buyer ? order_leq(next.alpha, out.state.alpha, instance, part, 1e-12)
                                        : order_leq(out.state.alpha, next.alpha, instance, part, 1e-12);
    if (!monotone && !out.monotonicity_violation) out.monotonicity_violation = next.time;
    double change = sup_distance(next.alpha, out.state.alpha);
    out.state = std::move(next);
    out.iterations = it + 1;
    if (change <= threshold) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    throw Error("extremal run did not converge within " + std::to_string(config.max_iters) + " iterations");
  }
  out.solution = solution_from_state(out.state, instance, 1e-6);
  return out;
}

std::string to_string(Side side) { return side == Side::buyer ? "buyer" : "seller"; }

}  // namespace nbd
