#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nbd/instance.hpp"

namespace fixtures {

// Path 0-1-2 with weights 2 and 1.
inline nbd::Instance e2() { return nbd::Instance(3, {{0, 1, 2.0}, {1, 2, 1.0}}); }

// Unit triangle.
inline nbd::Instance t1() { return nbd::Instance(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }

// Path 0-1-2-3 with weights 2, 1.5, 0.8.
inline nbd::Instance e4() { return nbd::Instance(4, {{0, 1, 2.0}, {1, 2, 1.5}, {2, 3, 0.8}}); }

// Four-cycle with alternating weights 3 and 1.
inline nbd::Instance e3() { return nbd::Instance(4, {{0, 1, 3.0}, {1, 2, 1.0}, {2, 3, 3.0}, {0, 3, 1.0}}); }

// Four-cycle with alternating weights 10 and 9.
inline nbd::Instance b1() { return nbd::Instance(4, {{0, 1, 10.0}, {1, 2, 9.0}, {2, 3, 10.0}, {0, 3, 9.0}}); }

inline nbd::Instance single_edge(double w = 1.0) { return nbd::Instance(2, {{0, 1, w}}); }

// Path 0-1-2 with two unit edges.
inline nbd::Instance equal_path() { return nbd::Instance(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

// Messages at the E2 fixed point, in directed-id order (0->1, 1->0, 1->2, 2->1).
inline std::vector<double> e2_alpha() { return {0.0, 1.0, 1.5, 0.0}; }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace fixtures
