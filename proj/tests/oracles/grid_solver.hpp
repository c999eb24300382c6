#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "evschema/softlogic.hpp"

namespace oracle {

/// Exhaustive search of the hinge objective over a grid of [0,1]^n, then
/// successive grid refinement around the best point. Only for n <= 4.
inline std::map<evschema::Atom, double> grid_minimize(const evschema::SoftLogicProgram& p,
                                                      int steps = 20, int rounds = 6) {
  const std::size_t n = p.targets.size();
  std::vector<double> lo(n, 0.0), hi(n, 1.0), best(n, 0.0);
  double best_obj = std::numeric_limits<double>::infinity();
  std::map<evschema::Atom, double> x;
  for (int round = 0; round < rounds; ++round) {
    std::vector<int> k(n, 0);
    while (true) {
      for (std::size_t i = 0; i < n; ++i)
        x[p.targets[i]] = lo[i] + (hi[i] - lo[i]) * k[i] / static_cast<double>(steps);
      const double obj = evschema::hinge_objective(p, x);
      if (obj < best_obj) {
        best_obj = obj;
        for (std::size_t i = 0; i < n; ++i) best[i] = x[p.targets[i]];
      }
      std::size_t i = 0;
      while (i < n && ++k[i] > steps) k[i++] = 0;
      if (i == n) break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (hi[i] - lo[i]) / steps * 2;
      lo[i] = std::max(0.0, best[i] - w);
      hi[i] = std::min(1.0, best[i] + w);
    }
  }
  for (std::size_t i = 0; i < n; ++i) x[p.targets[i]] = best[i];
  return x;
}

}  // namespace oracle
