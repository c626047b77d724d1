#pragma once

#include <vector>

#include "wg/spaces.hpp"

namespace wg {

struct Assignment {
  std::vector<int> column_of_row;
  double total_cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square cost matrix
/// (Hungarian method with potentials, O(n^3)).
Assignment solve_assignment(const Matrix& cost);

}  // namespace wg
