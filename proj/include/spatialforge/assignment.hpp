#pragma once

#include <vector>

namespace spatialforge {

/// Exact minimum-cost one-to-one assignment (Hungarian with potentials,
/// O(n^2 m)). `cost` is n x m with n <= m; every row gets a column.
/// Returns row -> column indices.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace spatialforge
