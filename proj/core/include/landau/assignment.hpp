#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace landau {

struct Assignment {
    std::vector<std::size_t> column_of_row;
    double cost = 0;
};

/// Minimum-cost perfect matching on a dense n x n cost matrix (row-major),
/// Hungarian method with potentials, O(n^3).
[[nodiscard]] Assignment solve_assignment(std::span<double const> cost, std::size_t n);

} // namespace landau
