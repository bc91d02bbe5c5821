#include "landau/assignment.hpp"

#include "landau/errors.hpp"

#include <limits>

namespace landau {

Assignment solve_assignment(std::span<double const> cost, std::size_t n)
{
    if (cost.size() != n * n)
        throw SizeMismatch("solve_assignment: cost matrix must be n x n");
    Assignment out;
    if (n == 0)
        return out;

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; column 0 is a sentinel.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            std::size_t const r0 = match[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                double const cur = cost[(r0 - 1) * n + (j - 1)] - u[r0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = col0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            std::size_t const col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    out.column_of_row.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j)
        out.column_of_row[match[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i)
        out.cost += cost[i * n + out.column_of_row[i]];
    return out;
}

} // namespace landau
