#pragma once

#include <cstdint>
#include <vector>

#include "lpl/common.hpp"

namespace lpl {

/// Exact solvers for transportation problems with integer costs. Both return
/// a complementary-slackness-verified optimum (they throw std::logic_error if
/// the certificate fails, which would indicate a solver bug).

/// Dense n x n assignment, costs row-major. Returns row -> column and writes
/// the total cost. Shortest augmenting paths over column prices after a
/// column-reduction warm start.
std::vector<int> solve_assignment(const std::vector<std::int64_t>& cost, int n,
                                  __int128* total_cost);

/// Transportation problem: ship supplies[i] (i < na) to demands[j] (j < nb)
/// over dense arcs with cost[i*nb+j] per unit; sum supplies == sum demands.
/// Successive shortest paths with node potentials. Returns total cost and,
/// when flow_out is given, the optimal arc flows.
__int128 solve_transport(const std::vector<std::int64_t>& cost,
                         const std::vector<std::int64_t>& supplies,
                         const std::vector<std::int64_t>& demands,
                         std::vector<std::vector<std::int64_t>>* flow_out = nullptr);

}  // namespace lpl
