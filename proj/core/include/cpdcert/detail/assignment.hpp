#ifndef CPDCERT_DETAIL_ASSIGNMENT_HPP
#define CPDCERT_DETAIL_ASSIGNMENT_HPP

#include <limits>
#include <vector>

namespace cpdcert {
namespace detail {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// algorithm with potentials, O(n^3)). cost[i][j] = cost of assigning row
/// i to column j. Returns row_of_col: for each column j, the assigned row.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

} // namespace detail
} // namespace cpdcert

#endif
