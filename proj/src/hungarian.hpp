#pragma once

// O(N^3) Hungarian method (shortest augmenting paths with potentials) for a
// square cost matrix. Cost may be any ordered ring type, including big
// integers, so "infinity" is tracked with flags instead of a sentinel value.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace necmatch::detail {

/// Minimum-cost perfect assignment. Returns col[row].
template <class Cost>
std::vector<std::size_t> hungarian_min_cost(const std::vector<std::vector<Cost>>& cost) {
  const std::size_t n = cost.size();
  std::vector<Cost> u(n + 1, Cost(0));
  std::vector<Cost> v(n + 1, Cost(0));
  std::vector<std::size_t> row_of(n + 1, 0); // row_of[col], 0 = free
  std::vector<std::size_t> way(n + 1, 0);
  std::vector<Cost> minv(n + 1, Cost(0));
  std::vector<char> finite(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (std::size_t row = 1; row <= n; ++row) {
    row_of[0] = row;
    std::size_t col0 = 0;
    std::fill(finite.begin(), finite.end(), 0);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = row_of[col0];
      Cost delta(0);
      bool have_delta = false;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        Cost reduced = cost[row0 - 1][col - 1] - u[row0] - v[col];
        if (!finite[col] || reduced < minv[col]) {
          minv[col] = std::move(reduced);
          finite[col] = 1;
          way[col] = col0;
        }
        if (!have_delta || minv[col] < delta) {
          delta = minv[col];
          have_delta = true;
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[row_of[col]] += delta;
          v[col] -= delta;
        } else if (finite[col]) {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (row_of[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      row_of[col0] = row_of[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> col_of(n, 0);
  for (std::size_t col = 1; col <= n; ++col) {
    if (row_of[col] != 0) col_of[row_of[col] - 1] = col - 1;
  }
  return col_of;
}

} // namespace necmatch::detail
