#include "exact_linalg.hpp"

#include <utility>

namespace lhk::detail {

std::vector<int> rref(std::vector<RationalRow>& rows, int cols) {
  std::vector<int> pivots;
  int lead_row = 0;
  const int n_rows = static_cast<int>(rows.size());
  for (int col = 0; col < cols && lead_row < n_rows; ++col) {
    int sel = -1;
    for (int i = lead_row; i < n_rows; ++i) {
      if (sgn(rows[i][col]) != 0) {
        sel = i;
        break;
      }
    }
    if (sel < 0) continue;
    std::swap(rows[sel], rows[lead_row]);
    RationalRow& pivot = rows[lead_row];
    const Rational inv = 1 / pivot[col];
    for (int j = col; j < cols; ++j) pivot[j] *= inv;
    for (int i = 0; i < n_rows; ++i) {
      if (i == lead_row || sgn(rows[i][col]) == 0) continue;
      const Rational f = rows[i][col];
      for (int j = col; j < cols; ++j) {
        if (sgn(pivot[j]) != 0) rows[i][j] -= f * pivot[j];
      }
    }
    pivots.push_back(col);
    ++lead_row;
  }
  rows.resize(pivots.size());
  return pivots;
}

std::vector<RationalRow> kernel(std::vector<RationalRow> rows, int cols) {
  const std::vector<int> pivots = rref(rows, cols);
  std::vector<bool> is_pivot(cols, false);
  for (int p : pivots) is_pivot[p] = true;

  std::vector<RationalRow> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalRow v(cols);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace lhk::detail
