#pragma once

#include <vector>

#include "lhk/rational.hpp"

namespace lhk::detail {

using RationalRow = std::vector<Rational>;

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(std::vector<RationalRow>& rows, int cols);

// Basis of {x : A x = 0}, one vector per free column, with the free entry
// set to 1.
std::vector<RationalRow> kernel(std::vector<RationalRow> rows, int cols);

}  // namespace lhk::detail
