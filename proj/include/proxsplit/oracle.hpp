#pragma once
// Grid-search minimizers for problems of dimension <= 3. These are test
// oracles: slow, assumption-light, and independent of the splitting code.

#include "proxsplit/core.hpp"

#include <vector>

namespace proxsplit {

struct SearchBox {
  Vec lo;
  Vec hi;
};

/// Minimizes a convex objective over a bounded box by nested grid refinement.
/// Each round evaluates a uniform grid, then shrinks the box around the best
/// point; refinement continues until the grid spacing is below `resolution`
/// (at least three rounds always run). +inf values are allowed (indicators).
Vec grid_minimize(const Objective& objective, const SearchBox& box, double resolution = 1e-8);

/// argmin_y ½||y - x||² + objective(y) over the box, dim(x) <= 3.
Vec brute_force_prox(const Objective& objective, const Vec& x, const SearchBox& box);

}  // namespace proxsplit
