#include "proxsplit/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace proxsplit {

namespace {

// Points per axis and the half-width (in cells) of the box kept around the
// best grid point for the next round.
int points_per_axis(Eigen::Index dim) { return dim == 3 ? 25 : 61; }
constexpr double kKeepCells = 4.0;

}  // namespace

Vec grid_minimize(const Objective& objective, const SearchBox& box, double resolution) {
  const Eigen::Index dim = box.lo.size();
  require(dim >= 1 && dim <= 3, "grid oracle: dimension must be 1, 2 or 3");
  require(box.hi.size() == dim, "grid oracle: box bounds differ in dimension");
  require((box.hi.array() >= box.lo.array()).all(), "grid oracle: empty box");

  const int n = points_per_axis(dim);
  Vec lo = box.lo;
  Vec hi = box.hi;
  Vec best = 0.5 * (lo + hi);
  double best_val = objective(best);

  for (int round = 0; round < 200; ++round) {
    const Vec step = (hi - lo) / double(n - 1);
    Vec y(dim);
    std::vector<int> idx(dim, 0);
    bool done = false;
    while (!done) {
      for (Eigen::Index d = 0; d < dim; ++d) y[d] = lo[d] + step[d] * idx[d];
      const double v = objective(y);
      if (v < best_val) {
        best_val = v;
        best = y;
      }
      Eigen::Index d = 0;
      while (d < dim && ++idx[d] == n) idx[d++] = 0;
      done = d == dim;
    }
    if (round >= 2 && step.maxCoeff() <= resolution) break;
    for (Eigen::Index d = 0; d < dim; ++d) {
      lo[d] = std::max(box.lo[d], best[d] - kKeepCells * step[d]);
      hi[d] = std::min(box.hi[d], best[d] + kKeepCells * step[d]);
    }
  }
  return best;
}

Vec brute_force_prox(const Objective& objective, const Vec& x, const SearchBox& box) {
  require(x.size() >= 1 && x.size() <= 3, "brute_force_prox: dimension must be at most 3");
  require(box.lo.size() == x.size(), "brute_force_prox: box dimension mismatch");
  return grid_minimize(
      [&](const Vec& y) { return 0.5 * (y - x).squaredNorm() + objective(y); }, box);
}

}  // namespace proxsplit
