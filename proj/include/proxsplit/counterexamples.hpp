#pragma once
// Two-dimensional instances where projecting prox_f onto C is NOT the prox of
// f + iota_C:
//  * a coupled quadratic f with the separable box C = [-1, 1]²;
//  * a separable quadratic f with the rotated box C = R'[-1, 1]².

#include "proxsplit/core.hpp"

#include <Eigen/Dense>

namespace proxsplit {

/// f(x) = ½ x' [[1, l12], [l12, l22]] x; positive semidefinite iff |l12| <= sqrt(l22).
struct QuadraticFormSpec {
  double lambda12 = 0.0;
  double lambda22 = 1.0;

  QuadraticFormSpec(double l12, double l22);
  Eigen::Matrix2d matrix() const;
  /// Smallest admissible lambda22 paired with l12 in sweeps: max(1, l12²).
  static QuadraticFormSpec feasible(double l12);
};

/// Closed form of the first coordinate of prox_{iota_C + f}(x):
/// l12 / 2 on [-2, 2], +-1 outside.
double separable_box_pi(double lambda12);

struct SeparableBoxResult {
  Vec x;
  Vec pc_prox;      ///< P_C(prox_f x), analytic: (0, 1)
  Vec true_prox;    ///< (pi, 1)
  Vec fb_prox;      ///< inner forward-backward solver
  Vec dr_prox;      ///< inner Douglas-Rachford solver
  Vec oracle_prox;  ///< grid search
  double pi = 0.0;
  double gap = 0.0;        ///< ||pc_prox - true_prox||
  double agreement = 0.0;  ///< max deviation of fb / dr / oracle from (pi, 1)
  bool mismatch = false;   ///< lambda12 != 0
};

SeparableBoxResult example_separable_box(const QuadraticFormSpec& spec);

struct RotatedBoxResult {
  Vec x;
  Vec pc_prox;           ///< R' P_box(prox_ftilde(R x))
  Vec true_prox;         ///< R' (pi, 1)
  Vec oracle_pc_prox;    ///< P_C of the grid-search prox_f
  Vec oracle_true_prox;  ///< grid search of prox_{f + iota_C}
  double gap = 0.0;
  double agreement = 0.0;  ///< max oracle-vs-transport deviation
  bool mismatch = false;
};

/// R = [[1, -1], [1, 1]] / sqrt(2).
Eigen::Matrix2d rotation_r();

/// f = ftilde(R .), ftilde(y) = ½ y' [[1, l12], [l12, 1]] y, C = R'[-1, 1]²,
/// x = sqrt(2) (2 + l12, 2 - l12). Requires 0 < |l12| <= 1.
RotatedBoxResult example_rotated_box(double lambda12);

/// prox_f x for f = ftilde(R .) computed directly, (I + R'ΛR)^{-1} x.
Vec rotated_prox_direct(double lambda12, const Vec& x);
/// The same through the transport identity R' prox_ftilde(R x).
Vec rotated_prox_transport(double lambda12, const Vec& x);

}  // namespace proxsplit
