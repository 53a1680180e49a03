#include "proxsplit/counterexamples.hpp"

#include "proxsplit/oracle.hpp"
#include "proxsplit/splitting.hpp"

#include <cmath>

namespace proxsplit {

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec clamp_unit(const Vec& y) { return y.cwiseMax(-1.0).cwiseMin(1.0); }

double max_dev(std::initializer_list<Vec> points, const Vec& ref) {
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, (p - ref).cwiseAbs().maxCoeff());
  return worst;
}

Eigen::Matrix2d symmetric(double l12, double l22) {
  Eigen::Matrix2d m;
  m << 1.0, l12, l12, l22;
  return m;
}

}  // namespace

QuadraticFormSpec::QuadraticFormSpec(double l12, double l22) : lambda12(l12), lambda22(l22) {
  require(std::isfinite(l12) && std::isfinite(l22), "quadratic form: entries must be finite");
  require(l22 >= 0.0, "quadratic form: lambda22 must be >= 0");
  // Small slack so that l22 = l12² passes despite rounding in the square root.
  require(std::abs(l12) <= std::sqrt(l22) * (1 + 1e-15),
          "quadratic form: |lambda12| <= sqrt(lambda22) violated (not positive semidefinite)");
}

Eigen::Matrix2d QuadraticFormSpec::matrix() const { return symmetric(lambda12, lambda22); }

QuadraticFormSpec QuadraticFormSpec::feasible(double l12) {
  return QuadraticFormSpec(l12, std::max(1.0, l12 * l12));
}

double separable_box_pi(double lambda12) {
  if (lambda12 > 2.0) return 1.0;
  if (lambda12 < -2.0) return -1.0;
  return lambda12 / 2.0;
}

SeparableBoxResult example_separable_box(const QuadraticFormSpec& spec) {
  const Eigen::Matrix2d L = spec.matrix();
  const Eigen::Matrix2d IpL = Eigen::Matrix2d::Identity() + L;
  SeparableBoxResult r;
  r.x = 2.0 * v2(spec.lambda12, 1.0 + spec.lambda22);
  r.pi = separable_box_pi(spec.lambda12);
  r.true_prox = v2(r.pi, 1.0);
  // prox_f x = (I + L)^{-1} x = (0, 2) for this x.
  r.pc_prox = clamp_unit(IpL.ldlt().solve(r.x));

  const ProxMap project = [](const Vec& y) { return clamp_unit(y); };
  const GradientMap grad = [L](const Vec& y) { return Vec(L * y); };
  const double beta = std::max(1e-12, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(L).eigenvalues().maxCoeff());
  r.fb_prox = prox_constrained_smooth(r.x, 1.0, grad, beta, project, FBSchedule::constant(1.0 / beta),
                                      project(r.x), {100000, 1e-15})
                  .x;
  const ProxMap prox_f = [IpL](const Vec& y) { return Vec(IpL.ldlt().solve(y)); };
  r.dr_prox = prox_constrained_nonsmooth(r.x, prox_f, project, [](std::size_t) { return 1.0; },
                                         {100000, 1e-15})
                  .x;
  r.oracle_prox = brute_force_prox([L](const Vec& y) { return 0.5 * y.dot(L * y); }, r.x,
                                   SearchBox{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)});

  r.agreement = max_dev({r.fb_prox, r.dr_prox, r.oracle_prox}, r.true_prox);
  r.gap = (r.pc_prox - r.true_prox).norm();
  r.mismatch = spec.lambda12 != 0.0;
  return r;
}

Eigen::Matrix2d rotation_r() {
  Eigen::Matrix2d R;
  R << 1.0, -1.0, 1.0, 1.0;
  return R / std::sqrt(2.0);
}

Vec rotated_prox_direct(double lambda12, const Vec& x) {
  const Eigen::Matrix2d R = rotation_r();
  const Eigen::Matrix2d A = Eigen::Matrix2d::Identity() + R.transpose() * symmetric(lambda12, 1.0) * R;
  return A.ldlt().solve(x);
}

Vec rotated_prox_transport(double lambda12, const Vec& x) {
  const Eigen::Matrix2d R = rotation_r();
  const Eigen::Matrix2d A = Eigen::Matrix2d::Identity() + symmetric(lambda12, 1.0);
  return R.transpose() * A.ldlt().solve(R * x);
}

RotatedBoxResult example_rotated_box(double lambda12) {
  require(std::isfinite(lambda12) && lambda12 != 0.0 && std::abs(lambda12) <= 1.0,
          "rotated box: lambda12 must satisfy 0 < |lambda12| <= 1");
  const Eigen::Matrix2d R = rotation_r();
  const Eigen::Matrix2d L = symmetric(lambda12, 1.0);
  RotatedBoxResult r;
  r.x = std::sqrt(2.0) * v2(2.0 + lambda12, 2.0 - lambda12);

  // Transport: everything happens in the rotated coordinates u = R y.
  const Vec u = R * r.x;
  const Eigen::Matrix2d IpL = Eigen::Matrix2d::Identity() + L;
  r.pc_prox = R.transpose() * clamp_unit(IpL.ldlt().solve(u));
  r.true_prox = R.transpose() * v2(separable_box_pi(lambda12), 1.0);

  const Objective f = [R, L](const Vec& y) {
    const Vec ry = R * y;
    return 0.5 * ry.dot(L * ry);
  };
  const double reach = r.x.norm() + 1.0;
  const Vec unconstrained =
      brute_force_prox(f, r.x, SearchBox{Vec::Constant(2, -reach), Vec::Constant(2, reach)});
  r.oracle_pc_prox = R.transpose() * clamp_unit(R * unconstrained);
  const double s2 = std::sqrt(2.0);
  r.oracle_true_prox = brute_force_prox(
      [&](const Vec& y) {
        const Vec ry = R * y;
        return ry.cwiseAbs().maxCoeff() <= 1.0 ? f(y) : kInf;
      },
      r.x, SearchBox{Vec::Constant(2, -s2), Vec::Constant(2, s2)});

  r.agreement = std::max((r.oracle_pc_prox - r.pc_prox).cwiseAbs().maxCoeff(),
                         (r.oracle_true_prox - r.true_prox).cwiseAbs().maxCoeff());
  r.gap = (r.pc_prox - r.true_prox).norm();
  r.mismatch = r.gap > 1e-8;
  return r;
}

}  // namespace proxsplit
