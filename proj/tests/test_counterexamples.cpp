#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "proxsplit/counterexamples.hpp"

#include <cmath>
#include <random>

using namespace proxsplit;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Variational inequality for q = argmin over [-1,1]² of ½||y - x||² + ½ y'Ly:
// <(I + L) q - x, y - q> >= 0 at the corners of the box (enough for a box).
double worst_vi(const Eigen::Matrix2d& L, const Vec& x, const Vec& q) {
  const Vec grad = (Eigen::Matrix2d::Identity() + L) * q - x;
  double worst = kInf;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) worst = std::min(worst, grad.dot(v2(a, b) - q));
  return worst;
}

}  // namespace

TEST_CASE("quadratic form spec enforces semidefiniteness") {
  CHECK_THROWS_AS(QuadraticFormSpec(2.0, 3.0), InvalidArgument);
  CHECK_THROWS_AS(QuadraticFormSpec(0.0, -1.0), InvalidArgument);
  CHECK_NOTHROW(QuadraticFormSpec(2.0, 4.0));
  CHECK(QuadraticFormSpec::feasible(-3).lambda22 == 9);
  CHECK(QuadraticFormSpec::feasible(0.5).lambda22 == 1);
}

TEST_CASE("separable box: reference values") {
  const auto a = example_separable_box({1, 1});
  CHECK((a.pc_prox - v2(0, 1)).norm() < 1e-12);
  CHECK((a.true_prox - v2(0.5, 1)).norm() < 1e-12);
  CHECK(a.mismatch);
  CHECK(a.agreement <= 1e-6);

  const auto b = example_separable_box({2.5, 7});
  CHECK((b.true_prox - v2(1, 1)).norm() < 1e-12);
  CHECK(b.agreement <= 1e-6);

  const auto c = example_separable_box({0, 1});
  CHECK((c.pc_prox - c.true_prox).norm() < 1e-12);
  CHECK(!c.mismatch);
  CHECK(c.agreement <= 1e-6);
}

TEST_CASE("separable box: every pi branch, solvers and oracle agree") {
  for (double l12 : {-3.0, -2.0, -1.0, -0.1, 0.0, 0.5, 1.0, 2.0, 2.5, 4.0}) {
    CAPTURE(l12);
    const auto spec = QuadraticFormSpec::feasible(l12);
    const auto r = example_separable_box(spec);
    CHECK(r.agreement <= 1e-6);
    CHECK(worst_vi(spec.matrix(), r.x, r.true_prox) >= -1e-12);
    if (std::abs(l12) >= 0.1) CHECK(r.gap > 1e-3);
    if (l12 == 0.0) CHECK(r.gap <= 1e-8);
  }
}

TEST_CASE("rotated box") {
  const Eigen::Matrix2d R = rotation_r();
  const auto one = example_rotated_box(1.0);
  CHECK((one.true_prox - R.transpose() * v2(0.5, 1)).norm() < 1e-12);
  CHECK(one.mismatch);

  const auto small = example_rotated_box(0.1);
  CHECK(small.mismatch);
  CHECK(small.gap == doctest::Approx(0.05).epsilon(1e-12));

  for (double l12 : {0.1, 0.5, 1.0, -0.5}) {
    CAPTURE(l12);
    const auto r = example_rotated_box(l12);
    CHECK(r.agreement <= 1e-6);
    CHECK(r.gap > 1e-3);
  }
  CHECK_THROWS_AS(example_rotated_box(0.0), InvalidArgument);
  CHECK_THROWS_AS(example_rotated_box(1.5), InvalidArgument);
}

TEST_CASE("rotation transport of prox_f") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 3);
  for (int i = 0; i < 100; ++i) {
    const Vec x = v2(n(rng), n(rng));
    for (double l12 : {0.1, 0.7, -1.0})
      CHECK((rotated_prox_direct(l12, x) - rotated_prox_transport(l12, x)).norm() <= 1e-10);
  }
}
