#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "proxsplit/restoration.hpp"
#include "toy_problems.hpp"

#include <cmath>
#include <random>

using namespace proxsplit;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// 16x16 Poisson deblurring instance in the orthonormal basis.
RestorationProblem small_restoration(FrameKind frame) {
  const auto truth = synthetic_image("phantom", 16, 16);
  const BlurOp blur(3, 16, 16);
  RestorationSetup s;
  s.width = 16;
  s.height = 16;
  s.alpha = 0.5;
  s.blur_q = 3;
  s.frame = frame;
  s.theta = 0.1;
  s.z = degrade(truth, blur, NoiseFamily::uniform(NoiseKind::Poisson, 256, s.alpha), 11);
  s.prior.fallback = ScalarPotential::make(0.05, 0.0, PowerExponent::Two);
  s.prior.bands[0] = ScalarPotential::make(0.0, 0.0, PowerExponent::Two);
  return RestorationProblem(s);
}

}  // namespace

TEST_CASE("two-dimensional example: both solvers reach (1, 0)") {
  const auto in = toy::two_dim_example();
  const auto cfg = toy::tight_config();
  const Vec start = Vec::Zero(2);
  const auto dr = solve_dr_outer(in.problem, cfg, start);
  const auto fb = solve_fb_outer(in.problem, cfg, start);
  CHECK((dr.solution - v2(1, 0)).norm() < 1e-6);
  CHECK((fb.solution - v2(1, 0)).norm() < 1e-6);
  CHECK((toy::oracle(in) - v2(1, 0)).norm() < 1e-6);
  CHECK(dr.grad_calls_outside_C == 0);
  CHECK(fb.grad_calls_outside_C == 0);
  CHECK(dr.trace.rows.front().iteration == 0);
}

TEST_CASE("f = 0 returns the projection of the quadratic center") {
  auto in = toy::two_dim_example();
  in.problem.f = [](const Vec&) { return 0.0; };
  in.problem.prox_f = [](double, const Vec& y) { return y; };
  const auto cfg = toy::tight_config();
  const Vec expect = v2(1, 0);  // P_[0,1]²(2, -1)
  CHECK((solve_dr_outer(in.problem, cfg, v2(0.5, 0.5)).solution - expect).norm() < 1e-8);
  CHECK((solve_fb_outer(in.problem, cfg, v2(0.5, 0.5)).solution - expect).norm() < 1e-8);
}

TEST_CASE("fb-outer without constraint or f is gradient descent") {
  auto in = toy::two_dim_example();
  in.problem.f = [](const Vec&) { return 0.0; };
  in.problem.prox_f = [](double, const Vec& y) { return y; };
  in.problem.project_C = [](const Vec& y) { return y; };
  OuterConfig cfg;
  cfg.outer_cap = 5;
  cfg.outer_tol = 0;
  cfg.step_factor = 0.5;
  const Vec x0 = v2(5, 5), p = in.b;
  const auto r = solve_fb_outer(in.problem, cfg, x0);
  // x_n - p = (1 - 0.5)^n (x_0 - p)
  for (const auto& row : r.trace.rows) {
    const Vec expect = p + std::pow(0.5, double(row.iteration)) * (x0 - p);
    CHECK(row.objective == doctest::Approx(in.problem.g(expect)).epsilon(1e-14));
  }
  for (auto n : r.inner_counts) CHECK(n == 1);
}

TEST_CASE("random instances match the grid oracle") {
  std::mt19937_64 rng(5);
  const auto cfg = toy::tight_config();
  for (int trial = 0; trial < 12; ++trial) {
    CAPTURE(trial);
    const auto in = toy::random_instance(rng, 1 + trial % 3);
    const Vec start = in.problem.project_C(Vec::Zero(in.b.size()));
    const auto dr = solve_dr_outer(in.problem, cfg, start);
    const auto fb = solve_fb_outer(in.problem, cfg, start);
    const Vec ref = toy::oracle(in);
    CHECK((dr.solution - ref).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((fb.solution - ref).cwiseAbs().maxCoeff() < 1e-4);
    CHECK(rel_gap(dr.objective_final, fb.objective_final) < 1e-4);
    CHECK(dr.grad_calls_outside_C == 0);
    CHECK(fb.grad_calls_outside_C == 0);
    CHECK(dr.max_projection_residual <= 1e-9);
    CHECK(fb.max_projection_residual <= 1e-9);

    // No sampled feasible point does better.
    std::uniform_real_distribution<double> u(0, 1);
    const double best = dr.objective_final;
    for (int k = 0; k < 200; ++k) {
      Vec y(in.b.size());
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = in.lo[i] + u(rng) * (in.hi[i] - in.lo[i]);
      CHECK(in.problem.f(y) + in.problem.g(y) >= best - 1e-6 * (1 + std::abs(best)));
    }
  }
}

TEST_CASE("start outside C is rejected") {
  const auto in = toy::two_dim_example();
  CHECK_THROWS_AS(solve_dr_outer(in.problem, toy::tight_config(), v2(3, 3)), InvalidArgument);
  CHECK_THROWS_AS(solve_fb_outer(in.problem, toy::tight_config(), v2(3, 3)), InvalidArgument);
}

TEST_CASE("non-finite iterates abort with the partial trace") {
  auto in = toy::two_dim_example();
  int calls = 0;
  in.problem.grad_g = [&calls](const Vec& x) {
    return ++calls > 1 ? Vec::Constant(x.size(), std::nan("")) : Vec(x);
  };
  OuterConfig cfg;
  cfg.outer_cap = 50;
  try {
    solve_fb_outer(in.problem, cfg, v2(0.5, 0.5));
    FAIL("expected an abort");
  } catch (const SolverAbort& e) {
    CHECK(e.partial().trace.size() >= 1);
    CHECK(std::string(e.what()).find("fb-outer") != std::string::npos);
  }
}

TEST_CASE("theoretical inner bound") {
  const ConvergenceBound half{0.5, "test"};
  InnerBoundState s;
  s.kappa = 2;
  s.g_z0 = 1;
  s.inf_g = 0;
  // 0.5^3 * sqrt(2 * 2) * 1 = 0.25 <= 0.25
  CHECK(theoretical_inner_bound(0, s, 0.25, half) == 3);
  s.z_m = v2(1, 1);
  s.z_prev = v2(1, 1);
  CHECK(theoretical_inner_bound(4, s, 0.25, half) == 1);
  s.z_prev = v2(0, 0);
  CHECK(theoretical_inner_bound(4, s, 1e300, half) == 1);
  CHECK(theoretical_inner_bound(4, s, 0.25, half) > 1);
  CHECK_THROWS_AS(theoretical_inner_bound(0, s, 0.25, ConvergenceBound{1.0, "x"}), InvalidArgument);
}

TEST_CASE("16x16 Poisson restoration: solvers agree and stay feasible") {
  const auto P = small_restoration(FrameKind::OrthonormalSymlet6);
  OuterConfig cfg;
  cfg.outer_cap = 3000;
  cfg.outer_tol = 1e-9;
  cfg.eta = 1e-9;
  cfg.audit_feasibility = true;
  const Vec x0 = P.initial_point();
  const auto dr = solve_dr_outer(P.composite(), cfg, x0);
  const auto fb = solve_fb_outer(P.composite(), cfg, x0);
  CHECK(rel_gap(dr.objective_final, fb.objective_final) < 1e-4);
  CHECK(dr.grad_calls_outside_C == 0);
  CHECK(fb.grad_calls_outside_C == 0);
  CHECK(dr.max_projection_residual <= 1e-9);
  CHECK(fb.max_projection_residual <= 1e-9);
  CHECK(dr.objective_final < dr.trace.rows.front().objective);
}
