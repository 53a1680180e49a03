#include "proxsplit/validation.hpp"

#include "proxsplit/counterexamples.hpp"
#include "proxsplit/imaging.hpp"
#include "proxsplit/nested.hpp"
#include "proxsplit/noise.hpp"
#include "proxsplit/oracle.hpp"
#include "proxsplit/prox.hpp"
#include "proxsplit/restoration.hpp"
#include "proxsplit/splitting.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>

namespace proxsplit {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Vec uniform_vec(Eigen::Index n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ProxMap box(Vec lo, Vec hi) {
  return [lo, hi](const Vec& x) { return Vec(x.cwiseMax(lo).cwiseMin(hi)); };
}

// ---- imaging operators -----------------------------------------------------

Outcome symlet_orthonormality(const Filter6& h) {
  const double r = filter_orthonormality_residual(h);
  return {r <= 1e-12, fmt("residual %.3g (tolerance 1e-12)", r)};
}

Outcome dwt_reconstruction(const Filter6& h) {
  std::mt19937_64 rng(1);
  PeriodicDWT dwt(32, 32, 3, h);
  const Vec x = uniform_vec(1024, rng, -1, 1);
  const Vec c = dwt.forward(x);
  const double rec = (dwt.inverse(c) - x).norm() / x.norm();
  const double energy = std::abs(c.norm() - x.norm()) / x.norm();
  return {rec <= 1e-10 && energy <= 1e-10, fmt("reconstruction %.3g, energy %.3g", rec, energy)};
}

Outcome frame_adjoint_and_tightness() {
  std::mt19937_64 rng(2);
  double adj = 0, tight = 0;
  for (auto kind : {FrameKind::OrthonormalSymlet6, FrameKind::TwoBasisTight}) {
    FrameOp f(kind, 16, 16, 3);
    for (int k = 0; k < 5; ++k) {
      const Vec x = uniform_vec(256, rng, -1, 1);
      const Vec c = uniform_vec(f.coeff_count(), rng, -1, 1);
      adj = std::max(adj, std::abs(f.analysis(x).dot(c) - x.dot(f.synthesis(c))) / (x.norm() * c.norm()));
      tight = std::max(tight, (f.synthesis(f.analysis(x)) - f.nu() * x).norm() / x.norm());
    }
  }
  BlurOp t(5, 16, 16);
  for (int k = 0; k < 5; ++k) {
    const Vec x = uniform_vec(256, rng, -1, 1), y = uniform_vec(256, rng, -1, 1);
    adj = std::max(adj, std::abs(t.apply(x).dot(y) - x.dot(t.adjoint(y))) / (x.norm() * y.norm()));
  }
  return {adj <= 1e-10 && tight <= 1e-10, fmt("adjoint %.3g, F*F - nu Id %.3g", adj, tight)};
}

Outcome projection_idempotence() {
  std::mt19937_64 rng(3);
  double idem = 0, viol = 0;
  for (auto kind : {FrameKind::OrthonormalSymlet6, FrameKind::TwoBasisTight}) {
    FrameBoxConstraint cons(FrameOp(kind, 16, 16, 3));
    for (int k = 0; k < 5; ++k) {
      const Vec x = uniform_vec(cons.frame().coeff_count(), rng, -300, 600);
      const Vec p = cons.project(x);
      idem = std::max(idem, (cons.project(p) - p).norm() / std::max(1.0, p.norm()));
      viol = std::max(viol, cons.image_violation(p));
    }
  }
  return {idem <= 1e-10 && viol <= 1e-10, fmt("idempotence %.3g, violation %.3g", idem, viol)};
}

Outcome blur_preserves_box() {
  std::mt19937_64 rng(4);
  BlurOp t(5, 32, 32);
  double lo = kInf, hi = -kInf;
  for (int k = 0; k < 20; ++k) {
    Vec x = uniform_vec(1024, rng, 0, 255);
    if (k == 0) x.setConstant(255.0);
    if (k == 1) x.setZero();
    const Vec y = t.apply(x);
    lo = std::min(lo, y.minCoeff());
    hi = std::max(hi, y.maxCoeff());
  }
  return {lo >= 0.0 && hi <= 255.0, fmt("blurred range [%.17g, %.17g]", lo, hi)};
}

Outcome opnorm_check() {
  std::string detail;
  bool ok = true;
  for (auto kind : {FrameKind::OrthonormalSymlet6, FrameKind::TwoBasisTight}) {
    FrameOp f(kind, 16, 16, 3);
    const auto chain = blur_synthesis_chain(BlurOp(5, 16, 16), f);
    const double est = opnorm_estimate(chain.forward, chain.adjoint, chain.dim_in, 200, 9);
    const double expect = std::sqrt(f.nu());  // uniform blur passes constants unchanged
    ok = ok && std::abs(est - expect) <= 1e-3 * expect;
    detail += fmt("%s%s %.9f (expected %.9f)", detail.empty() ? "" : ", ",
                  std::string(frame_kind_name(kind)).c_str(), est, expect);
  }
  return {ok, detail};
}

// ---- prox ---------------------------------------------------------------------

Outcome prox_reference_values() {
  const auto l1 = ScalarPotential::make(1, 0, PowerExponent::Two);
  const auto mix = ScalarPotential::make(1, 1, PowerExponent::FourThirds);
  const double a = prox_scalar(l1, 1, 3);
  const double b = prox_scalar_constrained(l1, 1, ClosedInterval(0, 1), 3);
  const double c = prox_scalar(mix, 1, 2);
  // c solves y + (4/3) y^{1/3} = 1
  const double res = c + 4.0 / 3.0 * std::cbrt(c) - 1.0;
  const bool odd = prox_scalar(mix, 1, -2) == -c;
  return {a == 2 && b == 1 && std::abs(res) <= 1e-12 && odd,
          fmt("%.15g, %.15g, %.15g (stationarity residual %.2g)", a, b, c, res)};
}

Outcome prox_firm_nonexpansive() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 2);
  const PowerExponent ps[] = {PowerExponent::FourThirds, PowerExponent::ThreeHalves, PowerExponent::Two};
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScalarPotential> phi;
    std::vector<ClosedInterval> iv;
    for (int i = 0; i < 4; ++i) {
      phi.push_back(ScalarPotential::make(u(rng), u(rng), ps[(trial + i) % 3]));
      const double lo = -u(rng);
      iv.emplace_back(lo, lo + u(rng) + 0.1);
    }
    const SeparableConstrainedSpec spec(phi, iv);
    const Vec y = uniform_vec(4, rng, -5, 5), z = uniform_vec(4, rng, -5, 5);
    const Vec py = prox_separable(spec, 0.7, y), pz = prox_separable(spec, 0.7, z);
    worst = std::max(worst, (py - pz).squaredNorm() - (py - pz).dot(y - z));
  }
  return {worst <= 1e-12, fmt("max ||Py-Pz||^2 - <Py-Pz, y-z> = %.3g", worst)};
}

// ---- data term ------------------------------------------------------------------

struct DataInstance {
  FrameOp frame{FrameKind::TwoBasisTight, 8, 8, 2};
  BlurOp blur{3, 8, 8};
  LinearOperatorPair chain = blur_synthesis_chain(blur, frame);
  double opnorm = opnorm_estimate(chain.forward, chain.adjoint, chain.dim_in, 100, 3);
  ImageGrid truth = synthetic_image("phantom", 8, 8);

  SmoothDataTerm term(NoiseKind kind, double alpha, double theta) const {
    auto fam = NoiseFamily::uniform(kind, 64, alpha);
    Observation obs(kind, degrade(truth, blur, fam, 21));
    return SmoothDataTerm(fam, obs, ExtensionParams::build(fam, obs, theta, EpsilonRule{}), chain, opnorm);
  }
  Vec feasible(std::mt19937_64& rng, double lo, double hi) const {
    return frame.analysis(uniform_vec(64, rng, lo, hi)) / frame.nu();
  }
};

Outcome extension_ordering() {
  DataInstance inst;
  std::mt19937_64 rng(6);
  int violations = 0;
  for (auto kind : {NoiseKind::SignalDepGaussian, NoiseKind::Poisson}) {
    const auto t1 = inst.term(kind, 0.3, 0.01), t2 = inst.term(kind, 0.3, 0.1);
    for (int k = 0; k < 1000; ++k) {
      const Vec x = inst.feasible(rng, 0.01, 255);
      const double a = t1.value(x), b = t2.value(x), c = t2.unextended_value(x);
      if (a > b + 1e-12 * std::abs(b) || b > c + 1e-12 * std::abs(c)) ++violations;
    }
  }
  return {violations == 0, fmt("%d violations in 2000 samples", violations)};
}

Outcome extension_junction() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.05, 3), lt(-3, 2);
  double worst = 0;
  for (auto kind : {NoiseKind::SignalDepGaussian, NoiseKind::Poisson}) {
    for (int trial = 0; trial < 40; ++trial) {
      const double alpha = ua(rng);
      const double z = kind == NoiseKind::Poisson ? double(1 + trial % 30) : ua(rng) * 20 - 5;
      const auto fam = NoiseFamily::uniform(kind, 2, alpha);
      const Observation obs(kind, {z, 1.0});
      const double theta = std::pow(10.0, lt(rng));
      const auto ext = ExtensionParams::build(fam, obs, theta, EpsilonRule{});
      const double u = ext.upsilon[0];
      // value and one-sided slopes at the junction
      const double val = std::abs(psi_theta_eval(fam, obs, ext, 0, u) - psi_eval(fam, obs, 0, u));
      const double h = 1e-6 * std::max(1.0, u);
      const double left = (psi_theta_eval(fam, obs, ext, 0, u) - psi_theta_eval(fam, obs, ext, 0, u - h)) / h;
      const double right = (psi_theta_eval(fam, obs, ext, 0, u + h) - psi_theta_eval(fam, obs, ext, 0, u)) / h;
      const double slope = std::abs(left - right) - theta * h;  // O(h) curvature term removed
      worst = std::max({worst, val / std::max(1.0, std::abs(psi_eval(fam, obs, 0, u))),
                        slope / std::max(1.0, std::abs(left))});
    }
  }
  return {worst <= 1e-6, fmt("max junction residual %.3g", worst)};
}

Outcome gradient_finite_differences() {
  DataInstance inst;
  std::mt19937_64 rng(8);
  double worst = 0;
  for (auto [kind, alpha] : {std::pair{NoiseKind::SignalDepGaussian, 0.5}, std::pair{NoiseKind::Poisson, 0.2}}) {
    for (double theta : {0.01, 0.1, 1.0}) {
      const auto term = inst.term(kind, alpha, theta);
      const Vec x = inst.feasible(rng, 0.5, 250);
      const Vec grad = term.gradient(x);
      Vec fd(x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vec xp = x, xm = x;
        xp[k] += 1e-4;
        xm[k] -= 1e-4;
        fd[k] = (term.value(xp) - term.value(xm)) / 2e-4;
      }
      worst = std::max(worst, (grad - fd).norm() / grad.norm());
    }
  }
  return {worst <= 1e-5, fmt("max relative error %.3g", worst)};
}

Outcome lipschitz_ratio() {
  DataInstance inst;
  std::mt19937_64 rng(9);
  double worst = 0;
  for (auto kind : {NoiseKind::SignalDepGaussian, NoiseKind::Poisson}) {
    const auto t = inst.term(kind, 0.3, 0.1);
    for (int k = 0; k < 100; ++k) {
      const Vec x = inst.feasible(rng, 0, 255), y = inst.feasible(rng, 0, 255);
      worst = std::max(worst, (t.gradient(x) - t.gradient(y)).norm() / (x - y).norm() / t.beta());
    }
  }
  return {worst <= 1 + 1e-6, fmt("max sampled ratio / beta = %.6f", worst)};
}

// ---- solvers ----------------------------------------------------------------------

Outcome fb_linear_rate() {
  const QuadraticFormSpec spec(1, 1);
  const Eigen::Matrix2d L = spec.matrix();
  const Vec x = v2(2 * spec.lambda12, 2 * (1 + spec.lambda22));
  const double beta = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(L).eigenvalues().maxCoeff();
  const ProxMap pc = box(v2(-1, -1), v2(1, 1));
  const Vec star = brute_force_prox([&](const Vec& y) { return 0.5 * y.dot(L * y); }, x,
                                    SearchBox{v2(-1, -1), v2(1, 1)});
  const auto sched = FBSchedule::constant(0.9 / beta, 0.8);
  const double rho = ConvergenceBound::constrained_smooth(sched).rho;
  const Vec x0 = v2(-1, -1);
  int violations = 0;
  const GradientMap grad = [L](const Vec& y) { return Vec(L * y); };
  prox_constrained_smooth(x, 1, grad, beta, pc, sched, x0, {200, 0}, [&](std::size_t n, const Vec& xn) {
    if ((xn - star).norm() > std::pow(rho, double(n)) * (x0 - star).norm() + 1e-7) ++violations;
  });
  return {violations == 0, fmt("rho = %.6f, %d violations over 200 iterations", rho, violations)};
}

Outcome one_step_properties() {
  const Vec c = v2(0.2, -0.3), x = v2(0.5, 0.1);
  const ProxMap pc = box(v2(-1, -1), v2(1, 1));
  const double kappa = 2;
  const Vec p = (x + kappa * c) / (1 + kappa);
  double smooth = 0;
  prox_constrained_smooth(x, kappa, [c](const Vec& y) { return Vec(y - c); }, 1, pc,
                          FBSchedule::constant(0.3, 0.7), p, {50, 0},
                          [&](std::size_t, const Vec& xn) { smooth = std::max(smooth, (xn - p).norm()); });

  // prox_{gamma f} x = soft(x, 1) = 0.5 lies in [0.2, 1]
  const ProxMap soft1 = [](const Vec& y) {
    return Vec(y.unaryExpr([](double t) { return std::copysign(std::max(std::abs(t) - 1, 0.0), t); }));
  };
  double nonsmooth = 0;
  prox_constrained_nonsmooth(Vec::Constant(1, 1.5), soft1, box(Vec::Constant(1, 0.2), Vec::Constant(1, 1)),
                             [](std::size_t) { return 1.5; }, {20, 0},
                             [&](std::size_t, const Vec& h) { nonsmooth = std::max(nonsmooth, std::abs(h[0] - 0.5)); });
  return {smooth <= 1e-12 && nonsmooth <= 1e-12, fmt("smooth %.3g, nonsmooth %.3g", smooth, nonsmooth)};
}

Outcome nested_oracle() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  OuterConfig cfg;
  cfg.kappa = 1;
  cfg.eta = 1e-13;
  cfg.inner_cap = 5000;
  cfg.outer_cap = 20000;
  cfg.outer_tol = 1e-12;
  double worst = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    const int dim = 1 + trial % 3;
    Eigen::MatrixXd A(dim, dim);
    for (auto& a : A.reshaped()) a = n(rng);
    const Eigen::MatrixXd Q = A.transpose() * A + 0.2 * Eigen::MatrixXd::Identity(dim, dim);
    Vec b(dim), w(dim), lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      b[i] = 3 * n(rng);
      w[i] = u(rng);
      lo[i] = -2 * u(rng);
      hi[i] = 2 * u(rng);
    }
    ConstrainedCompositeProblem p;
    p.dim = dim;
    p.f = [w](const Vec& y) { return w.dot(y.cwiseAbs()); };
    p.prox_f = [w](double g, const Vec& y) {
      Vec out(y.size());
      for (Eigen::Index i = 0; i < y.size(); ++i)
        out[i] = std::copysign(std::max(std::abs(y[i]) - g * w[i], 0.0), y[i]);
      return out;
    };
    p.g = [Q, b](const Vec& y) { return 0.5 * y.dot(Q * y) - b.dot(y); };
    p.grad_g = [Q, b](const Vec& y) { return Vec(Q * y - b); };
    p.beta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff();
    p.project_C = box(lo, hi);
    const Vec start = p.project_C(Vec::Zero(dim));
    const Vec ref = grid_minimize([&](const Vec& y) { return p.f(y) + p.g(y); }, SearchBox{lo, hi}, 1e-9);
    worst = std::max({worst, (solve_dr_outer(p, cfg, start).solution - ref).cwiseAbs().maxCoeff(),
                      (solve_fb_outer(p, cfg, start).solution - ref).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-4, fmt("%d instances, max deviation from grid oracle %.3g", trials, worst)};
}

Outcome restoration_agreement() {
  const auto truth = synthetic_image("phantom", 16, 16);
  RestorationSetup s;
  s.width = s.height = 16;
  s.alpha = 0.5;
  s.blur_q = 3;
  s.frame = FrameKind::OrthonormalSymlet6;
  s.z = degrade(truth, BlurOp(3, 16, 16), NoiseFamily::uniform(NoiseKind::Poisson, 256, s.alpha), 11);
  s.prior.fallback = ScalarPotential::make(0.05, 0.0, PowerExponent::Two);
  s.prior.bands[0] = ScalarPotential::make(0.0, 0.0, PowerExponent::Two);
  const RestorationProblem P(s);
  OuterConfig cfg;
  cfg.outer_cap = 3000;
  cfg.outer_tol = 1e-9;
  cfg.eta = 1e-9;
  cfg.audit_feasibility = true;
  const auto dr = solve_dr_outer(P.composite(), cfg, P.initial_point());
  const auto fb = solve_fb_outer(P.composite(), cfg, P.initial_point());
  const double gap = std::abs(dr.objective_final - fb.objective_final) / std::abs(fb.objective_final);
  const auto norm = dr.trace.normalized_objective();
  const bool ends = norm.front() == 1.0 && norm.back() == 0.0;
  const bool feasible = dr.grad_calls_outside_C == 0 && fb.grad_calls_outside_C == 0;
  return {gap <= 1e-4 && ends && feasible,
          fmt("relative objective gap %.3g, gradient calls outside C %zu", gap,
              dr.grad_calls_outside_C + fb.grad_calls_outside_C)};
}

// ---- counterexamples ----------------------------------------------------------------

Outcome separable_box() {
  double agree = 0;
  bool mismatch_ok = true;
  for (double l12 : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.5}) {
    const auto r = example_separable_box(QuadraticFormSpec::feasible(l12));
    agree = std::max(agree, r.agreement);
    mismatch_ok = mismatch_ok && (r.gap > 1e-3) == (l12 != 0) && r.mismatch == (l12 != 0);
  }
  return {agree <= 1e-6 && mismatch_ok, fmt("max solver/oracle deviation from (pi, 1): %.3g", agree)};
}

Outcome rotated_box() {
  double agree = 0, min_gap = kInf;
  for (double l12 : {0.1, 0.5, 1.0}) {
    const auto r = example_rotated_box(l12);
    agree = std::max(agree, r.agreement);
    min_gap = std::min(min_gap, r.gap);
  }
  std::mt19937_64 rng(12);
  double transport = 0;
  for (int k = 0; k < 50; ++k) {
    const Vec x = uniform_vec(2, rng, -5, 5);
    transport = std::max(transport, (rotated_prox_direct(0.7, x) - rotated_prox_transport(0.7, x)).norm());
  }
  return {agree <= 1e-6 && min_gap > 1e-3 && transport <= 1e-10,
          fmt("oracle deviation %.3g, min gap %.3g, transport %.3g", agree, min_gap, transport)};
}

Outcome lambda12_sweep() {
  int missed = 0, count = 0;
  double zero_gap = 0;
  for (int k = -20; k <= 20; ++k) {
    const double l12 = 0.2 * k;
    const auto r = example_separable_box(QuadraticFormSpec::feasible(l12));
    ++count;
    if (k == 0)
      zero_gap = r.gap;
    else if (!(r.mismatch && r.gap > 1e-3))
      ++missed;
  }
  return {missed == 0 && zero_gap <= 1e-8,
          fmt("%d values, %d undetected mismatches, gap at 0: %.3g", count, missed, zero_gap)};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  Filter6 h = symlet6_lowpass();
  if (options.perturb_symlet) h[0] += 1e-3;

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"symlet_orthonormality", [&] { return symlet_orthonormality(h); }},
      {"dwt_reconstruction", [&] { return dwt_reconstruction(h); }},
      {"frame_adjoint_tightness", frame_adjoint_and_tightness},
      {"projection_idempotence", projection_idempotence},
      {"blur_preserves_box", blur_preserves_box},
      {"operator_norm", opnorm_check},
      {"prox_reference_values", prox_reference_values},
      {"prox_firm_nonexpansive", prox_firm_nonexpansive},
      {"extension_ordering", extension_ordering},
      {"extension_junction", extension_junction},
      {"gradient_finite_differences", gradient_finite_differences},
      {"gradient_lipschitz_ratio", lipschitz_ratio},
      {"fb_inner_linear_rate", fb_linear_rate},
      {"inner_one_step", one_step_properties},
      {"nested_vs_grid_oracle", nested_oracle},
      {"restoration_solver_agreement", restoration_agreement},
      {"counterexample_separable_box", separable_box},
      {"counterexample_rotated_box", rotated_box},
      {"counterexample_lambda12_sweep", lambda12_sweep},
  };

  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    r.name = name;
    const Stopwatch clock;
    try {
      const Outcome o = fn();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = clock.seconds();
    out.push_back(std::move(r));
  }
  return out;
}

std::string validation_json(const std::vector<CheckResult>& results) {
  nlohmann::json j;
  bool all = true;
  j["checks"] = nlohmann::json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    j["checks"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
  }
  j["passed"] = all;
  return j.dump(2);
}

}  // namespace proxsplit
