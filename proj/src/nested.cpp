#include "proxsplit/nested.hpp"

#include <cmath>

namespace proxsplit {

void OuterConfig::validate() const {
  require(kappa > 0.0 && std::isfinite(kappa), "outer config: kappa must be > 0");
  require(eta > 0.0, "outer config: eta must be > 0");
  require(inner_cap >= 1 && outer_cap >= 1, "outer config: iteration caps must be >= 1");
  require(outer_tol >= 0.0, "outer config: outer_tol must be >= 0");
  require(step_factor > 0.0 && step_factor < 2.0, "outer config: step_factor must be in (0, 2)");
  require(lambda > 0.0 && lambda <= 1.0, "outer config: lambda must be in (0, 1]");
  require(tau > 0.0 && tau <= 2.0, "outer config: tau must be in (0, 2]");
}

double projection_residual(const ProxMap& project_C, const Vec& x) {
  return (project_C(x) - x).norm() / std::max(1.0, x.norm());
}

namespace {

void check_problem(const ConstrainedCompositeProblem& p, const Vec& start) {
  require(p.f && p.prox_f && p.g && p.grad_g && p.project_C,
          "composite problem: all callables must be set");
  require(p.beta > 0.0 && std::isfinite(p.beta), "composite problem: beta must be > 0");
  require(start.size() == p.dim, "composite problem: initial point has wrong dimension");
  if (!(projection_residual(p.project_C, start) <= 1e-9))
    throw InvalidArgument("composite problem: initial point is not in C");
}

// Gradient wrapper that counts calls and, when auditing, calls made off C.
struct AuditedGradient {
  const ConstrainedCompositeProblem& problem;
  const OuterConfig& config;
  RunReport& report;

  Vec operator()(const Vec& x) const {
    ++report.grad_calls;
    if (config.audit_feasibility &&
        projection_residual(problem.project_C, x) > config.feasibility_tol)
      ++report.grad_calls_outside_C;
    return problem.grad_g(x);
  }
};

double objective(const ConstrainedCompositeProblem& p, const Vec& x) { return p.f(x) + p.g(x); }

void log_row(RunReport& r, const ConstrainedCompositeProblem& p, const Stopwatch& clock,
             std::size_t iter, const Vec& x, std::size_t inner, double step) {
  r.trace.rows.push_back({iter, clock.seconds(), objective(p, x), inner, step});
  r.max_projection_residual =
      std::max(r.max_projection_residual, projection_residual(p.project_C, x));
}

}  // namespace

RunReport solve_dr_outer(const ConstrainedCompositeProblem& problem, const OuterConfig& config,
                         const Vec& z0) {
  config.validate();
  check_problem(problem, z0);
  Stopwatch clock;
  RunReport report;
  const AuditedGradient grad{problem, config, report};
  const double kappa = config.kappa;
  const FBSchedule inner_schedule =
      FBSchedule::constant(config.step_factor / (kappa * problem.beta), config.lambda);
  const StopRule inner_stop{config.inner_cap, config.eta};
  const DRMode mode = config.tau > 2.0 - DRSchedule::kTauMargin ? DRMode::StronglyConvex
                                                                 : DRMode::Relaxed;
  const DRSchedule outer = DRSchedule::constant(config.tau, kappa, mode);

  Vec z = z0;
  Vec half = z0;  // z_{-1/2}
  log_row(report, problem, clock, 0, z0, 0, 0.0);
  try {
    for (std::size_t m = 0; m < config.outer_cap; ++m) {
      const InnerResult inner = prox_constrained_smooth(z, kappa, grad, problem.beta,
                                                        problem.project_C, inner_schedule, half,
                                                        inner_stop);
      half = inner.x;
      report.inner_counts.push_back(inner.iterations);
      Vec next = z + outer.tau(m) * (problem.prox_f(kappa, 2.0 * half - z) - half);
      if (!next.allFinite()) throw NonFiniteIterate("solve_dr_outer", m + 1);
      const double step = (next - z).norm();
      z = std::move(next);
      report.outer_iterations = m + 1;
      log_row(report, problem, clock, m + 1, half, inner.iterations, step);
      if (step <= config.outer_tol) {
        report.converged = true;
        break;
      }
    }
    const InnerResult last = prox_constrained_smooth(z, kappa, grad, problem.beta,
                                                     problem.project_C, inner_schedule, half,
                                                     inner_stop);
    report.solution = last.x;
  } catch (const NonFiniteIterate& e) {
    report.solution = half;
    throw SolverAbort(std::string("dr-outer aborted: ") + e.what(), report);
  } catch (const DomainError& e) {
    report.solution = half;
    throw SolverAbort(std::string("dr-outer aborted: ") + e.what(), report);
  }
  report.objective_final = objective(problem, report.solution);
  return report;
}

RunReport solve_fb_outer(const ConstrainedCompositeProblem& problem, const OuterConfig& config,
                         const Vec& x0) {
  config.validate();
  check_problem(problem, x0);
  Stopwatch clock;
  RunReport report;
  const AuditedGradient grad{problem, config, report};
  const double gamma = config.step_factor / problem.beta;
  const FBSchedule schedule = FBSchedule::constant(gamma, config.lambda);
  schedule.validate(problem.beta);
  const StopRule inner_stop{config.inner_cap, config.eta};
  const double tau = config.tau;
  const Sequence taus = [tau](std::size_t) { return tau; };
  const ProxMap prox_gf = [&](const Vec& y) { return problem.prox_f(gamma, y); };

  Vec x = x0;
  log_row(report, problem, clock, 0, x0, 0, 0.0);
  try {
    for (std::size_t n = 0; n < config.outer_cap; ++n) {
      const Vec forward = x - schedule.gamma(n) * grad(x);
      const NonsmoothInnerResult inner =
          prox_constrained_nonsmooth(forward, prox_gf, problem.project_C, taus, inner_stop);
      report.inner_counts.push_back(inner.iterations);
      Vec next = x + schedule.lambda(n) * (inner.x - x);
      if (!next.allFinite()) throw NonFiniteIterate("solve_fb_outer", n + 1);
      const double step = (next - x).norm();
      x = std::move(next);
      report.outer_iterations = n + 1;
      log_row(report, problem, clock, n + 1, x, inner.iterations, step);
      if (step <= config.outer_tol) {
        report.converged = true;
        break;
      }
    }
  } catch (const NonFiniteIterate& e) {
    report.solution = x;
    throw SolverAbort(std::string("fb-outer aborted: ") + e.what(), report);
  } catch (const DomainError& e) {
    report.solution = x;
    throw SolverAbort(std::string("fb-outer aborted: ") + e.what(), report);
  }
  report.solution = std::move(x);
  report.objective_final = objective(problem, report.solution);
  return report;
}

std::size_t theoretical_inner_bound(std::size_t m, const InnerBoundState& state, double xi,
                                    const ConvergenceBound& bound) {
  const double rho = bound.rho;
  require(rho > 0.0 && rho < 1.0, "inner bound: rho must lie in (0, 1)");
  require(xi > 0.0, "inner bound: xi must be > 0");

  std::function<bool(double)> holds;
  double estimate = 1.0;
  const double log_rho = std::log(rho);
  if (m == 0) {
    require(state.kappa > 0.0, "inner bound: kappa must be > 0");
    const double gap = state.g_z0 - state.inf_g;
    require(gap >= 0.0, "inner bound: g(z_0) below inf g(C)");
    const double scale = std::sqrt(2.0 * state.kappa) * std::sqrt(gap);
    holds = [=](double n) { return std::pow(rho, n) * scale <= xi; };
    if (scale > xi) estimate = std::ceil(std::log(xi / scale) / log_rho);
  } else {
    const double move = (state.z_m - state.z_prev).norm();
    const double shift = 1.0 - double(m);
    holds = [=](double n) {
      return std::pow(rho, n - 1.0) + std::pow(rho, n - 1.0 + shift) * move / xi <= 1.0;
    };
    if (move > 0.0 && std::isfinite(xi)) {
      // log(1 + c) with c = rho^{1-m} move / xi, evaluated without overflow.
      const double log_c = std::log(move / xi) + shift * log_rho;
      const double log1pc = log_c > 30.0 ? log_c : std::log1p(std::exp(log_c));
      estimate = 1.0 + std::ceil(log1pc / -log_rho);
    }
  }
  double n = std::max(1.0, estimate);
  while (!holds(n)) n += 1.0;
  while (n > 1.0 && holds(n - 1.0)) n -= 1.0;
  return static_cast<std::size_t>(n);
}

}  // namespace proxsplit
