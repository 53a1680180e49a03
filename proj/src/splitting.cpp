#include "proxsplit/splitting.hpp"

#include <cmath>

namespace proxsplit {

FBSchedule::FBSchedule(Sequence gamma, Sequence lambda, double gamma_lo, double gamma_hi,
                       double lambda_lo)
    : gamma_(std::move(gamma)),
      lambda_(std::move(lambda)),
      gamma_lo_(gamma_lo),
      gamma_hi_(gamma_hi),
      lambda_lo_(lambda_lo) {
  require(gamma_lo_ > 0.0 && gamma_lo_ <= gamma_hi_, "FB schedule: need 0 < gamma_lo <= gamma_hi");
  require(lambda_lo_ > 0.0 && lambda_lo_ <= 1.0, "FB schedule: need 0 < lambda_lo <= 1");
}

FBSchedule FBSchedule::constant(double gamma, double lambda) {
  return FBSchedule([gamma](std::size_t) { return gamma; },
                    [lambda](std::size_t) { return lambda; }, gamma, gamma, lambda);
}

void FBSchedule::validate(double beta) const {
  require(beta > 0.0 && std::isfinite(beta), "FB schedule: Lipschitz constant must be > 0");
  if (!(gamma_hi_ < 2.0 / beta))
    throw InvalidArgument("FB schedule: gamma_hi = " + std::to_string(gamma_hi_) +
                          " is not below 2/beta = " + std::to_string(2.0 / beta));
}

double FBSchedule::gamma(std::size_t n) const {
  const double g = gamma_(n);
  if (!(g >= gamma_lo_ && g <= gamma_hi_))
    throw InvalidArgument("FB schedule: gamma_n left [gamma_lo, gamma_hi] at n = " +
                          std::to_string(n));
  return g;
}

double FBSchedule::lambda(std::size_t n) const {
  const double l = lambda_(n);
  if (!(l >= lambda_lo_ && l <= 1.0))
    throw InvalidArgument("FB schedule: lambda_n left [lambda_lo, 1] at n = " +
                          std::to_string(n));
  return l;
}

DRSchedule::DRSchedule(Sequence tau, double tau_lo, double tau_hi, double kappa, DRMode mode)
    : tau_(std::move(tau)), tau_lo_(tau_lo), tau_hi_(tau_hi), kappa_(kappa), mode_(mode) {
  require(kappa_ > 0.0 && std::isfinite(kappa_), "DR schedule: kappa must be > 0");
  require(tau_lo_ > 0.0 && tau_lo_ <= tau_hi_ && tau_hi_ <= 2.0,
          "DR schedule: need 0 < tau_lo <= tau_hi <= 2");
  if (mode_ == DRMode::Relaxed)
    require(tau_hi_ <= 2.0 - kTauMargin,
            "DR schedule: tau_m = 2 needs the strongly convex mode");
}

DRSchedule DRSchedule::constant(double tau, double kappa, DRMode mode) {
  return DRSchedule([tau](std::size_t) { return tau; }, tau, tau, kappa, mode);
}

double DRSchedule::tau(std::size_t m) const {
  const double t = tau_(m);
  if (!(t >= tau_lo_ && t <= tau_hi_))
    throw InvalidArgument("DR schedule: tau_m left [tau_lo, tau_hi] at m = " + std::to_string(m));
  return t;
}

ConvergenceBound ConvergenceBound::forward_backward(double lambda_lo, double gamma_lo,
                                                    double vartheta) {
  require(lambda_lo > 0.0 && gamma_lo > 0.0 && vartheta > 0.0,
          "convergence bound: parameters must be > 0");
  const double gv = gamma_lo * vartheta;
  return {1.0 - lambda_lo * gv / (1.0 + gv), "forward-backward, strongly convex f1"};
}

ConvergenceBound ConvergenceBound::constrained_smooth(const FBSchedule& schedule) {
  auto b = forward_backward(schedule.lambda_lo(), schedule.gamma_lo(), 1.0);
  b.source = "forward-backward prox of iota_C + kappa g";
  return b;
}

namespace {

void check_finite(const Vec& v, const char* where, std::size_t n) {
  if (!v.allFinite()) throw NonFiniteIterate(where, n);
}

}  // namespace

FBResult fb_solve(const ScaledProx& prox_f1, const GradientMap& grad_f2, double beta,
                  const FBSchedule& schedule, const ErrorInjection& errors, const Vec& x0,
                  const StopRule& stop, const Monitor& monitor) {
  schedule.validate(beta);
  Stopwatch clock;
  FBResult res;
  Vec x = x0;
  check_finite(x, "fb_solve", 0);
  if (monitor.observer) monitor.observer(0, x);
  for (std::size_t n = 0; n < stop.max_iters; ++n) {
    const double gamma = schedule.gamma(n);
    const double lambda = schedule.lambda(n);
    Vec forward = x - gamma * grad_f2(x);
    if (errors.b) forward += errors.b(n);
    Vec p = prox_f1(gamma, forward);
    if (errors.a) p += errors.a(n);
    Vec next = x + lambda * (p - x);
    check_finite(next, "fb_solve", n + 1);
    const double step = (next - x).norm();
    x = std::move(next);
    if (monitor.observer) monitor.observer(n + 1, x);
    res.trace.rows.push_back({n + 1, clock.seconds(),
                              monitor.objective ? monitor.objective(x) : std::nan(""), 0, step});
    if (step <= stop.step_tol) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  return res;
}

DRResult dr_solve(const ScaledProx& prox_g1, const ScaledProx& prox_g2,
                  const DRSchedule& schedule, const ErrorInjection& errors, const Vec& z0,
                  const StopRule& stop, const Monitor& monitor) {
  Stopwatch clock;
  DRResult res;
  const double kappa = schedule.kappa();
  Vec z = z0;
  check_finite(z, "dr_solve", 0);
  for (std::size_t m = 0; m < stop.max_iters; ++m) {
    Vec half = prox_g2(kappa, z);
    if (errors.b) half += errors.b(m);
    if (monitor.observer) monitor.observer(m, half);
    Vec p = prox_g1(kappa, 2.0 * half - z);
    if (errors.a) p += errors.a(m);
    Vec next = z + schedule.tau(m) * (p - half);
    check_finite(next, "dr_solve", m + 1);
    const double step = (next - z).norm();
    z = std::move(next);
    res.trace.rows.push_back({m + 1, clock.seconds(),
                              monitor.objective ? monitor.objective(half) : std::nan(""), 0,
                              step});
    if (step <= stop.step_tol) {
      res.converged = true;
      break;
    }
  }
  res.solution = prox_g2(kappa, z);
  res.z = std::move(z);
  return res;
}

InnerResult prox_constrained_smooth(const Vec& x, double kappa, const GradientMap& grad_g,
                                    double beta, const ProxMap& project_C,
                                    const FBSchedule& schedule, const Vec& x_init,
                                    const StopRule& stop, const IterateObserver& observer) {
  require(kappa > 0.0, "prox_constrained_smooth: kappa must be > 0");
  require(x_init.size() == x.size(), "prox_constrained_smooth: dimension mismatch");
  schedule.validate(kappa * beta);
  InnerResult res;
  Vec xn = x_init;
  check_finite(xn, "prox_constrained_smooth", 0);
  if (observer) observer(0, xn);
  for (std::size_t n = 0; n < stop.max_iters; ++n) {
    const double gamma = schedule.gamma(n);
    const double lambda = schedule.lambda(n);
    const Vec p = project_C((xn - gamma * (kappa * grad_g(xn) - x)) / (1.0 + gamma));
    Vec next = xn + lambda * (p - xn);
    check_finite(next, "prox_constrained_smooth", n + 1);
    res.last_step = (next - xn).norm();
    xn = std::move(next);
    res.iterations = n + 1;
    if (observer) observer(n + 1, xn);
    if (res.last_step <= stop.step_tol) break;
  }
  res.x = std::move(xn);
  return res;
}

NonsmoothInnerResult prox_constrained_nonsmooth(const Vec& x, const ProxMap& prox_gf,
                                                const ProxMap& project_C, const Sequence& tau,
                                                const StopRule& stop,
                                                const IterateObserver& observer) {
  NonsmoothInnerResult res;
  Vec z = 2.0 * prox_gf(x) - x;
  check_finite(z, "prox_constrained_nonsmooth", 0);
  const std::size_t cap = std::max<std::size_t>(stop.max_iters, 1);
  for (std::size_t m = 0; m < cap; ++m) {
    const double t = tau(m);
    if (!(t > 0.0 && t <= 2.0))
      throw InvalidArgument("prox_constrained_nonsmooth: tau_m must lie in (0, 2]");
    Vec half = project_C(0.5 * (z + x));
    if (observer) observer(m, half);
    Vec next = z + t * (prox_gf(2.0 * half - z) - half);
    check_finite(next, "prox_constrained_nonsmooth", m + 1);
    res.iterations = m + 1;
    res.x = std::move(half);
    if (next == z) {
      res.fixed_point = true;
      break;
    }
    const double step = (next - z).norm();
    z = std::move(next);
    if (step <= stop.step_tol) break;
  }
  res.z = std::move(z);
  return res;
}

InnerResult projected_gradient_prox(const Vec& x, double kappa, const GradientMap& grad_g,
                                    double beta, const ProxMap& project_C,
                                    const FBSchedule& schedule, const StopRule& stop) {
  require(kappa >= 0.0, "projected_gradient_prox: kappa must be >= 0");
  schedule.validate(kappa * beta + 1.0);
  InnerResult res;
  Vec xn = project_C(x);
  for (std::size_t n = 0; n < stop.max_iters; ++n) {
    const double gamma = schedule.gamma(n);
    const double lambda = schedule.lambda(n);
    Vec direction = xn - x;
    if (kappa > 0.0) direction += kappa * grad_g(xn);
    Vec next = xn + lambda * (project_C(xn - gamma * direction) - xn);
    check_finite(next, "projected_gradient_prox", n + 1);
    res.last_step = (next - xn).norm();
    xn = std::move(next);
    res.iterations = n + 1;
    if (res.last_step <= stop.step_tol) break;
  }
  res.x = std::move(xn);
  return res;
}

}  // namespace proxsplit
