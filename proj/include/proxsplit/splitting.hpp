#pragma once
// Forward-backward and Douglas-Rachford iteration engines, and the two inner
// solvers that compute prox_{iota_C + kappa g} (smooth g, forward-backward)
// and prox_{iota_C + gamma f} (prox-friendly f, Douglas-Rachford).
//
// Engines are problem-agnostic: prox maps and gradients arrive as callables
// together with their declared constants.

#include "proxsplit/core.hpp"
#include "proxsplit/trace.hpp"

#include <functional>
#include <string>

namespace proxsplit {

using Sequence = std::function<double(std::size_t)>;
using IterateObserver = std::function<void(std::size_t n, const Vec& x)>;

/// Step sizes gamma_n and relaxations lambda_n of a forward-backward run,
/// with the bounds the convergence theory is stated in.
class FBSchedule {
 public:
  FBSchedule(Sequence gamma, Sequence lambda, double gamma_lo, double gamma_hi,
             double lambda_lo);
  static FBSchedule constant(double gamma, double lambda = 1.0);

  /// Throws unless 0 < gamma_lo <= gamma_hi < 2/beta and 0 < lambda_lo <= 1.
  void validate(double beta) const;

  /// Values at iteration n; throws if they leave the declared bounds.
  double gamma(std::size_t n) const;
  double lambda(std::size_t n) const;

  double gamma_lo() const { return gamma_lo_; }
  double gamma_hi() const { return gamma_hi_; }
  double lambda_lo() const { return lambda_lo_; }

 private:
  Sequence gamma_;
  Sequence lambda_;
  double gamma_lo_;
  double gamma_hi_;
  double lambda_lo_;
};

/// Convergence regime of a Douglas-Rachford run. `Relaxed` needs
/// sum tau_m (2 - tau_m) = inf, enforced as tau_m <= 2 - kTauMargin.
/// `StronglyConvex` declares g2 strongly convex, which admits tau_m = 2
/// (Peaceman-Rachford).
enum class DRMode { Relaxed, StronglyConvex };

class DRSchedule {
 public:
  static constexpr double kTauMargin = 1e-6;

  DRSchedule(Sequence tau, double tau_lo, double tau_hi, double kappa,
             DRMode mode = DRMode::Relaxed);
  static DRSchedule constant(double tau, double kappa = 1.0, DRMode mode = DRMode::Relaxed);

  double tau(std::size_t m) const;
  double kappa() const { return kappa_; }
  double tau_lo() const { return tau_lo_; }
  double tau_hi() const { return tau_hi_; }
  DRMode mode() const { return mode_; }

 private:
  Sequence tau_;
  double tau_lo_;
  double tau_hi_;
  double kappa_;
  DRMode mode_;
};

/// Perturbations added to the prox (a_n) and to the gradient or second prox
/// (b_n). Empty callables mean no perturbation.
struct ErrorInjection {
  std::function<Vec(std::size_t)> a;
  std::function<Vec(std::size_t)> b;
};

/// Guaranteed per-iteration contraction factor of an iteration.
struct ConvergenceBound {
  double rho = 1.0;
  std::string source;

  /// 1 - lambda_lo gamma_lo vartheta / (1 + gamma_lo vartheta): forward-backward
  /// with a vartheta-strongly convex f1.
  static ConvergenceBound forward_backward(double lambda_lo, double gamma_lo, double vartheta);
  /// The same with vartheta = 1, the modulus of ½||. - x||² + iota_C.
  static ConvergenceBound constrained_smooth(const FBSchedule& schedule);
};

/// Optional per-iteration hooks. `objective` fills TraceRow::objective;
/// `observer` sees every iterate, starting with the initial point at n = 0.
struct Monitor {
  Objective objective;
  IterateObserver observer;
};

struct FBResult {
  Vec x;
  RunTrace trace;
  bool converged = false;
};

/// x_{n+1} = x_n + lambda_n (prox_{gamma_n f1}(x_n - gamma_n grad f2(x_n) + b_n) + a_n - x_n).
FBResult fb_solve(const ScaledProx& prox_f1, const GradientMap& grad_f2, double beta,
                  const FBSchedule& schedule, const ErrorInjection& errors, const Vec& x0,
                  const StopRule& stop, const Monitor& monitor = {});

struct DRResult {
  Vec z;         ///< final z_m
  Vec solution;  ///< prox_{kappa g2}(z)
  RunTrace trace;
  bool converged = false;
};

/// z_{m+1/2} = prox_{kappa g2} z_m + b_m;
/// z_{m+1} = z_m + tau_m (prox_{kappa g1}(2 z_{m+1/2} - z_m) + a_m - z_{m+1/2}).
/// The observer sees the half-iterates z_{m+1/2}.
DRResult dr_solve(const ScaledProx& prox_g1, const ScaledProx& prox_g2,
                  const DRSchedule& schedule, const ErrorInjection& errors, const Vec& z0,
                  const StopRule& stop, const Monitor& monitor = {});

struct InnerResult {
  Vec x;
  std::size_t iterations = 0;
  double last_step = 0.0;
};

/// prox_{iota_C + kappa g}(x) by forward-backward with f1 = ½||. - x||² + iota_C:
/// x_{n+1} = x_n + lambda_n (P_C((x_n - gamma_n (kappa grad g(x_n) - x)) / (1 + gamma_n)) - x_n).
/// Stops at the first n >= 1 with ||x_n - x_{n-1}|| <= stop.step_tol, or at
/// stop.max_iters. Requires gamma_hi < 2 / (kappa beta).
InnerResult prox_constrained_smooth(const Vec& x, double kappa, const GradientMap& grad_g,
                                    double beta, const ProxMap& project_C,
                                    const FBSchedule& schedule, const Vec& x_init,
                                    const StopRule& stop, const IterateObserver& observer = {});

struct NonsmoothInnerResult {
  Vec x;  ///< last half-iterate z_{m+1/2}; always in C
  Vec z;  ///< last full iterate
  std::size_t iterations = 0;
  bool fixed_point = false;  ///< z_{m+1} == z_m exactly
};

/// prox_{iota_C + gamma f}(x) by Douglas-Rachford with kappa = 1 and
/// z_0 = 2 prox_{gamma f}(x) - x:
/// z_{m+1/2} = P_C((z_m + x) / 2);
/// z_{m+1} = z_m + tau_m (prox_{gamma f}(2 z_{m+1/2} - z_m) - z_{m+1/2}).
/// `prox_gf` is prox_{gamma f} with gamma already applied. Stops on an exact
/// fixed point, on ||z_{m+1} - z_m|| <= stop.step_tol, or at stop.max_iters.
/// The observer sees the half-iterates.
NonsmoothInnerResult prox_constrained_nonsmooth(const Vec& x, const ProxMap& prox_gf,
                                                const ProxMap& project_C, const Sequence& tau,
                                                const StopRule& stop,
                                                const IterateObserver& observer = {});

/// Projected-gradient alternative for prox_{iota_C + kappa g}(x):
/// x_{n+1} = x_n + lambda_n (P_C(x_n - gamma_n (kappa grad g(x_n) + x_n - x)) - x_n),
/// started from P_C(x). Requires gamma_hi < 2 / (kappa beta + 1); kappa = 0 allowed.
InnerResult projected_gradient_prox(const Vec& x, double kappa, const GradientMap& grad_g,
                                    double beta, const ProxMap& project_C,
                                    const FBSchedule& schedule, const StopRule& stop);

}  // namespace proxsplit
