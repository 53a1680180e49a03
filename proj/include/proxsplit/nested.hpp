#pragma once
// Minimization of f + g + iota_C with g smooth on C only.
//
//  * solve_dr_outer: Douglas-Rachford on (f, iota_C + g), the second prox
//    computed by warm-started forward-backward iterations.
//  * solve_fb_outer: forward-backward on (iota_C + f, g), the prox computed by
//    Douglas-Rachford iterations started at the reflected point.
//
// Both keep every point at which grad g is evaluated inside C.

#include "proxsplit/core.hpp"
#include "proxsplit/splitting.hpp"
#include "proxsplit/trace.hpp"

#include <optional>
#include <vector>

namespace proxsplit {

struct ConstrainedCompositeProblem {
  Eigen::Index dim = 0;
  Objective f;         ///< value of f
  ScaledProx prox_f;   ///< prox_{gamma f}
  Objective g;         ///< value of g, +inf outside its domain
  GradientMap grad_g;  ///< only valid on C
  double beta = 0.0;   ///< Lipschitz constant of grad g on C
  ProxMap project_C;
  std::optional<double> inf_g_on_C;  ///< lower bound of g over C, when known
};

struct OuterConfig {
  double kappa = 60.0;
  double eta = 1e-4;            ///< inner step-norm tolerance
  std::size_t inner_cap = 1000;
  std::size_t outer_cap = 500;
  double outer_tol = 1e-6;      ///< outer step-norm tolerance
  /// Inner step gamma = step_factor / (kappa beta) for dr-outer; outer step
  /// gamma = step_factor / beta for fb-outer. Must be < 2.
  double step_factor = 0.995;
  double lambda = 1.0;
  double tau = 1.0;
  /// Count gradient evaluations at points farther than feasibility_tol from C.
  /// Costs one projection per gradient call.
  bool audit_feasibility = false;
  double feasibility_tol = 1e-9;

  void validate() const;
};

struct RunReport {
  Vec solution;
  RunTrace trace;  ///< row 0 is the initial point
  std::vector<std::size_t> inner_counts;
  double objective_final = 0.0;
  std::size_t outer_iterations = 0;
  bool converged = false;
  std::size_t grad_calls = 0;
  std::size_t grad_calls_outside_C = 0;
  double max_projection_residual = 0.0;  ///< over logged iterates, relative
};

/// A solve stopped on a non-finite iterate or a domain violation. Carries
/// everything recorded up to that point.
class SolverAbort : public Error {
 public:
  SolverAbort(const std::string& what, RunReport partial)
      : Error(what), partial_(std::move(partial)) {}
  const RunReport& partial() const noexcept { return partial_; }

 private:
  RunReport partial_;
};

/// Relative distance ||P_C(x) - x|| / max(1, ||x||).
double projection_residual(const ProxMap& project_C, const Vec& x);

RunReport solve_dr_outer(const ConstrainedCompositeProblem& problem, const OuterConfig& config,
                         const Vec& z0);

RunReport solve_fb_outer(const ConstrainedCompositeProblem& problem, const OuterConfig& config,
                         const Vec& x0);

struct InnerBoundState {
  double kappa = 1.0;
  double g_z0 = 0.0;    ///< g(z_0)
  double inf_g = 0.0;   ///< inf g(C)
  Vec z_m;
  Vec z_prev;           ///< z_{m-1}; ignored for m = 0
};

/// Smallest N >= 1 meeting the sufficient inner-iteration condition of the
/// dr-outer convergence result:
///   m = 0: rho^N sqrt(2 kappa) (g(z_0) - inf g(C))^{1/2} <= xi
///   m > 0: rho^{N-1} (1 + xi^{-1} rho^{1-m} ||z_m - z_{m-1}||) <= 1
/// Diagnostic only; the solvers use the step-norm rule.
std::size_t theoretical_inner_bound(std::size_t m, const InnerBoundState& state, double xi,
                                    const ConvergenceBound& rho);

}  // namespace proxsplit
