#pragma once
// Proximity operators of separable potentials, with and without interval
// constraints, plus the calculus rules used to build new prox maps from old.

#include "proxsplit/core.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace proxsplit {

/// Exponent of the power term of a ScalarPotential.
enum class PowerExponent { FourThirds, ThreeHalves, Two };

double exponent_value(PowerExponent p);
/// Parses "4/3", "3/2", "2" (and their decimal spellings).
std::optional<PowerExponent> parse_exponent(std::string_view text);
std::string_view exponent_name(PowerExponent p);

/// phi(t) = chi |t| + omega |t|^p with chi, omega >= 0.
struct ScalarPotential {
  double chi = 0.0;
  double omega = 0.0;
  PowerExponent p = PowerExponent::Two;

  static ScalarPotential make(double chi, double omega, PowerExponent p);
  double operator()(double t) const;
};

/// Closed interval of the extended real line; infinite endpoints are allowed.
class ClosedInterval {
 public:
  ClosedInterval() = default;
  /// Throws InvalidArgument when lo > hi or either endpoint is NaN.
  ClosedInterval(double lo, double hi);

  static ClosedInterval whole_line() { return {}; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool contains(double t) const { return t >= lo_ && t <= hi_; }
  double clamp(double t) const;

 private:
  double lo_ = -kInf;
  double hi_ = kInf;
};

/// Per-coordinate potentials and intervals in the canonical basis.
class SeparableConstrainedSpec {
 public:
  SeparableConstrainedSpec(std::vector<ScalarPotential> potentials,
                           std::vector<ClosedInterval> intervals);

  std::size_t size() const { return potentials_.size(); }
  const std::vector<ScalarPotential>& potentials() const { return potentials_; }
  const std::vector<ClosedInterval>& intervals() const { return intervals_; }

  double value(const Vec& x) const;  ///< sum of potentials, +inf off the box

 private:
  std::vector<ScalarPotential> potentials_;
  std::vector<ClosedInterval> intervals_;
};

class StrongConvexityModulus {
 public:
  explicit StrongConvexityModulus(double vartheta);
  double value() const { return vartheta_; }
  /// Contraction constant (1 + vartheta)^{-1} of the prox of a vartheta-strongly convex function.
  double contraction() const { return 1.0 / (1.0 + vartheta_); }

 private:
  double vartheta_;
};

/// Minimizer of ½(y - t)² + gamma phi(y).
///
/// Soft-thresholding handles the |.| term; the remaining one-dimensional
/// stationarity equation y + gamma omega p y^{p-1} = |t| - gamma chi is closed
/// form for p = 2 and solved by safeguarded Newton/bisection otherwise. The
/// result is computed for |t| and re-signed, so it is exactly odd in t.
double prox_scalar(const ScalarPotential& phi, double gamma, double t);

/// prox of gamma phi + indicator(interval): clamp of the unconstrained prox.
double prox_scalar_constrained(const ScalarPotential& phi, double gamma,
                               const ClosedInterval& interval, double t);

/// Coordinate-wise prox_scalar_constrained. Bit-identical to the scalar path.
Vec prox_separable(const SeparableConstrainedSpec& spec, double gamma, const Vec& x);

/// prox of h + <kappa u, .>: prox_h(x - kappa u).
Vec prox_shift_rule(const ProxMap& prox_h, double kappa, const Vec& u, const Vec& x);

/// prox of h + (vartheta/2)||.||²: prox_{h/(1+vartheta)}(x / (1 + vartheta)).
Vec prox_quadratic_rule(const ScaledProx& prox_h, const StrongConvexityModulus& vartheta,
                        const Vec& x);

/// Linear operator L: H -> G with L L* = nu Id.
class SemiOrthogonalOp {
 public:
  /// Checks forward(adjoint(y)) = nu y on random probes; throws on violation.
  SemiOrthogonalOp(ProxMap forward, ProxMap adjoint, double nu, Eigen::Index dim_h,
                   Eigen::Index dim_g, unsigned probe_seed = 12345);

  Vec forward(const Vec& x) const { return forward_(x); }
  Vec adjoint(const Vec& y) const { return adjoint_(y); }
  double nu() const { return nu_; }
  Eigen::Index dim_h() const { return dim_h_; }
  Eigen::Index dim_g() const { return dim_g_; }

 private:
  ProxMap forward_;
  ProxMap adjoint_;
  double nu_;
  Eigen::Index dim_h_;
  Eigen::Index dim_g_;
};

/// prox of f o L = Id + nu^{-1} L* (prox_{nu f} - Id) L.
Vec prox_semiorthogonal(const ProxMap& prox_nu_f, const SemiOrthogonalOp& op, const Vec& x);

}  // namespace proxsplit
