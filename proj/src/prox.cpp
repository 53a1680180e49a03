#include "proxsplit/prox.hpp"

#include <cmath>
#include <random>

namespace proxsplit {

double exponent_value(PowerExponent p) {
  switch (p) {
    case PowerExponent::FourThirds:
      return 4.0 / 3.0;
    case PowerExponent::ThreeHalves:
      return 1.5;
    case PowerExponent::Two:
      return 2.0;
  }
  return 2.0;
}

std::optional<PowerExponent> parse_exponent(std::string_view text) {
  if (text == "4/3" || text == "1.3333333333333333") return PowerExponent::FourThirds;
  if (text == "3/2" || text == "1.5") return PowerExponent::ThreeHalves;
  if (text == "2" || text == "2.0") return PowerExponent::Two;
  return std::nullopt;
}

std::string_view exponent_name(PowerExponent p) {
  switch (p) {
    case PowerExponent::FourThirds:
      return "4/3";
    case PowerExponent::ThreeHalves:
      return "3/2";
    case PowerExponent::Two:
      return "2";
  }
  return "2";
}

ScalarPotential ScalarPotential::make(double chi, double omega, PowerExponent p) {
  require(std::isfinite(chi) && chi >= 0.0, "potential: chi must be finite and >= 0");
  require(std::isfinite(omega) && omega >= 0.0, "potential: omega must be finite and >= 0");
  return {chi, omega, p};
}

double ScalarPotential::operator()(double t) const {
  const double a = std::abs(t);
  double v = chi * a;
  if (omega != 0.0) v += omega * std::pow(a, exponent_value(p));
  return v;
}

ClosedInterval::ClosedInterval(double lo, double hi) : lo_(lo), hi_(hi) {
  require(!std::isnan(lo) && !std::isnan(hi), "interval endpoints must not be NaN");
  require(lo <= hi, "interval is empty (lo > hi)");
}

double ClosedInterval::clamp(double t) const {
  if (t < lo_) return lo_;
  if (t > hi_) return hi_;
  return t;
}

SeparableConstrainedSpec::SeparableConstrainedSpec(std::vector<ScalarPotential> potentials,
                                                   std::vector<ClosedInterval> intervals)
    : potentials_(std::move(potentials)), intervals_(std::move(intervals)) {
  require(potentials_.size() == intervals_.size(),
          "separable spec: potentials and intervals differ in length");
}

double SeparableConstrainedSpec::value(const Vec& x) const {
  require(static_cast<std::size_t>(x.size()) == size(), "separable spec: dimension mismatch");
  double v = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    if (!intervals_[k].contains(x[k])) return kInf;
    v += potentials_[k](x[k]);
  }
  return v;
}

StrongConvexityModulus::StrongConvexityModulus(double vartheta) : vartheta_(vartheta) {
  require(std::isfinite(vartheta) && vartheta > 0.0, "strong convexity modulus must be > 0");
}

namespace {

// Positive root of s + c s^q = a for a > 0, c > 0, q in (0, 1).
double solve_power_stationarity(double a, double c, double q) {
  const double tol = 1e-12 * std::max(1.0, a);
  double lo = 0.0;
  double hi = a;
  // Ignoring the linear term gives s = (a/c)^{1/q}, an upper bound; take the smaller.
  double s = std::min(a, std::pow(a / c, 1.0 / q));
  for (int it = 0; it < 200; ++it) {
    const double sq = std::pow(s, q);
    const double h = s + c * sq - a;
    if (std::abs(h) <= tol) return s;
    if (h < 0.0)
      lo = s;
    else
      hi = s;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * a) break;
    const double dh = 1.0 + c * q * sq / s;
    double next = s - h / dh;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  return s;
}

}  // namespace

double prox_scalar(const ScalarPotential& phi, double gamma, double t) {
  require(gamma > 0.0, "prox_scalar: gamma must be > 0");
  const double a = std::abs(t) - gamma * phi.chi;
  if (!(a > 0.0)) return std::isnan(t) ? t : 0.0 * t;
  double s = a;
  if (phi.omega > 0.0) {
    switch (phi.p) {
      case PowerExponent::Two:
        s = a / (1.0 + 2.0 * gamma * phi.omega);
        break;
      case PowerExponent::FourThirds:
        s = solve_power_stationarity(a, gamma * phi.omega * (4.0 / 3.0), 1.0 / 3.0);
        break;
      case PowerExponent::ThreeHalves:
        s = solve_power_stationarity(a, gamma * phi.omega * 1.5, 0.5);
        break;
    }
  }
  return std::signbit(t) ? -s : s;
}

double prox_scalar_constrained(const ScalarPotential& phi, double gamma,
                               const ClosedInterval& interval, double t) {
  return interval.clamp(prox_scalar(phi, gamma, t));
}

Vec prox_separable(const SeparableConstrainedSpec& spec, double gamma, const Vec& x) {
  require(static_cast<std::size_t>(x.size()) == spec.size(),
          "prox_separable: dimension mismatch");
  Vec out(x.size());
  const auto& phis = spec.potentials();
  const auto& boxes = spec.intervals();
  for (Eigen::Index k = 0; k < x.size(); ++k)
    out[k] = prox_scalar_constrained(phis[k], gamma, boxes[k], x[k]);
  return out;
}

Vec prox_shift_rule(const ProxMap& prox_h, double kappa, const Vec& u, const Vec& x) {
  require(u.size() == x.size(), "prox_shift_rule: dimension mismatch");
  return prox_h(x - kappa * u);
}

Vec prox_quadratic_rule(const ScaledProx& prox_h, const StrongConvexityModulus& vartheta,
                        const Vec& x) {
  const double c = vartheta.contraction();
  return prox_h(c, c * x);
}

SemiOrthogonalOp::SemiOrthogonalOp(ProxMap forward, ProxMap adjoint, double nu,
                                   Eigen::Index dim_h, Eigen::Index dim_g, unsigned probe_seed)
    : forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      nu_(nu),
      dim_h_(dim_h),
      dim_g_(dim_g) {
  require(nu > 0.0 && std::isfinite(nu), "semi-orthogonal operator: nu must be > 0");
  std::mt19937_64 rng(probe_seed);
  std::normal_distribution<double> normal;
  for (int probe = 0; probe < 3; ++probe) {
    Vec y(dim_g_);
    for (auto& v : y) v = normal(rng);
    const Vec back = forward_(adjoint_(y));
    require(back.size() == dim_g_, "semi-orthogonal operator: forward/adjoint shape mismatch");
    const double rel = (back - nu_ * y).norm() / (nu_ * y.norm());
    if (!(rel <= 1e-10))
      throw InvalidArgument("semi-orthogonal operator: L L* != nu Id (relative error " +
                            std::to_string(rel) + ")");
  }
}

Vec prox_semiorthogonal(const ProxMap& prox_nu_f, const SemiOrthogonalOp& op, const Vec& x) {
  const Vec lx = op.forward(x);
  return x + op.adjoint(prox_nu_f(lx) - lx) / op.nu();
}

}  // namespace proxsplit
