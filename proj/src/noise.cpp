#include "proxsplit/noise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace proxsplit {

std::string_view noise_kind_name(NoiseKind kind) {
  return kind == NoiseKind::Poisson ? "poisson" : "gaussian";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "poisson") return NoiseKind::Poisson;
  if (text == "gaussian") return NoiseKind::SignalDepGaussian;
  throw InvalidArgument("unknown noise family '" + std::string(text) +
                        "' (expected gaussian or poisson)");
}

NoiseFamily NoiseFamily::uniform(NoiseKind kind, std::size_t pixels, double alpha) {
  NoiseFamily fam{kind, std::vector<double>(pixels, alpha), 0.0};
  fam.validate();
  return fam;
}

void NoiseFamily::validate() const {
  require(!alpha.empty(), "noise family: no pixels");
  for (double a : alpha) require(a > 0.0 && std::isfinite(a), "noise family: alpha must be > 0");
  require(delta == 0.0, "noise family: only delta = 0 is supported");
}

Observation::Observation(NoiseKind kind, std::vector<double> z)
    : z_(std::move(z)), in_set_(z_.size(), 0) {
  require(!z_.empty(), "observation: empty image");
  std::size_t count = 0;
  for (std::size_t i = 0; i < z_.size(); ++i) {
    const double v = z_[i];
    require(std::isfinite(v), "observation: non-finite pixel " + std::to_string(i));
    if (kind == NoiseKind::Poisson) {
      require(v >= 0.0 && v == std::floor(v),
              "observation: Poisson counts must be non-negative integers (pixel " +
                  std::to_string(i) + ")");
      in_set_[i] = v > 0.0;
    } else {
      in_set_[i] = v != 0.0;
    }
    count += in_set_[i];
  }
  require(count > 0, "observation: z is identically zero");
}

std::size_t Observation::index_set_size() const {
  return static_cast<std::size_t>(std::count(in_set_.begin(), in_set_.end(), char{1}));
}

double EpsilonRule::operator()(double theta) const {
  require(theta > 0.0, "epsilon rule: theta must be > 0");
  return kind == Kind::Constant ? c : c / theta;
}

EpsilonRule EpsilonRule::parse(std::string_view text) {
  const auto colon = text.find(':');
  require(colon != std::string_view::npos,
          "epsilon rule must look like constant:<value> or inverse:<value>");
  const auto head = text.substr(0, colon);
  const std::string tail(text.substr(colon + 1));
  EpsilonRule rule;
  if (head == "constant")
    rule.kind = Kind::Constant;
  else if (head == "inverse")
    rule.kind = Kind::InverseTheta;
  else
    throw InvalidArgument("epsilon rule: unknown kind '" + std::string(head) + "'");
  std::size_t used = 0;
  try {
    rule.c = std::stod(tail, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == tail.size() && used > 0 && rule.c > 0.0,
          "epsilon rule: value must be a positive number");
  return rule;
}

namespace {

void check_pixel(const NoiseFamily& family, const Observation& obs, std::size_t i) {
  if (i >= obs.size() || i >= family.alpha.size())
    throw InvalidArgument("pixel index " + std::to_string(i) + " out of range");
}

void require_in_set(const Observation& obs, std::size_t i) {
  if (!obs.in_index_set(i))
    throw InvalidArgument("pixel " + std::to_string(i) + " is not in the index set");
}

}  // namespace

double psi_eval(const NoiseFamily& family, const Observation& obs, std::size_t i, double v) {
  check_pixel(family, obs, i);
  const double alpha = family.alpha[i];
  const double delta = family.delta;
  if (!obs.in_index_set(i)) return v >= delta ? alpha * v : kInf;
  if (!(v > delta)) return kInf;
  const double z = obs.z()[i];
  if (family.kind == NoiseKind::SignalDepGaussian) return alpha * (v - z) * (v - z) / v;
  return alpha * v - z + z * std::log(z / (alpha * v));
}

double psi_derivative(const NoiseFamily& family, const Observation& obs, std::size_t i,
                      double v) {
  check_pixel(family, obs, i);
  const double alpha = family.alpha[i];
  if (!obs.in_index_set(i)) return alpha;
  const double z = obs.z()[i];
  if (family.kind == NoiseKind::SignalDepGaussian) return alpha * (v * v - z * z) / (v * v);
  return alpha - z / v;
}

double psi_second_derivative(const NoiseFamily& family, const Observation& obs, std::size_t i,
                             double v) {
  check_pixel(family, obs, i);
  if (!obs.in_index_set(i)) return 0.0;
  const double z = obs.z()[i];
  if (family.kind == NoiseKind::SignalDepGaussian)
    return 2.0 * family.alpha[i] * z * z / (v * v * v);
  return z / (v * v);
}

double upsilon_threshold(const NoiseFamily& family, const Observation& obs, std::size_t i,
                         double theta) {
  check_pixel(family, obs, i);
  require_in_set(obs, i);
  require(theta > 0.0, "upsilon_threshold: theta must be > 0");
  const double z = obs.z()[i];
  if (family.kind == NoiseKind::SignalDepGaussian)
    return std::cbrt(2.0 * family.alpha[i] * z * z / theta);
  return std::sqrt(z / theta);
}

ZetaCoeffs zeta_coeffs(const NoiseFamily& family, const Observation& obs, std::size_t i,
                       double theta) {
  const double u = upsilon_threshold(family, obs, i, theta);
  const double d1 = psi_derivative(family, obs, i, u);
  return {psi_eval(family, obs, i, u) - u * d1 + 0.5 * theta * u * u, d1 - theta * u};
}

ExtensionParams ExtensionParams::build(const NoiseFamily& family, const Observation& obs,
                                       double theta, const EpsilonRule& epsilon) {
  family.validate();
  require(family.alpha.size() == obs.size(), "extension: alpha and z differ in size");
  require(theta > 0.0 && std::isfinite(theta), "extension: theta must be > 0");
  ExtensionParams ext;
  ext.theta = theta;
  ext.epsilon = epsilon(theta);
  const double nan = std::nan("");
  ext.upsilon.assign(obs.size(), nan);
  ext.zeta0.assign(obs.size(), nan);
  ext.zeta1.assign(obs.size(), nan);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!obs.in_index_set(i)) continue;
    ext.upsilon[i] = upsilon_threshold(family, obs, i, theta);
    const ZetaCoeffs zc = zeta_coeffs(family, obs, i, theta);
    ext.zeta0[i] = zc.zeta0;
    ext.zeta1[i] = zc.zeta1;
  }
  return ext;
}

double psi_theta_eval(const NoiseFamily& family, const Observation& obs,
                      const ExtensionParams& ext, std::size_t i, double v) {
  check_pixel(family, obs, i);
  if (v < family.delta - ext.epsilon) return kInf;
  if (!obs.in_index_set(i)) return family.alpha[i] * v;
  if (v < ext.upsilon[i]) return (0.5 * ext.theta * v + ext.zeta1[i]) * v + ext.zeta0[i];
  return psi_eval(family, obs, i, v);
}

double psi_theta_grad(const NoiseFamily& family, const Observation& obs,
                      const ExtensionParams& ext, std::size_t i, double v) {
  check_pixel(family, obs, i);
  if (!(v > family.delta - ext.epsilon))
    throw DomainError("data term gradient: pixel " + std::to_string(i) + " has value " +
                          std::to_string(v) + " at or below delta - epsilon(theta)",
                      static_cast<std::ptrdiff_t>(i));
  if (!obs.in_index_set(i)) return family.alpha[i];
  if (v < ext.upsilon[i]) return ext.theta * v + ext.zeta1[i];
  return psi_derivative(family, obs, i, v);
}

double anscombe_eval(double alpha, double z, double v) {
  if (!(v >= 0.0)) return kInf;
  const double r = 2.0 * std::sqrt(alpha * v + 0.375) - z;
  return 0.5 * r * r;
}

double lipschitz_beta_theta(double theta, double opnorm_TFstar) {
  require(theta > 0.0, "beta_theta: theta must be > 0");
  require(opnorm_TFstar >= 0.0, "beta_theta: operator norm must be >= 0");
  return theta * opnorm_TFstar * opnorm_TFstar;
}

SmoothDataTerm::SmoothDataTerm(NoiseFamily family, Observation obs, ExtensionParams ext,
                               LinearOperatorPair chain, double opnorm_TFstar)
    : family_(std::move(family)),
      obs_(std::move(obs)),
      ext_(std::move(ext)),
      chain_(std::move(chain)),
      beta_(lipschitz_beta_theta(ext_.theta, opnorm_TFstar)) {
  family_.validate();
  require(family_.alpha.size() == obs_.size() && ext_.upsilon.size() == obs_.size(),
          "data term: pixel counts disagree");
  require(static_cast<std::size_t>(chain_.dim_out) == obs_.size(),
          "data term: operator output size differs from the image size");
}

double SmoothDataTerm::image_value(const Vec& u) const {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    total += psi_theta_eval(family_, obs_, ext_, static_cast<std::size_t>(i), u[i]);
    if (total == kInf) return kInf;
  }
  return total;
}

Vec SmoothDataTerm::image_gradient(const Vec& u) const {
  Vec grad(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    grad[i] = psi_theta_grad(family_, obs_, ext_, static_cast<std::size_t>(i), u[i]);
  return grad;
}

double SmoothDataTerm::value(const Vec& x) const { return image_value(chain_.forward(x)); }

double SmoothDataTerm::unextended_value(const Vec& x) const {
  const Vec u = chain_.forward(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    total += psi_eval(family_, obs_, static_cast<std::size_t>(i), u[i]);
    if (total == kInf) return kInf;
  }
  return total;
}

Vec SmoothDataTerm::gradient(const Vec& x) const {
  return chain_.adjoint(image_gradient(chain_.forward(x)));
}

double SmoothDataTerm::analytic_lower_bound() const {
  const double delta = family_.delta;
  double total = 0.0;
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    if (!obs_.in_index_set(i)) {
      total += family_.alpha[i] * delta;
      continue;
    }
    const double z = obs_.z()[i];
    const double ups = ext_.upsilon[i];
    // psi branch on [upsilon, inf): psi_i is minimized at |z| (Gaussian) or z / alpha (Poisson).
    const double vmin = family_.kind == NoiseKind::SignalDepGaussian ? std::abs(z)
                                                                     : z / family_.alpha[i];
    double best = psi_eval(family_, obs_, i, std::max(vmin, ups));
    // quadratic branch on [delta, upsilon]
    const double vertex = -ext_.zeta1[i] / ext_.theta;
    const double at = std::clamp(vertex, delta, ups);
    best = std::min(best, (0.5 * ext_.theta * at + ext_.zeta1[i]) * at + ext_.zeta0[i]);
    total += best;
  }
  return total;
}

}  // namespace proxsplit
