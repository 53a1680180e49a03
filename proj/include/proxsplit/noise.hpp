#pragma once
// Anti-log-likelihoods psi_i of the observation model, their quadratic
// extensions psi_{theta,i} below the curvature threshold upsilon_i(theta),
// and the resulting smooth data term g_theta = Psi_theta o T o F*.
//
// Both families have domain threshold delta = 0 and index set I of pixels
// with a nonzero (Gaussian) or positive (Poisson) observation. Off I, psi_i
// is the linear function alpha_i v on [delta, inf).

#include "proxsplit/core.hpp"

#include <string_view>
#include <vector>

namespace proxsplit {

enum class NoiseKind { SignalDepGaussian, Poisson };

std::string_view noise_kind_name(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);  ///< "gaussian" | "poisson"

struct NoiseFamily {
  NoiseKind kind = NoiseKind::Poisson;
  std::vector<double> alpha;  ///< per pixel, > 0
  double delta = 0.0;

  static NoiseFamily uniform(NoiseKind kind, std::size_t pixels, double alpha);
  void validate() const;
};

/// Observed image z and the index set I.
class Observation {
 public:
  /// Rejects non-integral or negative Poisson data and an all-zero z.
  Observation(NoiseKind kind, std::vector<double> z);

  const std::vector<double>& z() const { return z_; }
  bool in_index_set(std::size_t i) const { return in_set_[i] != 0; }
  std::size_t size() const { return z_.size(); }
  std::size_t index_set_size() const;

 private:
  std::vector<double> z_;
  std::vector<char> in_set_;
};

/// theta -> epsilon(theta): either a constant or c / theta.
struct EpsilonRule {
  enum class Kind { Constant, InverseTheta };
  Kind kind = Kind::Constant;
  double c = 1e-6;

  double operator()(double theta) const;
  static EpsilonRule parse(std::string_view text);  ///< "constant:1e-6" | "inverse:0.5"
};

struct ZetaCoeffs {
  double zeta0 = 0.0;
  double zeta1 = 0.0;
};

/// Per-pixel extension data for one theta. Entries for pixels outside I are NaN.
struct ExtensionParams {
  double theta = 1.0;
  double epsilon = 1e-6;
  std::vector<double> upsilon;
  std::vector<double> zeta0;
  std::vector<double> zeta1;

  static ExtensionParams build(const NoiseFamily& family, const Observation& obs,
                               double theta, const EpsilonRule& epsilon);
};

// Single-pixel evaluators. `i` indexes both family.alpha and obs.z.

/// psi_i(v); +inf outside the domain.
double psi_eval(const NoiseFamily& family, const Observation& obs, std::size_t i, double v);
double psi_derivative(const NoiseFamily& family, const Observation& obs, std::size_t i,
                      double v);
double psi_second_derivative(const NoiseFamily& family, const Observation& obs, std::size_t i,
                             double v);

/// upsilon_i(theta), the point where psi_i'' crosses theta. Requires i in I.
double upsilon_threshold(const NoiseFamily& family, const Observation& obs, std::size_t i,
                         double theta);

/// Coefficients making the quadratic branch C^1 at upsilon_i(theta). Requires i in I.
ZetaCoeffs zeta_coeffs(const NoiseFamily& family, const Observation& obs, std::size_t i,
                       double theta);

double psi_theta_eval(const NoiseFamily& family, const Observation& obs,
                      const ExtensionParams& ext, std::size_t i, double v);
/// Derivative of the active branch; throws DomainError when v <= delta - epsilon.
double psi_theta_grad(const NoiseFamily& family, const Observation& obs,
                      const ExtensionParams& ext, std::size_t i, double v);

/// ½ (2 sqrt(alpha v + 3/8) - z)² on [0, inf), +inf below.
double anscombe_eval(double alpha, double z, double v);

/// beta_theta = theta ||T F*||².
double lipschitz_beta_theta(double theta, double opnorm_TFstar);

/// g_theta(x) = sum_i psi_{theta,i}((T F* x)_i) for frame coefficients x.
class SmoothDataTerm {
 public:
  /// `chain` maps coefficients to the blurred image (forward = T F*, adjoint = F T*).
  SmoothDataTerm(NoiseFamily family, Observation obs, ExtensionParams ext,
                 LinearOperatorPair chain, double opnorm_TFstar);

  double value(const Vec& x) const;          ///< g_theta(x); +inf off the domain
  double unextended_value(const Vec& x) const;  ///< g(x) = Psi(T F* x)
  /// F T* grad Psi_theta(T F* x). Throws DomainError naming the first pixel
  /// with (T F* x)_i <= delta - epsilon.
  Vec gradient(const Vec& x) const;

  double image_value(const Vec& u) const;  ///< Psi_theta(u)
  Vec image_gradient(const Vec& u) const;  ///< grad Psi_theta(u)

  /// Sum over pixels of the minimum of psi_{theta,i} on [delta, inf): a lower
  /// bound of g_theta over any C with T F* C inside [delta, inf)^N.
  double analytic_lower_bound() const;

  double beta() const { return beta_; }
  double theta() const { return ext_.theta; }
  const NoiseFamily& family() const { return family_; }
  const Observation& observation() const { return obs_; }
  const ExtensionParams& extension() const { return ext_; }
  const LinearOperatorPair& chain() const { return chain_; }

 private:
  NoiseFamily family_;
  Observation obs_;
  ExtensionParams ext_;
  LinearOperatorPair chain_;
  double beta_;
};

inline double g_theta_eval(const Vec& x, const SmoothDataTerm& term) { return term.value(x); }
inline Vec grad_g_theta(const Vec& x, const SmoothDataTerm& term) { return term.gradient(x); }

}  // namespace proxsplit
