#pragma once
// MAP restoration in frame coefficients: minimize f + g_theta + iota_C with
//   f(x)       = sum_k phi_{band(k)}(x_k)       (per-subband potentials)
//   g_theta(x) = Psi_theta(T F* x)             (extended anti-log-likelihood)
//   C          = {x : F* x in [0, 255]^N}.

#include "proxsplit/imaging.hpp"
#include "proxsplit/nested.hpp"
#include "proxsplit/noise.hpp"
#include "proxsplit/prox.hpp"

#include <map>
#include <memory>

namespace proxsplit {

/// Potential per subband label: 0 = approximation, j = level-j details.
struct SubbandPrior {
  ScalarPotential fallback = ScalarPotential::make(1.0, 0.1, PowerExponent::Two);
  std::map<int, ScalarPotential> bands;

  const ScalarPotential& for_band(int band) const;
};

struct RestorationSetup {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::vector<double> z;  ///< observation, row-major
  NoiseKind noise = NoiseKind::Poisson;
  double alpha = 1.0;
  int blur_q = 5;
  FrameKind frame = FrameKind::TwoBasisTight;
  int levels = 3;
  SubbandPrior prior;
  double theta = 0.1;
  EpsilonRule epsilon;
  std::uint64_t opnorm_seed = 1;
};

class RestorationProblem {
 public:
  explicit RestorationProblem(const RestorationSetup& setup);

  /// Callables share ownership of the operators; the problem may outlive *this.
  const ConstrainedCompositeProblem& composite() const { return composite_; }

  /// P_C(F y / nu) for the degraded image y on the intensity scale (z, or z / alpha for Poisson).
  Vec initial_point() const;
  /// Degraded image on the intensity scale.
  Vec degraded_image() const;
  /// F* x (not clamped).
  Vec image(const Vec& coeffs) const;

  double f(const Vec& x) const { return composite_.f(x); }
  double g(const Vec& x) const { return composite_.g(x); }
  double beta() const { return composite_.beta; }
  double opnorm() const { return opnorm_; }
  const SmoothDataTerm& data_term() const { return *state_->term; }
  const FrameOp& frame() const { return state_->constraint.frame(); }

 private:
  struct State {
    RestorationSetup setup;
    BlurOp blur;
    FrameBoxConstraint constraint;
    std::vector<ScalarPotential> potentials;  // per coefficient
    std::unique_ptr<SmoothDataTerm> term;
  };
  std::shared_ptr<State> state_;
  double opnorm_ = 0.0;
  ConstrainedCompositeProblem composite_;
};

}  // namespace proxsplit
