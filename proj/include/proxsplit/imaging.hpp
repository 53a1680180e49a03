#pragma once
// Image-domain operators: periodic uniform blur T, a periodic symlet-6 wavelet
// transform, the frames built on it, the box constraint C = (F*)^{-1}[0,255]^N,
// degradation simulation and SNR.
//
// Images are row-major: pixel (r, c) lives at r * width + c.

#include "proxsplit/core.hpp"
#include "proxsplit/noise.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace proxsplit {

struct ImageGrid {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  Vec samples;

  ImageGrid() = default;
  ImageGrid(Eigen::Index width, Eigen::Index height, Vec samples);
  static ImageGrid filled(Eigen::Index width, Eigen::Index height, double value);

  Eigen::Index size() const { return width * height; }
  double at(Eigen::Index r, Eigen::Index c) const { return samples[r * width + c]; }
  double& at(Eigen::Index r, Eigen::Index c) { return samples[r * width + c]; }
};

/// q x q uniform blur with periodic boundary. The kernel is symmetric, so the
/// adjoint (correlation) coincides with apply.
class BlurOp {
 public:
  BlurOp(int q, Eigen::Index width, Eigen::Index height);

  Vec apply(const Vec& img) const;
  Vec adjoint(const Vec& img) const;
  int q() const { return q_; }
  Eigen::Index width() const { return width_; }
  Eigen::Index height() const { return height_; }

 private:
  int q_;
  Eigen::Index width_;
  Eigen::Index height_;
};

using Filter6 = std::array<double, 6>;

/// Symlet-6 (three vanishing moments) decomposition lowpass filter.
const Filter6& symlet6_lowpass();
/// max_k |sum_n h[n] h[n + 2k] - delta_k| together with |sum h - sqrt 2|.
double filter_orthonormality_residual(const Filter6& h);

/// L-level separable periodic orthonormal wavelet transform, Mallat layout:
/// after level j the top-left (width / 2^j) x (height / 2^j) block holds the
/// approximation.
class PeriodicDWT {
 public:
  PeriodicDWT(Eigen::Index width, Eigen::Index height, int levels,
              const Filter6& lowpass = symlet6_lowpass());

  Vec forward(const Vec& img) const;
  Vec inverse(const Vec& coeffs) const;

  /// 0 for the coarsest approximation, j in 1..levels for level-j details
  /// (j = 1 finest), per coefficient.
  const std::vector<int>& subband_map() const { return subbands_; }
  int levels() const { return levels_; }
  Eigen::Index width() const { return width_; }
  Eigen::Index height() const { return height_; }

 private:
  void analyze_1d(const double* in, std::size_t n, double* out) const;
  void synthesize_1d(const double* in, std::size_t n, double* out) const;

  Eigen::Index width_;
  Eigen::Index height_;
  int levels_;
  Filter6 lo_;
  Filter6 hi_;
  std::vector<int> subbands_;
};

enum class FrameKind { OrthonormalSymlet6, TwoBasisTight };

std::string_view frame_kind_name(FrameKind kind);
FrameKind parse_frame_kind(std::string_view text);  ///< "orthonormal" | "two-basis"

/// Analysis F : images -> coefficients and synthesis F* with F* F = nu Id.
/// TwoBasisTight stacks the wavelet coefficients of the image and of its
/// (1, 1) cyclic shift.
class FrameOp {
 public:
  FrameOp(FrameKind kind, Eigen::Index width, Eigen::Index height, int levels = 3);

  Vec analysis(const Vec& img) const;     ///< F
  Vec synthesis(const Vec& coeffs) const;  ///< F*

  FrameKind kind() const { return kind_; }
  double nu() const { return kind_ == FrameKind::TwoBasisTight ? 2.0 : 1.0; }
  Eigen::Index pixels() const { return dwt_.width() * dwt_.height(); }
  Eigen::Index coeff_count() const { return static_cast<Eigen::Index>(nu()) * pixels(); }
  int levels() const { return dwt_.levels(); }
  Eigen::Index width() const { return dwt_.width(); }
  Eigen::Index height() const { return dwt_.height(); }
  /// Subband label of every coefficient (see PeriodicDWT::subband_map).
  const std::vector<int>& subband_map() const { return subbands_; }

 private:
  FrameKind kind_;
  PeriodicDWT dwt_;
  std::vector<int> subbands_;
};

/// C = {x : F* x in [lo, hi]^N}, projected by x + nu^{-1} F(clamp(F* x) - F* x).
class FrameBoxConstraint {
 public:
  explicit FrameBoxConstraint(FrameOp frame, double lo = 0.0, double hi = 255.0);

  Vec project(const Vec& coeffs) const;
  /// max_i distance of (F* x)_i from [lo, hi].
  double image_violation(const Vec& coeffs) const;
  const FrameOp& frame() const { return frame_; }

 private:
  FrameOp frame_;
  double lo_;
  double hi_;
};

inline Vec project_constraint(const FrameBoxConstraint& cons, const Vec& x) {
  return cons.project(x);
}

/// T o F* and its adjoint F o T*. Holds copies of both operators.
LinearOperatorPair blur_synthesis_chain(const BlurOp& blur, const FrameOp& frame);

/// sqrt of the dominant eigenvalue of adjoint o forward, by power iteration
/// from a seeded Gaussian start. Returns 0 for the zero operator.
double opnorm_estimate(const ProxMap& forward, const ProxMap& adjoint, Eigen::Index dim,
                       int iters = 100, std::uint64_t seed = 1);

/// z = T y + noise. Gaussian: z_i = u_i + N(0, u_i / (2 alpha_i)); Poisson:
/// z_i ~ Poisson(alpha_i u_i). Deterministic per seed.
std::vector<double> degrade(const ImageGrid& img, const BlurOp& blur, const NoiseFamily& family,
                            std::uint64_t seed);

/// 20 log10(||yref|| / ||y - yref||); +inf when y == yref.
double snr(const Vec& y, const Vec& yref);

/// Deterministic test images with values in [0, 255]: "checkerboard" or "phantom".
ImageGrid synthetic_image(std::string_view name, Eigen::Index width, Eigen::Index height);

}  // namespace proxsplit
