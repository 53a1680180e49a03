#include "proxsplit/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

namespace proxsplit {

ImageGrid::ImageGrid(Eigen::Index w, Eigen::Index h, Vec s)
    : width(w), height(h), samples(std::move(s)) {
  require(w >= 1 && h >= 1, "image: width and height must be >= 1");
  require(samples.size() == w * h, "image: sample count differs from width * height");
  require(samples.allFinite(), "image: non-finite sample");
}

ImageGrid ImageGrid::filled(Eigen::Index w, Eigen::Index h, double value) {
  return ImageGrid(w, h, Vec::Constant(w * h, value));
}

// ---- blur -----------------------------------------------------------------

BlurOp::BlurOp(int q, Eigen::Index width, Eigen::Index height)
    : q_(q), width_(width), height_(height) {
  require(q >= 1 && q % 2 == 1, "blur: kernel size q must be odd and >= 1");
  require(width >= 1 && height >= 1, "blur: empty image");
}

Vec BlurOp::apply(const Vec& img) const {
  require(img.size() == width_ * height_, "blur: image size mismatch");
  const Eigen::Index r = q_ / 2;
  // Dividing the box sum (rather than multiplying by 1/q^2) keeps the output
  // inside [min, max] of the input exactly: rounding is monotone.
  const double area = double(q_) * double(q_);
  // Separable: horizontal box sums over a wrap-padded row, then vertical sums
  // of whole rows.
  Vec tmp(img.size());
  std::vector<double> padded(static_cast<std::size_t>(width_ + 2 * r));
  for (Eigen::Index y = 0; y < height_; ++y) {
    const double* row = img.data() + y * width_;
    for (Eigen::Index x = 0; x < width_ + 2 * r; ++x)
      padded[static_cast<std::size_t>(x)] = row[((x - r) % width_ + width_) % width_];
    double* out = tmp.data() + y * width_;
    for (Eigen::Index x = 0; x < width_; ++x) {
      double s = 0.0;
      for (Eigen::Index d = 0; d < q_; ++d) s += padded[static_cast<std::size_t>(x + d)];
      out[x] = s;
    }
  }
  Vec out = Vec::Zero(img.size());
  for (Eigen::Index y = 0; y < height_; ++y) {
    double* dst = out.data() + y * width_;
    for (Eigen::Index d = -r; d <= r; ++d) {
      const double* src = tmp.data() + (((y + d) % height_ + height_) % height_) * width_;
      for (Eigen::Index x = 0; x < width_; ++x) dst[x] += src[x];
    }
    for (Eigen::Index x = 0; x < width_; ++x) dst[x] /= area;
  }
  return out;
}

Vec BlurOp::adjoint(const Vec& img) const { return apply(img); }

// ---- wavelets -------------------------------------------------------------

const Filter6& symlet6_lowpass() {
  // Closed form for three vanishing moments (coincides with Daubechies-3):
  // (1 + s + r, 5 + s + 3r, 10 - 2s + 2r, 10 - 2s - 2r, 5 + s - 3r, 1 + s - r)
  // / (16 sqrt 2) with s = sqrt 10, r = sqrt(5 + 2s), reversed.
  static const Filter6 h = {0.03522629188570953, -0.08544127388202666, -0.13501102001025458,
                            0.45987750211849154, 0.8068915093110925,  0.33267055295008263};
  return h;
}

double filter_orthonormality_residual(const Filter6& h) {
  double worst = std::abs(h[0] + h[1] + h[2] + h[3] + h[4] + h[5] - std::sqrt(2.0));
  for (std::size_t k = 0; k < 3; ++k) {
    double s = 0.0;
    for (std::size_t n = 0; n + 2 * k < h.size(); ++n) s += h[n] * h[n + 2 * k];
    worst = std::max(worst, std::abs(s - (k == 0 ? 1.0 : 0.0)));
  }
  return worst;
}

PeriodicDWT::PeriodicDWT(Eigen::Index width, Eigen::Index height, int levels,
                         const Filter6& lowpass)
    : width_(width), height_(height), levels_(levels), lo_(lowpass) {
  require(levels >= 1, "wavelet: levels must be >= 1");
  const Eigen::Index block = Eigen::Index{1} << levels;
  require(width % block == 0 && height % block == 0,
          "wavelet: width and height must be divisible by 2^levels = " + std::to_string(block));
  require(width / block >= 1 && height / block >= 1, "wavelet: image too small");
  for (std::size_t n = 0; n < 6; ++n) hi_[n] = (n % 2 ? -1.0 : 1.0) * lo_[5 - n];

  subbands_.assign(static_cast<std::size_t>(width * height), 0);
  for (int j = 1; j <= levels; ++j) {
    const Eigen::Index w = width >> (j - 1), h = height >> (j - 1);
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c = 0; c < w; ++c)
        if (r >= h / 2 || c >= w / 2) subbands_[static_cast<std::size_t>(r * width + c)] = j;
  }
}

void PeriodicDWT::analyze_1d(const double* in, std::size_t n, double* out) const {
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t base = 2 * k;
    double a = 0.0, d = 0.0;
    if (base + 6 <= n) {
      for (std::size_t t = 0; t < 6; ++t) {
        a += lo_[t] * in[base + t];
        d += hi_[t] * in[base + t];
      }
    } else {
      for (std::size_t t = 0; t < 6; ++t) {
        const double v = in[(base + t) % n];
        a += lo_[t] * v;
        d += hi_[t] * v;
      }
    }
    out[k] = a;
    out[half + k] = d;
  }
}

void PeriodicDWT::synthesize_1d(const double* in, std::size_t n, double* out) const {
  const std::size_t half = n / 2;
  std::fill(out, out + n, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t base = 2 * k;
    const double a = in[k], d = in[half + k];
    if (base + 6 <= n) {
      for (std::size_t t = 0; t < 6; ++t) out[base + t] += lo_[t] * a + hi_[t] * d;
    } else {
      for (std::size_t t = 0; t < 6; ++t) out[(base + t) % n] += lo_[t] * a + hi_[t] * d;
    }
  }
}

// Column passes work on whole rows at a time: row k of the output block is a
// filter-weighted sum of six input rows, which vectorizes across the width.

Vec PeriodicDWT::forward(const Vec& img) const {
  require(img.size() == width_ * height_, "wavelet: image size mismatch");
  Vec c = img;
  std::vector<double> out(static_cast<std::size_t>(width_ * height_));
  for (int j = 0; j < levels_; ++j) {
    const Eigen::Index w = width_ >> j, h = height_ >> j;
    for (Eigen::Index r = 0; r < h; ++r) {
      double* row = c.data() + r * width_;
      analyze_1d(row, static_cast<std::size_t>(w), out.data());
      std::copy(out.begin(), out.begin() + w, row);
    }
    std::fill(out.begin(), out.begin() + h * w, 0.0);
    for (Eigen::Index k = 0; k < h / 2; ++k) {
      double* a = out.data() + k * w;
      double* d = out.data() + (h / 2 + k) * w;
      for (std::size_t t = 0; t < 6; ++t) {
        const double* src = c.data() + ((2 * k + Eigen::Index(t)) % h) * width_;
        const double lo = lo_[t], hi = hi_[t];
        for (Eigen::Index x = 0; x < w; ++x) {
          a[x] += lo * src[x];
          d[x] += hi * src[x];
        }
      }
    }
    for (Eigen::Index r = 0; r < h; ++r)
      std::copy(out.begin() + r * w, out.begin() + (r + 1) * w, c.data() + r * width_);
  }
  return c;
}

Vec PeriodicDWT::inverse(const Vec& coeffs) const {
  require(coeffs.size() == width_ * height_, "wavelet: coefficient size mismatch");
  Vec c = coeffs;
  std::vector<double> out(static_cast<std::size_t>(width_ * height_));
  for (int j = levels_ - 1; j >= 0; --j) {
    const Eigen::Index w = width_ >> j, h = height_ >> j;
    std::fill(out.begin(), out.begin() + h * w, 0.0);
    for (Eigen::Index k = 0; k < h / 2; ++k) {
      const double* a = c.data() + k * width_;
      const double* d = c.data() + (h / 2 + k) * width_;
      for (std::size_t t = 0; t < 6; ++t) {
        double* dst = out.data() + ((2 * k + Eigen::Index(t)) % h) * w;
        const double lo = lo_[t], hi = hi_[t];
        for (Eigen::Index x = 0; x < w; ++x) dst[x] += lo * a[x] + hi * d[x];
      }
    }
    for (Eigen::Index r = 0; r < h; ++r) {
      synthesize_1d(out.data() + r * w, static_cast<std::size_t>(w), c.data() + r * width_);
    }
  }
  return c;
}

// ---- frames ---------------------------------------------------------------

std::string_view frame_kind_name(FrameKind kind) {
  return kind == FrameKind::TwoBasisTight ? "two-basis" : "orthonormal";
}

FrameKind parse_frame_kind(std::string_view text) {
  if (text == "orthonormal") return FrameKind::OrthonormalSymlet6;
  if (text == "two-basis") return FrameKind::TwoBasisTight;
  throw InvalidArgument("unknown frame kind '" + std::string(text) +
                        "' (expected orthonormal or two-basis)");
}

namespace {

// (S img)(r, c) = img(r - dr, c - dc), cyclically.
Vec shift_image(const Vec& img, Eigen::Index w, Eigen::Index h, Eigen::Index dr,
                Eigen::Index dc) {
  Vec out(img.size());
  const Eigen::Index sc = ((dc % w) + w) % w;
  for (Eigen::Index r = 0; r < h; ++r) {
    const double* src = img.data() + (((r - dr) % h + h) % h) * w;
    double* dst = out.data() + r * w;
    std::copy(src, src + (w - sc), dst + sc);
    std::copy(src + (w - sc), src + w, dst);
  }
  return out;
}

}  // namespace

FrameOp::FrameOp(FrameKind kind, Eigen::Index width, Eigen::Index height, int levels)
    : kind_(kind), dwt_(width, height, levels) {
  subbands_ = dwt_.subband_map();
  if (kind_ == FrameKind::TwoBasisTight)
    subbands_.insert(subbands_.end(), dwt_.subband_map().begin(), dwt_.subband_map().end());
}

Vec FrameOp::analysis(const Vec& img) const {
  if (kind_ == FrameKind::OrthonormalSymlet6) return dwt_.forward(img);
  const Eigen::Index n = pixels();
  Vec out(2 * n);
  out.head(n) = dwt_.forward(img);
  out.tail(n) = dwt_.forward(shift_image(img, width(), height(), 1, 1));
  return out;
}

Vec FrameOp::synthesis(const Vec& coeffs) const {
  require(coeffs.size() == coeff_count(), "frame: coefficient size mismatch");
  if (kind_ == FrameKind::OrthonormalSymlet6) return dwt_.inverse(coeffs);
  const Eigen::Index n = pixels();
  return dwt_.inverse(coeffs.head(n)) +
         shift_image(dwt_.inverse(coeffs.tail(n)), width(), height(), -1, -1);
}

FrameBoxConstraint::FrameBoxConstraint(FrameOp frame, double lo, double hi)
    : frame_(std::move(frame)), lo_(lo), hi_(hi) {
  const FrameOp& f = frame_;
  require(lo <= hi, "frame constraint: empty image box");
  // Tightness probe: F* F = nu Id.
  std::mt19937_64 rng(97);
  std::normal_distribution<double> normal;
  Vec probe(f.pixels());
  for (auto& v : probe) v = normal(rng);
  const double err = (f.synthesis(f.analysis(probe)) - f.nu() * probe).norm();
  if (!(err <= 1e-10 * std::max(1.0, probe.norm())))
    throw InvalidArgument("frame constraint: frame is not tight");
}

Vec FrameBoxConstraint::project(const Vec& coeffs) const {
  const Vec img = frame_.synthesis(coeffs);
  const Vec clamped = img.cwiseMax(lo_).cwiseMin(hi_);
  if (clamped == img) return coeffs;
  return coeffs + frame_.analysis(clamped - img) / frame_.nu();
}

double FrameBoxConstraint::image_violation(const Vec& coeffs) const {
  const Vec img = frame_.synthesis(coeffs);
  double worst = 0.0;
  for (double v : img) worst = std::max({worst, lo_ - v, v - hi_});
  return worst;
}

LinearOperatorPair blur_synthesis_chain(const BlurOp& blur, const FrameOp& frame) {
  require(blur.width() == frame.width() && blur.height() == frame.height(),
          "blur and frame sizes differ");
  auto t = std::make_shared<const BlurOp>(blur);
  auto f = std::make_shared<const FrameOp>(frame);
  LinearOperatorPair pair;
  pair.forward = [t, f](const Vec& x) { return t->apply(f->synthesis(x)); };
  pair.adjoint = [t, f](const Vec& u) { return f->analysis(t->adjoint(u)); };
  pair.dim_in = frame.coeff_count();
  pair.dim_out = frame.pixels();
  return pair;
}

double opnorm_estimate(const ProxMap& forward, const ProxMap& adjoint, Eigen::Index dim,
                       int iters, std::uint64_t seed) {
  require(dim >= 1 && iters >= 1, "opnorm_estimate: dim and iters must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec v(dim);
  for (auto& e : v) e = normal(rng);
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vec w = adjoint(forward(v));
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

std::vector<double> degrade(const ImageGrid& img, const BlurOp& blur, const NoiseFamily& family,
                            std::uint64_t seed) {
  family.validate();
  require(family.alpha.size() == static_cast<std::size_t>(img.size()),
          "degrade: alpha and image differ in size");
  for (Eigen::Index i = 0; i < img.size(); ++i)
    if (img.samples[i] < 0.0)
      throw InvalidArgument("degrade: negative input pixel " + std::to_string(i));
  const Vec u = blur.apply(img.samples);
  std::mt19937_64 rng(seed);
  std::vector<double> z(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = family.alpha[static_cast<std::size_t>(i)];
    const double ui = std::max(0.0, u[i]);
    double& zi = z[static_cast<std::size_t>(i)];
    if (family.kind == NoiseKind::Poisson) {
      const double mean = a * ui;
      zi = mean > 0.0 ? double(std::poisson_distribution<long long>(mean)(rng)) : 0.0;
    } else {
      const double sd = std::sqrt(ui / (2.0 * a));
      zi = sd > 0.0 ? ui + std::normal_distribution<double>(0.0, sd)(rng) : ui;
    }
  }
  return z;
}

double snr(const Vec& y, const Vec& yref) {
  require(y.size() == yref.size(), "snr: size mismatch");
  const double ref = yref.norm();
  require(ref > 0.0, "snr: zero reference image");
  const double err = (y - yref).norm();
  if (err == 0.0) return kInf;
  return 20.0 * std::log10(ref / err);
}

ImageGrid synthetic_image(std::string_view name, Eigen::Index width, Eigen::Index height) {
  ImageGrid img = ImageGrid::filled(width, height, 0.0);
  if (name == "checkerboard") {
    const Eigen::Index cell = std::max<Eigen::Index>(1, width / 8);
    for (Eigen::Index r = 0; r < height; ++r)
      for (Eigen::Index c = 0; c < width; ++c)
        img.at(r, c) = ((r / cell + c / cell) % 2) ? 200.0 : 40.0;
    return img;
  }
  if (name == "phantom") {
    // Ellipses (center, semi-axes, added intensity) in unit coordinates.
    struct Ellipse { double cx, cy, ax, ay, v; };
    static const Ellipse shapes[] = {{0.50, 0.50, 0.42, 0.46, 60.0},
                                     {0.50, 0.52, 0.36, 0.40, 60.0},
                                     {0.36, 0.42, 0.08, 0.14, 100.0},
                                     {0.64, 0.42, 0.09, 0.12, -40.0},
                                     {0.50, 0.70, 0.14, 0.06, 90.0},
                                     {0.55, 0.28, 0.05, 0.05, 120.0}};
    for (Eigen::Index r = 0; r < height; ++r)
      for (Eigen::Index c = 0; c < width; ++c) {
        const double x = (c + 0.5) / double(width), y = (r + 0.5) / double(height);
        double v = 10.0;
        for (const auto& e : shapes) {
          const double dx = (x - e.cx) / e.ax, dy = (y - e.cy) / e.ay;
          if (dx * dx + dy * dy <= 1.0) v += e.v;
        }
        img.at(r, c) = std::clamp(v, 0.0, 255.0);
      }
    return img;
  }
  throw InvalidArgument("unknown synthetic image '" + std::string(name) +
                        "' (expected checkerboard or phantom)");
}

}  // namespace proxsplit
