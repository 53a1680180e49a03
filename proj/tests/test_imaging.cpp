#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "proxsplit/imaging.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace proxsplit;

namespace {

Vec random_vec(Eigen::Index n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

Eigen::MatrixXd as_matrix(const ProxMap& op, Eigen::Index in, Eigen::Index out) {
  Eigen::MatrixXd m(out, in);
  for (Eigen::Index j = 0; j < in; ++j) m.col(j) = op(Vec::Unit(in, j));
  return m;
}

}  // namespace

TEST_CASE("blur: constants, impulse, adjoint, box") {
  BlurOp t(3, 6, 5);
  const Vec c = Vec::Constant(30, 7.25);
  CHECK((t.apply(c) - c).cwiseAbs().maxCoeff() < 1e-14);
  const Vec imp = Vec::Unit(30, 0);
  const Vec b = t.apply(imp);
  int hits = 0;
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index col = 0; col < 6; ++col) {
      const bool near = (r == 0 || r == 1 || r == 4) && (col == 0 || col == 1 || col == 5);
      if (near) {
        CHECK(b[r * 6 + col] == doctest::Approx(1.0 / 9));
        ++hits;
      } else {
        CHECK(b[r * 6 + col] == 0.0);
      }
    }
  CHECK(hits == 9);

  std::mt19937_64 rng(1);
  BlurOp t5(5, 16, 8);
  for (int k = 0; k < 10; ++k) {
    const Vec x = random_vec(128, rng), y = random_vec(128, rng);
    CHECK(std::abs(t5.apply(x).dot(y) - x.dot(t5.adjoint(y))) <= 1e-10 * x.norm() * y.norm());
    const Vec box = random_vec(128, rng, 0, 255);
    Vec edge = box;
    edge.head(64).setConstant(255.0);
    for (const Vec& v : {box, edge}) {
      const Vec out = t5.apply(v);
      CHECK(out.minCoeff() >= 0.0);
      CHECK(out.maxCoeff() <= 255.0);
    }
  }
  CHECK((t5.apply(Vec::Constant(128, 255.0)).array() == 255.0).all());
  CHECK_THROWS_AS(BlurOp(4, 8, 8), InvalidArgument);
  CHECK_THROWS_AS(t.apply(Vec::Zero(3)), InvalidArgument);
}

TEST_CASE("symlet filter bank") {
  CHECK(filter_orthonormality_residual(symlet6_lowpass()) < 1e-14);
  Filter6 bad = symlet6_lowpass();
  bad[2] += 1e-3;
  CHECK(filter_orthonormality_residual(bad) > 1e-4);
}

TEST_CASE("periodic DWT is orthonormal and kills constants in detail bands") {
  std::mt19937_64 rng(2);
  for (auto [w, h, L] : {std::tuple{16, 8, 3}, std::tuple{8, 8, 3}, std::tuple{32, 32, 2}}) {
    PeriodicDWT dwt(w, h, L);
    const Vec x = random_vec(w * h, rng);
    const Vec c = dwt.forward(x);
    CHECK((dwt.inverse(c) - x).norm() <= 1e-10 * x.norm());
    CHECK(std::abs(c.norm() - x.norm()) <= 1e-10 * x.norm());
    const Vec y = random_vec(w * h, rng);
    CHECK(std::abs(dwt.forward(x).dot(y) - x.dot(dwt.inverse(y))) <= 1e-10 * x.norm() * y.norm());

    const Vec k = dwt.forward(Vec::Constant(w * h, 100.0));
    const auto& band = dwt.subband_map();
    for (Eigen::Index i = 0; i < k.size(); ++i)
      if (band[static_cast<std::size_t>(i)] != 0) CHECK(std::abs(k[i]) <= 1e-10);
  }
  CHECK_THROWS_AS(PeriodicDWT(12, 8, 3), InvalidArgument);
}

TEST_CASE("subband labels") {
  PeriodicDWT dwt(8, 8, 2);
  const auto& b = dwt.subband_map();
  CHECK(b[0] == 0);
  CHECK(b[1 * 8 + 1] == 0);
  CHECK(b[2] == 2);
  CHECK(b[2 * 8 + 2] == 2);
  CHECK(b[4] == 1);
  CHECK(b[7 * 8 + 0] == 1);
  CHECK(std::count(b.begin(), b.end(), 0) == 4);
}

TEST_CASE("frames are tight") {
  std::mt19937_64 rng(3);
  for (auto kind : {FrameKind::OrthonormalSymlet6, FrameKind::TwoBasisTight}) {
    FrameOp f(kind, 16, 16, 3);
    CHECK(f.nu() == (kind == FrameKind::TwoBasisTight ? 2.0 : 1.0));
    CHECK(f.coeff_count() == static_cast<Eigen::Index>(f.nu()) * 256);
    CHECK(f.subband_map().size() == static_cast<std::size_t>(f.coeff_count()));
    for (int k = 0; k < 5; ++k) {
      const Vec x = random_vec(256, rng);
      CHECK((f.synthesis(f.analysis(x)) - f.nu() * x).norm() <= 1e-10 * x.norm());
      CHECK(std::abs(f.analysis(x).squaredNorm() - f.nu() * x.squaredNorm()) <=
            1e-10 * x.squaredNorm());
      const Vec c = random_vec(f.coeff_count(), rng);
      CHECK(std::abs(f.analysis(x).dot(c) - x.dot(f.synthesis(c))) <= 1e-10 * x.norm() * c.norm());
    }
  }
  CHECK(parse_frame_kind("two-basis") == FrameKind::TwoBasisTight);
  CHECK_THROWS_AS(parse_frame_kind("dual-tree"), InvalidArgument);
}

TEST_CASE("constraint projection") {
  std::mt19937_64 rng(4);
  for (auto kind : {FrameKind::OrthonormalSymlet6, FrameKind::TwoBasisTight}) {
    FrameOp f(kind, 8, 8, 2);
    FrameBoxConstraint cons(f);
    const Vec inside = f.analysis(random_vec(64, rng, 0, 255)) / f.nu();
    CHECK(cons.project(inside) == inside);
    const Vec x = random_vec(f.coeff_count(), rng, -300, 600);
    const Vec p = cons.project(x);
    CHECK(cons.image_violation(p) <= 1e-10);
    CHECK((cons.project(p) - p).norm() <= 1e-10 * std::max(1.0, p.norm()));
    if (kind == FrameKind::OrthonormalSymlet6)
      CHECK((p - f.analysis(f.synthesis(x).cwiseMax(0.0).cwiseMin(255.0))).norm() <= 1e-10 * p.norm());
  }
}

TEST_CASE("projection matches a dual proximal-gradient oracle on 4x4, nu = 2") {
  FrameOp f(FrameKind::TwoBasisTight, 4, 4, 2);
  FrameBoxConstraint cons(f);
  const Eigen::MatrixXd A =
      as_matrix([&](const Vec& c) { return f.synthesis(c); }, f.coeff_count(), 16);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec x = random_vec(32, rng, -200, 500);
    // min_mu ½||A^T mu||² - mu.Ax + sigma_B(mu); y = x - A^T mu.
    Vec mu = Vec::Zero(16);
    const double t = 0.5;
    const Vec Ax = A * x;
    for (int k = 0; k < 3000; ++k) {
      const Vec v = mu - t * (A * (A.transpose() * mu) - Ax);
      mu = v - t * (v / t).cwiseMax(0.0).cwiseMin(255.0);
    }
    const Vec y = x - A.transpose() * mu;
    CHECK((cons.project(x) - y).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("operator norm estimate") {
  const ProxMap id = [](const Vec& v) { return v; };
  const ProxMap twice = [](const Vec& v) { return Vec(2 * v); };
  const ProxMap zero = [](const Vec& v) { return Vec(Vec::Zero(v.size())); };
  CHECK(std::abs(opnorm_estimate(id, id, 10) - 1) < 1e-8);
  CHECK(std::abs(opnorm_estimate(twice, twice, 10) - 2) < 1e-8);
  CHECK(opnorm_estimate(zero, zero, 10) == 0.0);

  FrameOp f(FrameKind::TwoBasisTight, 16, 16, 3);
  BlurOp t(5, 16, 16);
  const auto chain = blur_synthesis_chain(t, f);
  const double est = opnorm_estimate(chain.forward, chain.adjoint, chain.dim_in, 100, 9);
  CHECK(est <= std::sqrt(2.0) * (1 + 1e-6));
  // Constant-image probe: x = F 1 / 2 gives T F* x = 1 with ||x|| = ||1|| / sqrt 2.
  const Vec probe = f.analysis(Vec::Ones(256)) / 2.0;
  CHECK(est >= chain.forward(probe).norm() / probe.norm() * (1 - 1e-6));
  CHECK(opnorm_estimate(chain.forward, chain.adjoint, chain.dim_in, 100, 9) == est);
}

TEST_CASE("degradation") {
  const ImageGrid img = synthetic_image("checkerboard", 64, 64);
  BlurOp t(5, 64, 64);
  const Vec u = t.apply(img.samples);

  const auto g = NoiseFamily::uniform(NoiseKind::SignalDepGaussian, 4096, 1e6);
  const auto z = degrade(img, t, g, 7);
  const Vec d = Eigen::Map<const Vec>(z.data(), 4096) - u;
  const double var = d.squaredNorm() / 4096.0;
  const double expected = u.mean() / (2 * 1e6);
  // sample variance of N samples: sd ~ expected * sqrt(2/N)
  CHECK(var <= expected * (1 + 3 * std::sqrt(2.0 / 4096)));
  CHECK(snr(Eigen::Map<const Vec>(z.data(), 4096), u) >= 60.0);

  const auto p = NoiseFamily::uniform(NoiseKind::Poisson, 4096, 0.1);
  CHECK(degrade(img, t, p, 7) == degrade(img, t, p, 7));
  CHECK(degrade(img, t, p, 7) != degrade(img, t, p, 8));
  const ImageGrid black = ImageGrid::filled(8, 8, 0.0);
  for (double v : degrade(black, BlurOp(3, 8, 8), NoiseFamily::uniform(NoiseKind::Poisson, 64, 1), 1))
    CHECK(v == 0.0);
  ImageGrid neg = ImageGrid::filled(8, 8, 1.0);
  neg.samples[3] = -1;
  CHECK_THROWS_AS(degrade(neg, BlurOp(3, 8, 8), NoiseFamily::uniform(NoiseKind::Poisson, 64, 1), 1),
                  InvalidArgument);
}

TEST_CASE("snr") {
  const Vec y = Vec::LinSpaced(10, 1, 10);
  CHECK(snr(y, y) == kInf);
  Vec e = Vec::Zero(10);
  e[0] = y.norm() / 10;
  CHECK(snr(y + e, y) == doctest::Approx(20.0));
  e[0] = y.norm();
  CHECK(std::abs(snr(y + e, y)) < 1e-12);
  CHECK_THROWS_AS(snr(y, Vec::Zero(10)), InvalidArgument);
}

TEST_CASE("synthetic images stay in range") {
  for (auto name : {"checkerboard", "phantom"}) {
    const ImageGrid img = synthetic_image(name, 64, 64);
    CHECK(img.samples.minCoeff() >= 0);
    CHECK(img.samples.maxCoeff() <= 255);
    CHECK(img.samples.maxCoeff() > img.samples.minCoeff());
  }
  CHECK_THROWS_AS(synthetic_image("lena", 8, 8), InvalidArgument);
}
