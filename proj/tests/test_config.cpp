#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "proxsplit/config.hpp"
#include "proxsplit/image_io.hpp"

using namespace proxsplit;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config("");
  CHECK(c.kind == ProblemKind::Image);
  CHECK(c.blur_q == 5);
  CHECK(c.noise == NoiseKind::Poisson);
  CHECK(c.alpha == 0.1);
  CHECK(c.algorithm == Algorithm::DrOuter);
  CHECK(c.solver.kappa == 60);
  CHECK(c.solver.eta == 1e-4);
  CHECK(c.seed == 7);
  CHECK(!c.has_truth());
  const auto& phi = c.prior.for_band(2);
  CHECK(phi.chi == 1.0);
  CHECK(phi.omega == 0.1);
  CHECK(phi.p == PowerExponent::Two);
}

TEST_CASE("full config") {
  const auto c = parse_config(R"(
# comment line
problem.kind = image
image.synthetic = checkerboard   # trailing comment
image.width = 32
image.height = 16
blur.q = 3
noise.family = gaussian
noise.alpha = 0.25
frame.kind = two-basis
frame.levels = 2
prior.chi = 0.5
prior.omega = 0.2
prior.p = 4/3
prior.approx.chi = 0
prior.detail2.omega = 0.7
model.theta = 0.01
model.epsilon = inverse:0.5
solver.algorithm = fb-outer
solver.kappa = 30
solver.eta = 1e-6
solver.inner_cap = 50
solver.outer_cap = 80
solver.outer_tol = 1e-8
solver.step_factor = 1.5
solver.lambda = 0.9
solver.tau = 1.2
seed = 42
)");
  CHECK(*c.synthetic == "checkerboard");
  CHECK(c.width == 32);
  CHECK(c.height == 16);
  CHECK(c.blur_q == 3);
  CHECK(c.noise == NoiseKind::SignalDepGaussian);
  CHECK(c.alpha == 0.25);
  CHECK(c.frame == FrameKind::TwoBasisTight);
  CHECK(c.levels == 2);
  CHECK(c.theta == 0.01);
  CHECK(c.epsilon(0.01) == doctest::Approx(50));
  CHECK(c.algorithm == Algorithm::FbOuter);
  CHECK(c.solver.kappa == 30);
  CHECK(c.solver.inner_cap == 50);
  CHECK(c.solver.outer_cap == 80);
  CHECK(c.solver.step_factor == 1.5);
  CHECK(c.solver.tau == 1.2);
  CHECK(c.seed == 42);

  // fallback band, then per-band fields falling back field by field
  CHECK(c.prior.for_band(1).chi == 0.5);
  CHECK(c.prior.for_band(1).p == PowerExponent::FourThirds);
  CHECK(c.prior.for_band(0).chi == 0.0);
  CHECK(c.prior.for_band(0).omega == 0.2);
  CHECK(c.prior.for_band(2).chi == 0.5);
  CHECK(c.prior.for_band(2).omega == 0.7);
}

TEST_CASE("toy config") {
  const auto c = parse_config("problem.kind = toy\ntoy.center = 2, -1\ntoy.weights = 1 1\ntoy.lower = 0 0\ntoy.upper = 1 1\n");
  CHECK(c.kind == ProblemKind::Toy);
  CHECK(c.toy.center.size() == 2);
  CHECK(c.toy.center[1] == -1);
  CHECK(!error_of("problem.kind = toy\ntoy.center = 1 2\ntoy.weights = 1\ntoy.lower = 0 0\ntoy.upper = 1 1\n").empty());
  CHECK(!error_of("problem.kind = toy\ntoy.center = 1\ntoy.weights = 1\ntoy.lower = 2\ntoy.upper = 1\n").empty());
}

TEST_CASE("strict rejection, with line numbers") {
  CHECK(error_of("noise.alpha = 1\nnoise.colour = red\n").find("line 2") != std::string::npos);
  CHECK(error_of("noise.colour = red").find("noise.colour") != std::string::npos);
  CHECK(error_of("seed = 1\nseed = 2\n").find("line 2") != std::string::npos);
  CHECK(!error_of("just some words").empty());
  CHECK(!error_of("model.theta = 0").empty());
  CHECK(!error_of("model.theta = -1").empty());
  CHECK(!error_of("model.theta = abc").empty());
  CHECK(!error_of("model.theta = nan").empty());
  CHECK(!error_of("solver.kappa = 0").empty());
  CHECK(!error_of("solver.eta = 0").empty());
  CHECK(!error_of("solver.step_factor = 2").empty());
  CHECK(!error_of("prior.p = 3").empty());
  CHECK(!error_of("prior.chi = -1").empty());
  CHECK(!error_of("prior.detail0.chi = 1").empty());
  CHECK(!error_of("prior.detail1.kappa = 1").empty());
  CHECK(!error_of("solver.algorithm = admm").empty());
  CHECK(!error_of("noise.family = laplace").empty());
  CHECK(!error_of("frame.kind = curvelet").empty());
  CHECK(!error_of("image.synthetic = lena").empty());
  CHECK(!error_of("solver.inner_cap = 0").empty());
  CHECK(!error_of("blur.q = 0").empty());
  CHECK(!error_of("model.epsilon = sometimes").empty());
  CHECK(!error_of("image.truth = a.pgm\nimage.synthetic = phantom\n").empty());
}

TEST_CASE("truth paths resolve against the config directory") {
  const auto c = parse_config("image.truth = img/a.pgm", "/data/run");
  CHECK(*c.truth_path == std::filesystem::path("/data/run/img/a.pgm"));
  const auto abs = parse_config("image.truth = /x/a.pgm", "/data/run");
  CHECK(*abs.truth_path == std::filesystem::path("/x/a.pgm"));
}

TEST_CASE("missing config file names the path") {
  try {
    load_config("/nonexistent/run.cfg");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/run.cfg") != std::string::npos);
  }
}

TEST_CASE("key reference lists every section") {
  const auto ref = config_key_reference();
  for (const char* k : {"noise.family", "solver.eta", "prior.approx", "prior.detailJ", "toy.center", "model.epsilon"})
    CHECK(ref.find(k) != std::string::npos);
}
