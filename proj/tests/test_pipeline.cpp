#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "proxsplit/oracle.hpp"
#include "proxsplit/pipeline.hpp"

#include <fstream>
#include <random>
#include <sstream>

using namespace proxsplit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("proxsplit_pipe_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Trace CSV without the wall-clock column.
std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto a = line.find(','), b = line.find(',', a + 1);
    out += (a == std::string::npos || b == std::string::npos) ? line : line.substr(0, a) + line.substr(b);
    out += '\n';
  }
  return out;
}

const char* kSmall = R"(
image.synthetic = phantom
image.width = 16
image.height = 16
blur.q = 3
noise.alpha = 0.5
frame.kind = orthonormal
frame.levels = 2
prior.chi = 0.05
prior.omega = 0
prior.approx.chi = 0
solver.outer_cap = 60
)";

}  // namespace

TEST_CASE("toy problem: both algorithms reach the grid-oracle minimizer (1, 0)") {
  auto cfg = parse_config(
      "problem.kind = toy\ntoy.center = 2 -1\ntoy.weights = 1 1\ntoy.lower = 0 0\ntoy.upper = 1 1\n"
      "solver.kappa = 1\nsolver.eta = 1e-12\nsolver.outer_cap = 5000\nsolver.outer_tol = 1e-12\n");
  const auto p = toy_problem(cfg.toy);
  const Vec ref = grid_minimize([&](const Vec& x) { return p.f(x) + p.g(x); },
                                SearchBox{cfg.toy.lower, cfg.toy.upper}, 1e-9);
  for (auto alg : {Algorithm::DrOuter, Algorithm::FbOuter}) {
    cfg.algorithm = alg;
    const auto r = run_toy(cfg);
    CHECK((r.solution - ref).norm() < 1e-6);
    CHECK(r.solution[0] == doctest::Approx(1).epsilon(1e-9));
    CHECK(std::abs(r.solution[1]) < 1e-9);
  }
}

TEST_CASE("trace CSV: schema line, fixed header, normalized column from 1 to 0") {
  RunTrace t;
  t.rows = {{0, 0.0, 10.0, 0, 0.0}, {1, 0.5, 4.0, 3, 1.5}, {2, 0.75, 2.0, 2, 0.25}};
  std::istringstream in(trace_csv(t));
  std::string line;
  std::getline(in, line);
  CHECK(line == "# schema=1");
  std::getline(in, line);
  CHECK(line == "outer_iter,wall_seconds,objective,normalized_objective,inner_iters,outer_step_norm");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "0,0.000000,10,1,0,0");
  CHECK(rows[1] == "1,0.500000,4,0.25,3,1.5");
  CHECK(rows[2] == "2,0.750000,2,0,2,0.25");
}

TEST_CASE("simulate is deterministic per seed") {
  TempDir a, b, c;
  auto cfg = parse_config("image.synthetic = checkerboard\nseed = 7\n");
  std::ostringstream log;
  cmd_simulate(cfg, a.path, log);
  cmd_simulate(cfg, b.path, log);
  CHECK(slurp(a.path / "observation.f64") == slurp(b.path / "observation.f64"));
  CHECK(slurp(a.path / "degraded.pgm") == slurp(b.path / "degraded.pgm"));
  CHECK(slurp(a.path / "observation.meta") == slurp(b.path / "observation.meta"));
  CHECK(fs::exists(a.path / "truth.pgm"));
  cfg.seed = 8;
  cmd_simulate(cfg, c.path, log);
  CHECK(slurp(a.path / "observation.f64") != slurp(c.path / "observation.f64"));

  const auto meta = read_key_values(a.path / "observation.meta");
  CHECK(meta.at("family") == "poisson");
  CHECK(meta.at("alpha") == "0.1");
  CHECK(meta.at("seed") == "7");
  CHECK(meta.at("blur_q") == "5");
  CHECK(meta.at("width") == "64");
}

TEST_CASE("Gaussian noise with huge alpha leaves the blurred image") {
  auto cfg = parse_config("image.synthetic = phantom\nnoise.family = gaussian\nnoise.alpha = 1e6\n");
  const auto truth = load_truth(cfg);
  const auto z = simulate_observation(cfg, truth);
  const Vec blurred = BlurOp(5, 64, 64).apply(truth.samples);
  // noise std per pixel is sqrt(u / 2e6) <= 0.008 against values of order 100
  CHECK(snr(z.samples, blurred) >= 60.0);
}

TEST_CASE("truth images are range checked") {
  TempDir tmp;
  Vec v = Vec::Constant(4, 300.0);
  write_pgm(tmp.path / "hot.pgm", ImageGrid(2, 2, v), 1000);
  auto cfg = parse_config("image.truth = hot.pgm", tmp.path);
  CHECK_THROWS_AS(load_truth(cfg), InvalidArgument);
  cfg = parse_config("image.truth = none.pgm", tmp.path);
  try {
    load_truth(cfg);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("none.pgm") != std::string::npos);
  }
  CHECK_THROWS_AS(load_truth(parse_config("")), ConfigError);
}

TEST_CASE("restore: outputs, SNR, determinism") {
  TempDir a, b;
  const auto cfg = parse_config(kSmall);
  std::ostringstream log;
  for (const auto* dir : {&a.path, &b.path}) {
    cmd_simulate(cfg, *dir, log);
    cmd_restore(cfg, *dir, log);
  }
  for (const char* f : {"restored.pgm", "trace.csv", "report.txt", "degraded.pgm"})
    CHECK(fs::exists(a.path / f));
  const auto report = read_key_values(a.path / "report.txt");
  CHECK(report.at("status") == "ok");
  CHECK(report.at("algorithm") == "dr-outer");
  CHECK(std::stod(report.at("snr_restored_db")) > std::stod(report.at("snr_degraded_db")));
  CHECK(slurp(a.path / "restored.pgm") == slurp(b.path / "restored.pgm"));
  CHECK(without_timing(slurp(a.path / "trace.csv")) == without_timing(slurp(b.path / "trace.csv")));

  // normalized objective: starts at 1, ends at 0, wall time nondecreasing
  std::istringstream in(slurp(a.path / "trace.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  double prev_wall = -1, first = -1, last = -1;
  while (std::getline(in, line)) {
    std::vector<double> cols;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) cols.push_back(std::stod(tok));
    CHECK(cols[1] >= prev_wall);
    prev_wall = cols[1];
    if (first < 0) first = cols[3];
    last = cols[3];
  }
  CHECK(first == 1.0);
  CHECK(last == 0.0);
}

TEST_CASE("restore without ground truth omits SNR") {
  TempDir tmp;
  const auto cfg = parse_config(kSmall);
  std::ostringstream log;
  cmd_simulate(cfg, tmp.path, log);
  auto blind = cfg;
  blind.synthetic.reset();
  cmd_restore(blind, tmp.path, log);
  const auto report = read_key_values(tmp.path / "report.txt");
  CHECK(report.count("snr_restored_db") == 0);
  CHECK(report.count("final_objective") == 1);
}

TEST_CASE("restore checks the observation and its metadata") {
  TempDir tmp;
  auto cfg = parse_config(kSmall);
  std::ostringstream log;
  try {
    cmd_restore(cfg, tmp.path, log);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("observation.f64") != std::string::npos);
  }
  cmd_simulate(cfg, tmp.path, log);
  cfg.alpha = 0.25;
  CHECK_THROWS_AS(cmd_restore(cfg, tmp.path, log), ConfigError);
  cfg = parse_config(kSmall);
  cfg.noise = NoiseKind::SignalDepGaussian;
  CHECK_THROWS_AS(cmd_restore(cfg, tmp.path, log), ConfigError);
  CHECK_THROWS_AS(cmd_simulate(parse_config("problem.kind = toy\ntoy.center = 1\ntoy.weights = 1\n"
                                            "toy.lower = 0\ntoy.upper = 1\n"), tmp.path, log),
                  ConfigError);
}
