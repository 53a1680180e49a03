#include "proxsplit/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace proxsplit {

namespace fs = std::filesystem;

namespace {

// Shortest representation that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + num(v[i]);
  return out;
}

ImageGrid clamp_image(Eigen::Index w, Eigen::Index h, const Vec& v) {
  return ImageGrid(w, h, v.cwiseMax(0.0).cwiseMin(255.0));
}

RunReport solve(const RunConfig& cfg, const ConstrainedCompositeProblem& p, const Vec& start) {
  return cfg.algorithm == Algorithm::DrOuter ? solve_dr_outer(p, cfg.solver, start)
                                             : solve_fb_outer(p, cfg.solver, start);
}

void write_report(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string body;
  for (const auto& [k, v] : kv) body += k + " = " + v + "\n";
  write_text_atomic(path, body);
}

std::vector<std::pair<std::string, std::string>> report_common(const RunConfig& cfg,
                                                               const RunReport& r) {
  std::size_t inner = 0;
  for (auto n : r.inner_counts) inner += n;
  return {{"schema", std::to_string(kTraceSchema)},
          {"algorithm", std::string(algorithm_name(cfg.algorithm))},
          {"theta", num(cfg.theta)},
          {"outer_iterations", std::to_string(r.outer_iterations)},
          {"inner_iterations_total", std::to_string(inner)},
          {"converged", r.converged ? "true" : "false"},
          {"wall_seconds", r.trace.empty() ? "0" : num(r.trace.back().wall_seconds)}};
}

void require_meta(const std::map<std::string, std::string>& meta, const std::string& key,
                  const std::string& expected, const fs::path& path) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw ConfigError("'" + path.string() + "' lacks '" + key + "'");
  if (it->second != expected)
    throw ConfigError("observation was simulated with " + key + " = " + it->second +
                      " but the config says " + expected);
}

}  // namespace

ImageGrid load_truth(const RunConfig& cfg) {
  if (cfg.truth_path) {
    if (!fs::exists(*cfg.truth_path))
      throw IoError("input image '" + cfg.truth_path->string() + "' does not exist");
    ImageGrid img = read_pgm(*cfg.truth_path);
    if (img.samples.maxCoeff() > 255.0)
      throw InvalidArgument("'" + cfg.truth_path->string() + "' has values above 255");
    return img;
  }
  if (cfg.synthetic) return synthetic_image(*cfg.synthetic, cfg.width, cfg.height);
  throw ConfigError("no ground truth: set image.truth or image.synthetic");
}

ImageGrid simulate_observation(const RunConfig& cfg, const ImageGrid& truth) {
  const BlurOp blur(cfg.blur_q, truth.width, truth.height);
  const auto family = NoiseFamily::uniform(cfg.noise, static_cast<std::size_t>(truth.size()), cfg.alpha);
  const auto z = degrade(truth, blur, family, cfg.seed);
  return ImageGrid(truth.width, truth.height, Eigen::Map<const Vec>(z.data(), truth.size()));
}

RestorationSetup make_restoration_setup(const RunConfig& cfg, const ImageGrid& observation) {
  RestorationSetup s;
  s.width = observation.width;
  s.height = observation.height;
  s.z.assign(observation.samples.data(), observation.samples.data() + observation.size());
  s.noise = cfg.noise;
  s.alpha = cfg.alpha;
  s.blur_q = cfg.blur_q;
  s.frame = cfg.frame;
  s.levels = cfg.levels;
  s.prior = cfg.prior;
  s.theta = cfg.theta;
  s.epsilon = cfg.epsilon;
  return s;
}

RestorationOutcome run_restoration(const RunConfig& cfg, const ImageGrid& observation,
                                   const std::optional<ImageGrid>& truth) {
  const RestorationProblem problem(make_restoration_setup(cfg, observation));
  RestorationOutcome out;
  out.degraded = ImageGrid(observation.width, observation.height, problem.degraded_image());
  if (truth) {
    require(truth->width == observation.width && truth->height == observation.height,
            "ground truth and observation differ in size");
    out.snr_degraded = snr(out.degraded.samples, truth->samples);
  }
  out.report = solve(cfg, problem.composite(), problem.initial_point());
  out.restored = clamp_image(observation.width, observation.height, problem.image(out.report.solution));
  if (truth) out.snr_restored = snr(out.restored.samples, truth->samples);
  return out;
}

ConstrainedCompositeProblem toy_problem(const ToySpec& toy) {
  ConstrainedCompositeProblem p;
  const Vec c = toy.center, w = toy.weights, lo = toy.lower, hi = toy.upper;
  p.dim = c.size();
  p.f = [w](const Vec& x) { return w.dot(x.cwiseAbs()); };
  p.prox_f = [w](double gamma, const Vec& y) {
    Vec out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
      out[i] = std::copysign(std::max(std::abs(y[i]) - gamma * w[i], 0.0), y[i]);
    return out;
  };
  p.g = [c](const Vec& x) { return 0.5 * (x - c).squaredNorm(); };
  p.grad_g = [c](const Vec& x) { return Vec(x - c); };
  p.beta = 1.0;
  p.project_C = [lo, hi](const Vec& x) { return Vec(x.cwiseMax(lo).cwiseMin(hi)); };
  p.inf_g_on_C = 0.0;
  return p;
}

RunReport run_toy(const RunConfig& cfg) {
  const auto p = toy_problem(cfg.toy);
  return solve(cfg, p, p.project_C(cfg.toy.center));
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream out;
  out << "# schema=" << kTraceSchema << '\n'
      << "outer_iter,wall_seconds,objective,normalized_objective,inner_iters,outer_step_norm\n";
  const auto norm = trace.normalized_objective();
  char buf[256];
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& r = trace.rows[k];
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.17g,%.17g,%zu,%.17g\n", r.iteration, r.wall_seconds,
                  r.objective, norm[k], r.inner_iterations, r.step_norm);
    out << buf;
  }
  return out.str();
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  if (cfg.kind == ProblemKind::Toy) throw ConfigError("simulate: toy problems have no observation");
  const ImageGrid truth = load_truth(cfg);
  const ImageGrid z = simulate_observation(cfg, truth);
  fs::create_directories(out_dir);

  Vec intensity = z.samples;
  if (cfg.noise == NoiseKind::Poisson) intensity /= cfg.alpha;
  write_raw_f64(out_dir / "observation.f64", z);
  write_pgm(out_dir / "degraded.pgm", ImageGrid(z.width, z.height, intensity));
  if (cfg.synthetic) write_pgm(out_dir / "truth.pgm", truth);
  write_report(out_dir / "observation.meta",
               {{"schema", std::to_string(kTraceSchema)},
                {"family", std::string(noise_kind_name(cfg.noise))},
                {"alpha", num(cfg.alpha)},
                {"blur_q", std::to_string(cfg.blur_q)},
                {"seed", std::to_string(cfg.seed)},
                {"width", std::to_string(z.width)},
                {"height", std::to_string(z.height)},
                {"source", cfg.synthetic ? "synthetic:" + *cfg.synthetic : cfg.truth_path->string()}});
  log << "simulate: " << z.width << "x" << z.height << ' ' << noise_kind_name(cfg.noise)
      << " alpha=" << cfg.alpha << " blur=" << cfg.blur_q << " seed=" << cfg.seed << " -> "
      << out_dir.string() << '\n';
}

void cmd_restore(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  if (cfg.kind == ProblemKind::Toy) {
    RunReport r;
    try {
      r = run_toy(cfg);
    } catch (const SolverAbort& e) {
      write_text_atomic(out_dir / "trace.csv", trace_csv(e.partial().trace));
      throw;
    }
    write_text_atomic(out_dir / "trace.csv", trace_csv(r.trace));
    auto kv = report_common(cfg, r);
    kv.insert(kv.begin(), {"status", "ok"});
    kv.push_back({"final_objective", num(r.objective_final)});
    kv.push_back({"solution", join(r.solution)});
    write_report(out_dir / "report.txt", kv);
    log << "restore (toy): solution " << join(r.solution) << ", objective " << num(r.objective_final) << '\n';
    return;
  }

  const fs::path obs_path = out_dir / "observation.f64";
  const fs::path meta_path = out_dir / "observation.meta";
  if (!fs::exists(obs_path))
    throw IoError("observation '" + obs_path.string() + "' does not exist (run simulate first)");
  if (!fs::exists(meta_path)) throw IoError("metadata '" + meta_path.string() + "' does not exist");
  const ImageGrid z = read_raw_f64(obs_path);
  const auto meta = read_key_values(meta_path);
  require_meta(meta, "family", std::string(noise_kind_name(cfg.noise)), meta_path);
  require_meta(meta, "alpha", num(cfg.alpha), meta_path);
  require_meta(meta, "blur_q", std::to_string(cfg.blur_q), meta_path);
  require_meta(meta, "width", std::to_string(z.width), meta_path);
  require_meta(meta, "height", std::to_string(z.height), meta_path);

  std::optional<ImageGrid> truth;
  if (cfg.has_truth()) truth = load_truth(cfg);

  RestorationOutcome out;
  try {
    out = run_restoration(cfg, z, truth);
  } catch (const SolverAbort& e) {
    write_text_atomic(out_dir / "trace.csv", trace_csv(e.partial().trace));
    auto kv = report_common(cfg, e.partial());
    kv.insert(kv.begin(), {"status", "aborted"});
    kv.push_back({"error", e.what()});
    write_report(out_dir / "report.txt", kv);
    throw;
  }

  write_pgm(out_dir / "restored.pgm", out.restored);
  write_text_atomic(out_dir / "trace.csv", trace_csv(out.report.trace));
  auto kv = report_common(cfg, out.report);
  kv.insert(kv.begin(), {"status", "ok"});
  kv.push_back({"frame", std::string(frame_kind_name(cfg.frame))});
  kv.push_back({"final_objective", num(out.report.objective_final)});
  if (out.snr_restored) {
    kv.push_back({"snr_degraded_db", num(*out.snr_degraded)});
    kv.push_back({"snr_restored_db", num(*out.snr_restored)});
  }
  write_report(out_dir / "report.txt", kv);

  log << "restore: " << algorithm_name(cfg.algorithm) << " theta=" << cfg.theta << ", "
      << out.report.outer_iterations << " outer iterations"
      << (out.report.converged ? " (converged)" : "") << ", objective "
      << num(out.report.objective_final);
  if (out.snr_restored) {
    char buf[96];
    std::snprintf(buf, sizeof buf, ", SNR %.2f dB (degraded %.2f dB)", *out.snr_restored, *out.snr_degraded);
    log << buf;
  }
  log << '\n';
}

}  // namespace proxsplit
