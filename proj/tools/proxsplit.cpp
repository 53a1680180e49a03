// proxsplit: simulate | restore | validate | prox
//
// Exit codes: 0 ok, 1 solver failure or failed validation check, 2 usage,
// configuration or I/O error.

#include "proxsplit/pipeline.hpp"
#include "proxsplit/prox.hpp"
#include "proxsplit/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace proxsplit;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  std::optional<std::string> algorithm;

  // validate
  bool json = false;
  bool perturb_symlet = false;
  bool out_given = false;

  // prox
  double chi = 0, omega = 0, gamma = 1, t = 0;
  std::string p = "2";
  std::vector<double> box;
};

RunConfig load_with_overrides(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.theta) cfg.theta = *o.theta;
  if (o.algorithm) {
    try {
      cfg.algorithm = parse_algorithm(*o.algorithm);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.validate();
  return cfg;
}

int run_validate(const Options& o) {
  ValidateOptions vo;
  vo.perturb_symlet = o.perturb_symlet;
  const auto results = run_validation(vo);
  bool all = true;
  double total = 0;
  for (const auto& r : results) {
    all = all && r.passed;
    total += r.seconds;
    if (!o.json)
      std::printf("%-4s %-32s %6.2fs  %s\n", r.passed ? "ok" : "FAIL", r.name.c_str(), r.seconds,
                  r.detail.c_str());
  }
  const std::string summary = validation_json(results);
  if (o.json) std::printf("%s\n", summary.c_str());
  else std::printf("%s: %zu checks in %.1f s\n", all ? "all checks passed" : "validation FAILED",
                   results.size(), total);
  if (o.out_given) {
    std::filesystem::create_directories(o.out);
    write_text_atomic(std::filesystem::path(o.out) / "validation.json", summary + "\n");
  }
  return all ? kOk : kSolverFailure;
}

int run_prox(const Options& o) {
  const auto p = parse_exponent(o.p);
  if (!p) throw InvalidArgument("--p must be one of 4/3, 3/2, 2 (got '" + o.p + "')");
  if (o.gamma <= 0) throw InvalidArgument("--gamma must be > 0");
  const auto phi = ScalarPotential::make(o.chi, o.omega, *p);
  const double y = o.box.empty() ? prox_scalar(phi, o.gamma, o.t)
                                 : prox_scalar_constrained(phi, o.gamma, ClosedInterval(o.box[0], o.box[1]), o.t);
  std::printf("%.15g\n", y);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained proximal splitting for Poisson and signal-dependent Gaussian image restoration"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Degrade the ground-truth image and write the observation");
  sim->add_option("--config", o.config, "Config file")->required();
  sim->add_option("--out", o.out, "Output directory")->capture_default_str();
  sim->add_option("--seed", o.seed, "Noise seed (overrides the config)");
  sim->footer("Config keys:\n" + proxsplit::config_key_reference());

  auto* res = app.add_subcommand("restore", "Restore the observation in --out (or solve a toy config)");
  res->add_option("--config", o.config, "Config file")->required();
  res->add_option("--out", o.out, "Directory holding the observation; outputs go here too")->capture_default_str();
  res->add_option("--theta", o.theta, "Override model.theta");
  res->add_option("--algorithm", o.algorithm, "dr-outer | fb-outer (overrides solver.algorithm)");
  res->footer("Config keys:\n" + proxsplit::config_key_reference());

  auto* val = app.add_subcommand("validate", "Run the built-in property checks");
  val->add_flag("--json", o.json, "Print the JSON summary instead of the table");
  val->add_option("--out", o.out, "Also write validation.json into this directory");
  val->add_flag("--perturb-symlet", o.perturb_symlet, "Negative control: corrupt the symlet filter");

  auto* prox = app.add_subcommand("prox", "Evaluate the scalar prox of chi|t| + omega|t|^p");
  prox->add_option("--chi", o.chi, "l1 weight")->capture_default_str();
  prox->add_option("--omega", o.omega, "power weight")->capture_default_str();
  prox->add_option("--p", o.p, "exponent: 4/3, 3/2 or 2")->capture_default_str();
  prox->add_option("--gamma", o.gamma, "prox scale")->capture_default_str();
  prox->add_option("--t", o.t, "input value")->required();
  prox->add_option("--box", o.box, "interval LO HI")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  o.out_given = val->count("--out") > 0;

  try {
    if (*sim) {
      cmd_simulate(load_with_overrides(o), o.out, std::cout);
    } else if (*res) {
      cmd_restore(load_with_overrides(o), o.out, std::cout);
    } else if (*val) {
      return run_validate(o);
    } else if (*prox) {
      return run_prox(o);
    }
    return kOk;
  } catch (const SolverAbort& e) {
    std::cerr << "proxsplit: solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const ConfigError& e) {
    std::cerr << "proxsplit: config error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "proxsplit: I/O error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "proxsplit: invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "proxsplit: error: " << e.what() << '\n';
    return kUsage;
  }
}
