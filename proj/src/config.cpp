#include "proxsplit/config.hpp"

#include "proxsplit/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace proxsplit {

namespace fs = std::filesystem;

Algorithm parse_algorithm(std::string_view text) {
  if (text == "dr-outer") return Algorithm::DrOuter;
  if (text == "fb-outer") return Algorithm::FbOuter;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected dr-outer or fb-outer)");
}

std::string_view algorithm_name(Algorithm a) {
  return a == Algorithm::DrOuter ? "dr-outer" : "fb-outer";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key + ": '" + v + "' is not a finite number");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key + ": '" + v + "' is not an integer");
  return out;
}

Vec to_vec(const std::string& key, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) vals.push_back(to_double(key, tok));
  if (vals.empty()) throw ConfigError(key + ": expected a list of numbers");
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// Optional fields of one subband potential; unset fields fall back to prior.*.
struct BandFields {
  std::optional<double> chi, omega;
  std::optional<PowerExponent> p;
};

PowerExponent to_exponent(const std::string& key, const std::string& v) {
  const auto p = parse_exponent(v);
  if (!p) throw ConfigError(key + ": exponent must be 4/3, 3/2 or 2, got '" + v + "'");
  return *p;
}

struct Key {
  std::string help;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <class F>
auto wrap(F f) {
  return [f](RunConfig& c, const std::string& k, const std::string& v) {
    try {
      f(c, k, v);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(k + ": " + e.what());
    }
  };
}

const std::map<std::string, Key>& key_table() {
  static const std::map<std::string, Key> table = [] {
    std::map<std::string, Key> t;
    auto add = [&t](std::string name, std::string help, auto f) { t[name] = Key{std::move(help), wrap(f)}; };
    add("problem.kind", "image | toy", [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v == "image") c.kind = ProblemKind::Image;
      else if (v == "toy") c.kind = ProblemKind::Toy;
      else throw ConfigError(k + ": expected image or toy, got '" + v + "'");
    });
    add("image.truth", "ground-truth PGM (relative to the config file)",
        [](RunConfig& c, const std::string&, const std::string& v) { c.truth_path = fs::path(v); });
    add("image.synthetic", "phantom | checkerboard", [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v != "phantom" && v != "checkerboard")
        throw ConfigError(k + ": expected phantom or checkerboard, got '" + v + "'");
      c.synthetic = v;
    });
    add("image.width", "synthetic image width", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.width = static_cast<Eigen::Index>(to_int(k, v));
    });
    add("image.height", "synthetic image height", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.height = static_cast<Eigen::Index>(to_int(k, v));
    });
    add("blur.q", "uniform blur size q (q x q kernel)", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.blur_q = static_cast<int>(to_int(k, v));
    });
    add("noise.family", "gaussian | poisson", [](RunConfig& c, const std::string&, const std::string& v) {
      c.noise = parse_noise_kind(v);
    });
    add("noise.alpha", "noise scale alpha > 0", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.alpha = to_double(k, v);
    });
    add("frame.kind", "orthonormal | two-basis", [](RunConfig& c, const std::string&, const std::string& v) {
      c.frame = parse_frame_kind(v);
    });
    add("frame.levels", "wavelet decomposition levels", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.levels = static_cast<int>(to_int(k, v));
    });
    add("model.theta", "curvature cap theta > 0", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.theta = to_double(k, v);
    });
    add("model.epsilon", "constant:C | inverse:C (epsilon = C / theta)",
        [](RunConfig& c, const std::string&, const std::string& v) { c.epsilon = EpsilonRule::parse(v); });
    add("solver.algorithm", "dr-outer | fb-outer", [](RunConfig& c, const std::string&, const std::string& v) {
      c.algorithm = parse_algorithm(v);
    });
    add("solver.kappa", "dr-outer scale kappa > 0", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.solver.kappa = to_double(k, v);
    });
    add("solver.eta", "inner step-norm tolerance > 0", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.solver.eta = to_double(k, v);
    });
    add("solver.inner_cap", "max inner iterations per outer step", [](RunConfig& c, const std::string& k, const std::string& v) {
      const auto n = to_int(k, v);
      if (n < 1) throw ConfigError(k + ": must be >= 1");
      c.solver.inner_cap = static_cast<std::size_t>(n);
    });
    add("solver.outer_cap", "max outer iterations", [](RunConfig& c, const std::string& k, const std::string& v) {
      const auto n = to_int(k, v);
      if (n < 1) throw ConfigError(k + ": must be >= 1");
      c.solver.outer_cap = static_cast<std::size_t>(n);
    });
    add("solver.outer_tol", "outer step-norm tolerance >= 0", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.solver.outer_tol = to_double(k, v);
    });
    add("solver.step_factor", "gradient step as a fraction of 1/beta, in (0, 2)",
        [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.step_factor = to_double(k, v); });
    add("solver.lambda", "relaxation lambda in (0, 1]", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.solver.lambda = to_double(k, v);
    });
    add("solver.tau", "Douglas-Rachford relaxation tau in (0, 2]", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.solver.tau = to_double(k, v);
    });
    add("seed", "noise seed (unsigned integer)", [](RunConfig& c, const std::string& k, const std::string& v) {
      const auto n = to_int(k, v);
      if (n < 0) throw ConfigError(k + ": must be >= 0");
      c.seed = static_cast<std::uint64_t>(n);
    });
    add("toy.center", "toy: center of g, e.g. '2 -1'", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.toy.center = to_vec(k, v);
    });
    add("toy.weights", "toy: l1 weights of f", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.toy.weights = to_vec(k, v);
    });
    add("toy.lower", "toy: lower corner of C", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.toy.lower = to_vec(k, v);
    });
    add("toy.upper", "toy: upper corner of C", [](RunConfig& c, const std::string& k, const std::string& v) {
      c.toy.upper = to_vec(k, v);
    });
    return t;
  }();
  return table;
}

// prior.chi / prior.approx.chi / prior.detail2.omega ... -> (band, field);
// band -1 is the fallback.
std::optional<std::pair<int, std::string>> prior_key(const std::string& key) {
  if (key.rfind("prior.", 0) != 0) return std::nullopt;
  const std::string rest = key.substr(6);
  const auto dot = rest.find('.');
  const std::string field = dot == std::string::npos ? rest : rest.substr(dot + 1);
  if (field != "chi" && field != "omega" && field != "p") return std::nullopt;
  if (dot == std::string::npos) return std::make_pair(-1, field);
  const std::string band = rest.substr(0, dot);
  if (band == "approx") return std::make_pair(0, field);
  if (band.rfind("detail", 0) == 0 && band.size() > 6) {
    int j = 0;
    const auto [ptr, ec] = std::from_chars(band.data() + 6, band.data() + band.size(), j);
    if (ec == std::errc() && ptr == band.data() + band.size() && j >= 1) return std::make_pair(j, field);
  }
  return std::nullopt;
}

}  // namespace

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(theta > 0.0, "model.theta must be > 0");
  need(alpha > 0.0, "noise.alpha must be > 0");
  need(blur_q >= 1, "blur.q must be >= 1");
  need(levels >= 1 && levels <= 10, "frame.levels must be in [1, 10]");
  need(width >= 1 && height >= 1, "image.width and image.height must be >= 1");
  need(!(truth_path && synthetic), "image.truth and image.synthetic are mutually exclusive");
  try {
    solver.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (kind == ProblemKind::Toy) {
    const auto n = toy.center.size();
    need(n >= 1, "toy mode needs toy.center");
    need(toy.weights.size() == n && toy.lower.size() == n && toy.upper.size() == n,
         "toy.center, toy.weights, toy.lower and toy.upper must have the same length");
    need((toy.weights.array() >= 0).all(), "toy.weights must be >= 0");
    need((toy.lower.array() <= toy.upper.array()).all(), "toy.lower must not exceed toy.upper");
  }
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  RunConfig cfg;
  std::map<int, BandFields> bands;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");

    try {
      if (const auto pk = prior_key(key)) {
        auto& b = bands[pk->first];
        if (pk->second == "p") {
          b.p = to_exponent(key, value);
        } else {
          const double x = to_double(key, value);
          if (x < 0.0) throw ConfigError(key + ": must be >= 0");
          (pk->second == "chi" ? b.chi : b.omega) = x;
        }
        continue;
      }
      const auto& table = key_table();
      const auto it = table.find(key);
      if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
      it->second.set(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }

  const BandFields fb = bands.count(-1) ? bands[-1] : BandFields{};
  const ScalarPotential dflt = cfg.prior.fallback;
  cfg.prior.fallback = ScalarPotential::make(fb.chi.value_or(dflt.chi), fb.omega.value_or(dflt.omega),
                                             fb.p.value_or(dflt.p));
  for (const auto& [band, f] : bands) {
    if (band < 0) continue;
    if (band > cfg.levels)
      throw ConfigError("prior.detail" + std::to_string(band) + ".*: only " + std::to_string(cfg.levels) +
                        " levels configured");
    const auto& base = cfg.prior.fallback;
    cfg.prior.bands[band] = ScalarPotential::make(f.chi.value_or(base.chi), f.omega.value_or(base.omega),
                                                  f.p.value_or(base.p));
  }
  if (cfg.truth_path && cfg.truth_path->is_relative() && !base_dir.empty())
    cfg.truth_path = base_dir / *cfg.truth_path;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_key_reference() {
  std::ostringstream out;
  for (const auto& [name, key] : key_table()) out << "  " << name << "  " << key.help << '\n';
  out << "  prior.{chi,omega,p}  default potential chi|t| + omega|t|^p for every subband\n"
      << "  prior.approx.{chi,omega,p}  approximation band\n"
      << "  prior.detailJ.{chi,omega,p}  level-J details (J = 1 is the finest)\n";
  return out.str();
}

}  // namespace proxsplit
