#pragma once
// Run configuration: flat `section.key = value` text.
//
//   # comment (also after a value)
//   noise.family = poisson
//   prior.detail1.chi = 0.05
//
// Unknown keys, repeated keys and out-of-range values are errors. Relative
// paths are resolved against the directory holding the config file.

#include "proxsplit/imaging.hpp"
#include "proxsplit/nested.hpp"
#include "proxsplit/noise.hpp"
#include "proxsplit/restoration.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace proxsplit {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Algorithm { DrOuter, FbOuter };
Algorithm parse_algorithm(std::string_view text);  ///< "dr-outer" | "fb-outer"
std::string_view algorithm_name(Algorithm a);

enum class ProblemKind { Image, Toy };

/// f = sum w_i |x_i|, g = ½||x - center||², C = [lower, upper]; identity operators.
struct ToySpec {
  Vec center;
  Vec weights;
  Vec lower;
  Vec upper;
};

struct RunConfig {
  ProblemKind kind = ProblemKind::Image;

  std::optional<std::filesystem::path> truth_path;  ///< PGM ground truth
  std::optional<std::string> synthetic;             ///< "phantom" | "checkerboard"
  Eigen::Index width = 64;                          ///< synthetic size only
  Eigen::Index height = 64;

  int blur_q = 5;
  NoiseKind noise = NoiseKind::Poisson;
  double alpha = 0.1;
  FrameKind frame = FrameKind::OrthonormalSymlet6;
  int levels = 3;
  SubbandPrior prior;
  double theta = 0.1;
  EpsilonRule epsilon;

  Algorithm algorithm = Algorithm::DrOuter;
  OuterConfig solver;
  std::uint64_t seed = 7;

  ToySpec toy;

  bool has_truth() const { return truth_path.has_value() || synthetic.has_value(); }
  void validate() const;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Every accepted key with a one-line description, for --help style output.
std::string config_key_reference();

}  // namespace proxsplit
