#pragma once
// End-to-end commands behind the CLI: simulate a degraded observation,
// restore it with either nested solver, and write traces and reports.
//
// Output directory layout:
//   observation.f64   raw observation z (see image_io.hpp)
//   observation.meta  family, alpha, blur, seed, size
//   degraded.pgm      z on the intensity scale (z / alpha for Poisson)
//   truth.pgm         ground truth, synthetic inputs only
//   restored.pgm      F* x clamped to [0, 255]
//   trace.csv         one row per outer iteration
//   report.txt        key = value summary

#include "proxsplit/config.hpp"
#include "proxsplit/image_io.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>

namespace proxsplit {

constexpr int kTraceSchema = 1;

/// Ground truth from image.truth (PGM, values checked in [0, 255]) or image.synthetic.
ImageGrid load_truth(const RunConfig& cfg);

/// z for the configured blur, noise family and seed.
ImageGrid simulate_observation(const RunConfig& cfg, const ImageGrid& truth);

RestorationSetup make_restoration_setup(const RunConfig& cfg, const ImageGrid& observation);

struct RestorationOutcome {
  RunReport report;
  ImageGrid restored;  ///< clamped to [0, 255]
  ImageGrid degraded;  ///< intensity scale
  std::optional<double> snr_degraded;
  std::optional<double> snr_restored;
};

/// Builds the problem from `observation`, starts at P_C(F y / nu) and runs the
/// configured solver. SolverAbort propagates.
RestorationOutcome run_restoration(const RunConfig& cfg, const ImageGrid& observation,
                                   const std::optional<ImageGrid>& truth);

/// Toy problem from cfg.toy, solved from P_C(center).
RunReport run_toy(const RunConfig& cfg);
ConstrainedCompositeProblem toy_problem(const ToySpec& toy);

std::string trace_csv(const RunTrace& trace);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
/// Returns after writing outputs. On SolverAbort the partial trace and a
/// report with status = aborted are written before the exception propagates.
void cmd_restore(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace proxsplit
