#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <vector>

namespace proxsplit {

struct TraceRow {
  std::size_t iteration = 0;
  double wall_seconds = 0.0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t inner_iterations = 0;
  double step_norm = 0.0;
};

/// Per-iteration record of a solve. Rows are appended in time order.
struct RunTrace {
  std::vector<TraceRow> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
  const TraceRow& back() const { return rows.back(); }

  /// (objective - final) / (initial - final), one value per row. The first
  /// entry is 1 and the last is 0 whenever initial != final.
  std::vector<double> normalized_objective() const;
  /// (objective - reference) / (initial - reference), e.g. with a reference
  /// shared by runs that are compared against each other. Not clamped:
  /// non-monotone runs can dip below 0.
  std::vector<double> normalized_objective(double reference) const;
};

/// Iteration budget and step-norm tolerance; whichever fires first stops.
struct StopRule {
  std::size_t max_iters = 1000;
  double step_tol = 1e-10;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace proxsplit
