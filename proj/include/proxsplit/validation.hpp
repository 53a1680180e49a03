#pragma once
// Desk-scale self checks behind `proxsplit validate`: operator identities,
// prox properties, data-term properties, inner/outer solver behaviour and
// the counterexamples. Each check is independent and reports a detail line.

#include <string>
#include <vector>

namespace proxsplit {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  /// Negative control: nudge the first symlet coefficient by 1e-3.
  bool perturb_symlet = false;
};

std::vector<CheckResult> run_validation(const ValidateOptions& options = {});

/// {"passed": bool, "checks": [{name, passed, detail, seconds}, ...]}
std::string validation_json(const std::vector<CheckResult>& results);

}  // namespace proxsplit
